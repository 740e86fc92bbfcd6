#include "polypdet/render.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include <cmath>

namespace polypdet {

namespace {

// Fixed-point shift for sub-pixel drawing.
constexpr int kShift = 4;
constexpr double kScale = 1 << kShift;

cv::Point to_cv(Point2 p) {
    return {static_cast<int>(std::lround((p.x - 1.0) * kScale)), static_cast<int>(std::lround((p.y - 1.0) * kScale))};
}

cv::Scalar bgr(const std::array<double, 3>& rgb) { return {rgb[2], rgb[1], rgb[0]}; }

}  // namespace

OverlayGeometry overlay_geometry(const FrameDecision& decision, int ellipse_samples) {
    OverlayGeometry g;
    for (const FeatureRecord& f : decision.features) {
        if (!(f.passes_size && f.passes_eccentricity) || !f.moments) continue;
        g.ellipses.push_back(ellipse_of_inertia(f.moments->inertia, static_cast<double>(f.size), f.moments->centroid,
                                                ellipse_samples));
        g.centroids.push_back(f.moments->centroid);
    }
    if (const auto w = decision.winning_feature()) {
        g.circle = OverlayCircle{decision.features[*w].ball->centroid.center, static_cast<double>(decision.r_max)};
    }
    return g;
}

RgbImage render_overlay(const RgbImage& frame, const FrameDecision& decision, const OverlayStyle& style) {
    const OverlayGeometry g = overlay_geometry(decision, style.ellipse_samples);
    if (g.empty()) return frame;

    const int rows = frame.rows();
    const int cols = frame.cols();
    cv::Mat img(rows, cols, CV_8UC3);
    for (int r = 0; r < rows; ++r) {
        auto* px = img.ptr<cv::Vec3b>(r);
        for (int c = 0; c < cols; ++c) {
            px[c] = {cv::saturate_cast<uchar>(frame.blue(r, c)), cv::saturate_cast<uchar>(frame.green(r, c)),
                     cv::saturate_cast<uchar>(frame.red(r, c))};
        }
    }

    for (const auto& ellipse : g.ellipses) {
        std::vector<cv::Point> pts;
        pts.reserve(ellipse.size());
        for (const Point2& p : ellipse) pts.push_back(to_cv(p));
        cv::polylines(img, pts, true, bgr(style.ellipse_rgb), style.thickness, cv::LINE_AA, kShift);
    }
    for (const Point2& c : g.centroids) {
        const double h = style.marker_size / 2.0;
        cv::line(img, to_cv({c.x - h, c.y - h}), to_cv({c.x + h, c.y + h}), bgr(style.centroid_rgb), style.thickness,
                 cv::LINE_AA, kShift);
        cv::line(img, to_cv({c.x - h, c.y + h}), to_cv({c.x + h, c.y - h}), bgr(style.centroid_rgb), style.thickness,
                 cv::LINE_AA, kShift);
    }
    if (g.circle) {
        cv::circle(img, to_cv(g.circle->center), static_cast<int>(std::lround(g.circle->radius * kScale)),
                   bgr(style.circle_rgb), style.thickness, cv::LINE_AA, kShift);
    }

    RgbImage out{Frame(rows, cols), Frame(rows, cols), Frame(rows, cols)};
    for (int r = 0; r < rows; ++r) {
        const auto* px = img.ptr<cv::Vec3b>(r);
        for (int c = 0; c < cols; ++c) {
            out.blue(r, c) = px[c][0];
            out.green(r, c) = px[c][1];
            out.red(r, c) = px[c][2];
        }
    }
    return out;
}

}  // namespace polypdet
