#pragma once

// Overlay of the geometric analysis on the original frame: inertia
// ellipses of the kept features, their centers of mass, and the circle of
// radius R_max at the winning feature's weighted centroid.

#include <array>
#include <optional>
#include <vector>

#include "polypdet/classifier.hpp"
#include "polypdet/image_io.hpp"

namespace polypdet {

struct OverlayStyle {
    std::array<double, 3> ellipse_rgb{255, 255, 0};
    std::array<double, 3> centroid_rgb{0, 255, 0};
    std::array<double, 3> circle_rgb{255, 255, 0};
    int ellipse_samples = 180;
    int marker_size = 7;
    int thickness = 1;
};

struct OverlayCircle {
    Point2 center;  // 1-based
    double radius = 0.0;
};

/// What an overlay draws, in 1-based image coordinates.
struct OverlayGeometry {
    std::vector<std::vector<Point2>> ellipses;
    std::vector<Point2> centroids;
    std::optional<OverlayCircle> circle;
    bool empty() const { return ellipses.empty() && centroids.empty() && !circle; }
};

OverlayGeometry overlay_geometry(const FrameDecision& decision, int ellipse_samples = 180);

/// Returns the frame unchanged when no feature was kept.
RgbImage render_overlay(const RgbImage& frame, const FrameDecision& decision, const OverlayStyle& style = {});

}  // namespace polypdet
