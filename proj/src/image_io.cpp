#include "polypdet/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

#include "polypdet/error.hpp"

namespace polypdet {

namespace {

RgbImage from_mat(const cv::Mat& m, const std::string& what) {
    if (m.empty()) throw InputError("cannot decode image " + what);
    if (m.depth() != CV_8U) throw InputError("unsupported bit depth in " + what);
    const int rows = m.rows;
    const int cols = m.cols;
    if (rows < Frame::kMinSide || cols < Frame::kMinSide) throw InputError("image too small: " + what);
    RgbImage out{Frame(rows, cols), Frame(rows, cols), Frame(rows, cols)};
    for (int r = 0; r < rows; ++r) {
        const std::uint8_t* p = m.ptr<std::uint8_t>(r);
        for (int c = 0; c < cols; ++c) {
            if (m.channels() == 1) {
                out.red(r, c) = out.green(r, c) = out.blue(r, c) = p[c];
            } else {
                // OpenCV stores BGR
                const std::uint8_t* px = p + c * m.channels();
                out.blue(r, c) = px[0];
                out.green(r, c) = px[1];
                out.red(r, c) = px[2];
            }
        }
    }
    return out;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

cv::Mat to_mat(const RgbImage& img) {
    cv::Mat m(img.rows(), img.cols(), CV_8UC3);
    for (int r = 0; r < img.rows(); ++r) {
        auto* p = m.ptr<std::uint8_t>(r);
        for (int c = 0; c < img.cols(); ++c) {
            p[3 * c + 0] = to_byte(img.blue(r, c));
            p[3 * c + 1] = to_byte(img.green(r, c));
            p[3 * c + 2] = to_byte(img.red(r, c));
        }
    }
    return m;
}

}  // namespace

Frame to_grayscale(const RgbImage& rgb) { return to_grayscale(rgb.red, rgb.green, rgb.blue); }

RgbImage read_image(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw InputError("no such image: " + path.string());
    return from_mat(cv::imread(path.string(), cv::IMREAD_UNCHANGED), path.string());
}

RgbImage decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw InputError("empty image buffer");
    const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8U, const_cast<std::uint8_t*>(bytes.data()));
    return from_mat(cv::imdecode(buf, cv::IMREAD_UNCHANGED), "<memory>");
}

void write_image(const std::filesystem::path& path, const RgbImage& img) {
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), to_mat(img));
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw IoError("cannot write " + path.string());
}

void write_image(const std::filesystem::path& path, const Frame& gray) {
    cv::Mat m(gray.rows(), gray.cols(), CV_8UC1);
    for (int r = 0; r < gray.rows(); ++r)
        for (int c = 0; c < gray.cols(); ++c) m.at<std::uint8_t>(r, c) = to_byte(gray(r, c));
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw IoError("cannot write " + path.string());
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
    std::vector<std::uint8_t> out;
    if (!cv::imencode(".png", to_mat(img), out)) throw IoError("PNG encode failed");
    return out;
}

}  // namespace polypdet
