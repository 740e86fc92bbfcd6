#include "polypdet/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polypdet/error.hpp"

namespace polypdet {

namespace {

void check_dims(int rows, int cols) {
    if (rows < Frame::kMinSide || cols < Frame::kMinSide) {
        throw DimensionError("frame must be at least 8x8, got " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
}

void require_same_shape(const Frame& a, const Frame& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

}  // namespace

Frame::Frame(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
    check_dims(rows, cols);
    data_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

Frame::Frame(int rows, int cols, std::vector<double> pixels) : rows_(rows), cols_(cols), data_(std::move(pixels)) {
    check_dims(rows, cols);
    if (data_.size() != static_cast<std::size_t>(rows) * cols) {
        throw DimensionError("pixel buffer has " + std::to_string(data_.size()) + " values for a " +
                             std::to_string(rows) + "x" + std::to_string(cols) + " frame");
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        throw InputError("frame contains non-finite pixel values");
    }
}

double Frame::max() const { return *std::max_element(data_.begin(), data_.end()); }
double Frame::min() const { return *std::min_element(data_.begin(), data_.end()); }

CircularMask::CircularMask(int rows, int cols, double radius) : rows_(rows), cols_(cols), radius_(radius) {
    const double limit = std::min(rows, cols) / 2.0;
    if (!(radius > 0.0) || radius > limit) {
        throw ParameterError("mask radius " + std::to_string(radius) + " outside (0, " + std::to_string(limit) + "]");
    }
}

CircularMask CircularMask::standard(int rows, int cols) { return CircularMask(rows, cols, 0.45 * cols); }

GaussianKernel1D::GaussianKernel1D(double sigma) : sigma_(sigma) {
    if (!std::isfinite(sigma) || sigma < 1.0) {
        throw ParameterError("Gaussian sigma must be >= 1, got " + std::to_string(sigma));
    }
    radius_ = static_cast<int>(std::ceil(sigma));
    taps_.resize(2 * radius_ + 1);
    double sum = 0.0;
    for (int k = -radius_; k <= radius_; ++k) {
        const double v = std::exp(-0.5 * (k * k) / (sigma * sigma));
        taps_[k + radius_] = v;
        sum += v;
    }
    for (double& t : taps_) t /= sum;
}

std::size_t BinaryImage::count() const noexcept {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

int mirror_index(int idx, int n) noexcept {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    int m = idx % period;
    if (m < 0) m += period;
    return m < n ? m : period - m;
}

Frame to_grayscale(const Frame& red, const Frame& green, const Frame& blue) {
    require_same_shape(red, green, "grayscale channels");
    require_same_shape(red, blue, "grayscale channels");
    Frame out(red.rows(), red.cols());
    auto r = red.pixels();
    auto g = green.pixels();
    auto b = blue.pixels();
    auto o = out.pixels();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = 0.299 * r[k] + 0.587 * g[k] + 0.114 * b[k];
    return out;
}

Frame gaussian_convolve(const Frame& f, double sigma) { return gaussian_convolve(f, GaussianKernel1D(sigma)); }

Frame gaussian_convolve(const Frame& f, const GaussianKernel1D& kernel) {
    const int rows = f.rows();
    const int cols = f.cols();
    const int rad = kernel.radius();
    const auto taps = kernel.taps();

    // Row pass over a mirrored copy of each row.
    Frame tmp(rows, cols);
    std::vector<double> line(static_cast<std::size_t>(std::max(rows, cols) + 2 * rad));
    for (int r = 0; r < rows; ++r) {
        for (int c = -rad; c < cols + rad; ++c) line[c + rad] = f(r, mirror_index(c, cols));
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            const double* src = line.data() + c;
            for (int k = 0; k <= 2 * rad; ++k) acc += taps[k] * src[k];
            tmp(r, c) = acc;
        }
    }

    // Column pass, accumulated row by row for cache friendliness.
    Frame out(rows, cols);
    std::vector<int> src_row(static_cast<std::size_t>(rows + 2 * rad));
    for (int r = -rad; r < rows + rad; ++r) src_row[r + rad] = mirror_index(r, rows);
    auto in = tmp.pixels();
    auto dst = out.pixels();
    for (int r = 0; r < rows; ++r) {
        double* o = dst.data() + static_cast<std::size_t>(r) * cols;
        for (int k = 0; k <= 2 * rad; ++k) {
            const double w = taps[k];
            const double* s = in.data() + static_cast<std::size_t>(src_row[r + k]) * cols;
            for (int c = 0; c < cols; ++c) o[c] += w * s[c];
        }
    }
    return out;
}

Frame positive_part(const Frame& w) {
    Frame out = w;
    // H(0) = 1, so a zero pixel maps to 0 * 1 = 0.
    for (double& v : out.pixels()) v = v >= 0.0 ? v : 0.0;
    return out;
}

Frame apply_mask(const Frame& f, const CircularMask& m, double fill) {
    if (!m.fits(f)) throw DimensionError("mask does not match frame");
    Frame out = f;
    for (int r = 0; r < f.rows(); ++r)
        for (int c = 0; c < f.cols(); ++c)
            if (!m.contains(r, c)) out(r, c) = fill;
    return out;
}

double frobenius_distance(const Frame& a, const Frame& b, const CircularMask& m) {
    require_same_shape(a, b, "frobenius_distance");
    if (!m.fits(a)) throw DimensionError("mask does not match frame");
    double acc = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            if (m.contains(r, c)) {
                const double d = a(r, c) - b(r, c);
                acc += d * d;
            }
    return std::sqrt(acc);
}

}  // namespace polypdet
