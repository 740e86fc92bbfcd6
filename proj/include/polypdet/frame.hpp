#pragma once

// Imaging core: the Frame type, circular field-of-view mask, separable
// Gaussian smoothing with mirror boundaries, and a few pixelwise helpers.
//
// Storage is row-major with 0-based (row, col) indices. Geometric
// quantities (centroids, mask center, ball centers) use the 1-based
// convention x = col + 1, y = row + 1.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace polypdet {

/// Real-valued single-channel image on the [0,255] intensity scale.
class Frame {
public:
    static constexpr int kMinSide = 8;

    Frame() = default;
    /// Throws DimensionError when either side is below kMinSide.
    Frame(int rows, int cols, double fill = 0.0);
    /// Throws DimensionError on size mismatch and InputError on non-finite values.
    Frame(int rows, int cols, std::vector<double> pixels);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(int r, int c) noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    std::span<double> pixels() noexcept { return data_; }
    std::span<const double> pixels() const noexcept { return data_; }

    bool same_shape(const Frame& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    double max() const;
    double min() const;

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Circular field of view centered at (N_x/2, N_y/2) in 1-based coordinates.
class CircularMask {
public:
    /// Throws ParameterError unless 0 < radius <= min(rows, cols)/2.
    CircularMask(int rows, int cols, double radius);

    /// Mask with the default radius 0.45 * N_x.
    static CircularMask standard(int rows, int cols);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    double radius() const noexcept { return radius_; }
    double center_x() const noexcept { return cols_ / 2.0; }
    double center_y() const noexcept { return rows_ / 2.0; }

    bool contains(int r, int c) const noexcept {
        const double dy = (r + 1) - center_y();
        const double dx = (c + 1) - center_x();
        return dy * dy + dx * dx <= radius_ * radius_;
    }

    bool fits(const Frame& f) const noexcept { return f.rows() == rows_ && f.cols() == cols_; }

private:
    int rows_;
    int cols_;
    double radius_;
};

/// Sampled, normalized 1D Gaussian on a stencil of 2*ceil(sigma)+1 taps.
class GaussianKernel1D {
public:
    /// Throws ParameterError when sigma < 1 or not finite.
    explicit GaussianKernel1D(double sigma);

    double sigma() const noexcept { return sigma_; }
    int radius() const noexcept { return radius_; }
    std::span<const double> taps() const noexcept { return taps_; }

private:
    double sigma_;
    int radius_;
    std::vector<double> taps_;
};

/// Binary image (0/1 per pixel), same indexing as Frame.
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0) {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::uint8_t& operator()(int r, int c) noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    std::uint8_t operator()(int r, int c) const noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    std::size_t count() const noexcept;

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Reflects an out-of-range index back into [0, n) without repeating the
/// edge sample: -1 -> 1, n -> n-2. Repeats the reflection for far indices.
int mirror_index(int idx, int n) noexcept;

/// Rec.601 luma of three equally shaped channels.
Frame to_grayscale(const Frame& red, const Frame& green, const Frame& blue);

/// Row pass then column pass with the same kernel, mirror boundaries.
Frame gaussian_convolve(const Frame& f, double sigma);
Frame gaussian_convolve(const Frame& f, const GaussianKernel1D& kernel);

/// Pixelwise max(w, 0).
Frame positive_part(const Frame& w);

/// Pixels outside the mask are set to `fill`; inside pixels are untouched.
Frame apply_mask(const Frame& f, const CircularMask& m, double fill = 0.0);

/// Frobenius norm of (a - b) restricted to pixels inside the mask.
double frobenius_distance(const Frame& a, const Frame& b, const CircularMask& m);

}  // namespace polypdet
