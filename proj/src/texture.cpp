#include "polypdet/texture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polypdet/error.hpp"

namespace polypdet {

namespace {

// Gradient magnitude with centered differences inside and one-sided
// differences on the border rows/columns.
Frame gradient_magnitude(const Frame& f) {
    const int rows = f.rows();
    const int cols = f.cols();
    Frame g(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const int r0 = r == 0 ? 0 : r - 1;
        const int r1 = r == rows - 1 ? rows - 1 : r + 1;
        for (int c = 0; c < cols; ++c) {
            const int c0 = c == 0 ? 0 : c - 1;
            const int c1 = c == cols - 1 ? cols - 1 : c + 1;
            const double gx = (f(r, c1) - f(r, c0)) / (c1 - c0);
            const double gy = (f(r1, c) - f(r0, c)) / (r1 - r0);
            g(r, c) = std::hypot(gx, gy);
        }
    }
    return g;
}

}  // namespace

TextureDecomposition decompose_cartoon_texture(const Frame& f, double sigma_t, int n_iter, DecompositionKnots knots) {
    if (n_iter < 1) throw ParameterError("n_iter must be >= 1, got " + std::to_string(n_iter));
    if (!(knots.low < knots.high)) throw ParameterError("decomposition knots must satisfy low < high");
    const GaussianKernel1D kernel(sigma_t);

    // (I - G)^n f by repeated high-pass, then L f = f - (I - G)^n f.
    Frame residual = f;
    for (int k = 0; k < n_iter; ++k) {
        const Frame smooth = gaussian_convolve(residual, kernel);
        auto rp = residual.pixels();
        auto sp = smooth.pixels();
        for (std::size_t i = 0; i < rp.size(); ++i) rp[i] -= sp[i];
    }
    Frame low = f;
    {
        auto lp = low.pixels();
        auto rp = residual.pixels();
        for (std::size_t i = 0; i < lp.size(); ++i) lp[i] -= rp[i];
    }

    const Frame ltv_f = gaussian_convolve(gradient_magnitude(f), kernel);
    const Frame ltv_low = gaussian_convolve(gradient_magnitude(low), kernel);

    TextureDecomposition out{f, Frame(f.rows(), f.cols())};
    auto fp = f.pixels();
    auto lp = low.pixels();
    auto a = ltv_f.pixels();
    auto b = ltv_low.pixels();
    auto cp = out.cartoon.pixels();
    auto tp = out.texture.pixels();
    const double span = knots.high - knots.low;
    for (std::size_t i = 0; i < fp.size(); ++i) {
        // Relative reduction of local total variation; zero where f is locally flat.
        const double lambda = a[i] > 1e-12 ? (a[i] - b[i]) / a[i] : 0.0;
        const double w = std::clamp((lambda - knots.low) / span, 0.0, 1.0);
        cp[i] = w == 0.0 ? fp[i] : w * lp[i] + (1.0 - w) * fp[i];
        tp[i] = fp[i] - cp[i];
    }
    return out;
}

TexturePeak texture_transform(const Frame& texture, double sigma, double p, const CircularMask& m) {
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("texture exponent p must be in (0, 1]");
    if (!m.fits(texture)) throw DimensionError("mask does not match texture frame");
    Frame powered = texture;
    for (double& v : powered.pixels()) v = std::pow(std::abs(v), p);
    TexturePeak peak{apply_mask(gaussian_convolve(powered, sigma), m, 0.0), 0.0};
    peak.t_max = peak.transformed.max();
    return peak;
}

bool preselect(double t_max, double t_low, double t_high) {
    if (!(t_low < t_high)) throw ParameterError("pre-selection bounds require T_L < T_U");
    return t_low <= t_max && t_max <= t_high;
}

}  // namespace polypdet
