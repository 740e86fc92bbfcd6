#include "polypdet/preprocess.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "polypdet/error.hpp"

namespace polypdet {

double RadialGainModel::operator()(double rho) const noexcept {
    const double x = rho * rho;
    const double g = std::exp(x * (coeffs[0] + x * (coeffs[1] + x * coeffs[2])));
    return std::max(g, kMinGain);
}

VignettingResult RadialGainNormalizer::normalize(const Frame& f, const CircularMask& m) const {
    if (!m.fits(f)) throw DimensionError("mask does not match frame");

    struct Sample {
        double x;  // rho^2
        double value;
    };
    std::vector<Sample> samples;
    samples.reserve(f.size());
    const double inv_r2 = 1.0 / (m.radius() * m.radius());
    for (int r = 0; r < f.rows(); ++r) {
        for (int c = 0; c < f.cols(); ++c) {
            if (!m.contains(r, c)) continue;
            const double dy = (r + 1) - m.center_y();
            const double dx = (c + 1) - m.center_x();
            samples.push_back({(dx * dx + dy * dy) * inv_r2, f(r, c)});
        }
    }

    VignettingResult result{f, RadialGainModel{}, false};
    if (samples.size() < 8) {
        result.degenerate = true;
        return result;
    }

    // Drop the darkest 5% (lumen, shadows) from the fit.
    std::vector<Sample> fit = samples;
    const auto drop = static_cast<std::ptrdiff_t>(fit.size() / 20);
    std::nth_element(fit.begin(), fit.begin() + drop, fit.end(),
                     [](const Sample& a, const Sample& b) { return a.value < b.value; });
    fit.erase(fit.begin(), fit.begin() + drop);

    Eigen::Matrix4d normal = Eigen::Matrix4d::Zero();
    Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
    for (const Sample& s : fit) {
        const Eigen::Vector4d row(1.0, s.x, s.x * s.x, s.x * s.x * s.x);
        const double y = std::log(std::max(s.value, 1.0));
        normal.noalias() += row * row.transpose();
        rhs += y * row;
    }
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(normal);
    if (lu.rank() < 4) {
        result.degenerate = true;
        return result;
    }
    const Eigen::Vector4d beta = lu.solve(rhs);
    if (!beta.allFinite()) {
        result.degenerate = true;
        return result;
    }
    result.gain.coeffs = {beta[1], beta[2], beta[3]};

    Frame out = f;
    double sum_in = 0.0;
    double sum_out = 0.0;
    for (int r = 0; r < f.rows(); ++r) {
        for (int c = 0; c < f.cols(); ++c) {
            if (!m.contains(r, c)) continue;
            const double dy = (r + 1) - m.center_y();
            const double dx = (c + 1) - m.center_x();
            const double rho = std::sqrt(dx * dx + dy * dy) / m.radius();
            out(r, c) = f(r, c) / result.gain(rho);
            sum_in += f(r, c);
            sum_out += out(r, c);
        }
    }
    if (sum_out > 0.0) {
        const double scale = sum_in / sum_out;
        for (int r = 0; r < f.rows(); ++r)
            for (int c = 0; c < f.cols(); ++c)
                if (m.contains(r, c)) out(r, c) *= scale;
    }
    result.frame = std::move(out);
    return result;
}

VignettingResult correct_vignetting(const Frame& f, const CircularMask& m) {
    return RadialGainNormalizer{}.normalize(f, m);
}

RadialVector radial_unit(int r, int c, int rows, int cols) noexcept {
    const double dy = (r + 1) - rows / 2.0;
    const double dx = (c + 1) - cols / 2.0;
    const double n = std::hypot(dx, dy);
    if (n == 0.0) return {0.0, 0.0};
    return {dy / n, dx / n};
}

namespace {

// Neighbor one step toward the center along each axis; -1 when the
// corresponding component of r vanishes.
struct Upwind {
    int nr;  // row of the vertical neighbor
    int nc;  // col of the horizontal neighbor
    double ay;
    double ax;
};

Upwind upwind_at(int r, int c, int rows, int cols) noexcept {
    const RadialVector v = radial_unit(r, c, rows, cols);
    Upwind u{-1, -1, std::abs(v.dy), std::abs(v.dx)};
    if (v.dy > 0) u.nr = r - 1;
    if (v.dy < 0) u.nr = r + 1;
    if (v.dx > 0) u.nc = c - 1;
    if (v.dx < 0) u.nc = c + 1;
    return u;
}

}  // namespace

double upwind_residual(const Frame& f, int r, int c) {
    const Upwind u = upwind_at(r, c, f.rows(), f.cols());
    double lhs = 0.0;
    if (u.nc >= 0) lhs += u.ax * (f(r, c) - f(r, u.nc));
    if (u.nr >= 0) lhs += u.ay * (f(r, c) - f(u.nr, c));
    return std::abs(lhs - 1.0);
}

Frame extrapolate_radial(const Frame& f, const CircularMask& m) {
    if (!m.fits(f)) throw DimensionError("mask does not match frame");
    const int rows = f.rows();
    const int cols = f.cols();

    // Doubled offsets are integers, so squared distances compare exactly.
    auto dist2 = [&](int idx) {
        const long long dy = 2LL * (idx / cols + 1) - rows;
        const long long dx = 2LL * (idx % cols + 1) - cols;
        return dy * dy + dx * dx;
    };

    std::vector<int> exterior;
    std::vector<std::uint8_t> final_px(f.size(), 1);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (!m.contains(r, c)) {
                exterior.push_back(r * cols + c);
                final_px[static_cast<std::size_t>(r) * cols + c] = 0;
            }
    std::stable_sort(exterior.begin(), exterior.end(), [&](int a, int b) { return dist2(a) < dist2(b); });

    Frame out = f;
    auto is_final = [&](int r, int c) { return final_px[static_cast<std::size_t>(r) * cols + c] != 0; };
    auto mark = [&](int r, int c) { final_px[static_cast<std::size_t>(r) * cols + c] = 1; };

    for (const int idx : exterior) {
        const int r = idx / cols;
        const int c = idx % cols;
        if (is_final(r, c)) continue;
        const Upwind u = upwind_at(r, c, rows, cols);
        const bool x_pending = u.nc >= 0 && !is_final(r, u.nc);
        const bool y_pending = u.nr >= 0 && !is_final(u.nr, c);

        if (!x_pending && !y_pending) {
            double num = 1.0;
            if (u.nc >= 0) num += u.ax * out(r, u.nc);
            if (u.nr >= 0) num += u.ay * out(u.nr, c);
            out(r, c) = num / (u.ax + u.ay);
            mark(r, c);
            continue;
        }

        // Odd side length: the pixel half a step off the center line and its
        // mirror partner are each other's upwind neighbor. Solve the 2x2 system.
        // a (fp - fq) + b (fp - gp) = 1,  a (fq - fp) + b (fq - gq) = 1
        const bool horizontal = x_pending;
        const int qr = horizontal ? r : u.nr;
        const int qc = horizontal ? u.nc : c;
        const Upwind uq = upwind_at(qr, qc, rows, cols);
        const double a = horizontal ? u.ax : u.ay;
        const double b = horizontal ? u.ay : u.ax;
        const int gpr = horizontal ? u.nr : r;
        const int gpc = horizontal ? c : u.nc;
        const int gqr = horizontal ? uq.nr : qr;
        const int gqc = horizontal ? qc : uq.nc;
        const bool has_g = horizontal ? u.nr >= 0 : u.nc >= 0;
        if (!has_g || b == 0.0) throw ContractViolation("degenerate upwind pair in extrapolation");
        const double gp = out(gpr, gpc);
        const double gq = out(gqr, gqc);
        const double sum = 2.0 / b + gp + gq;
        const double diff = b * (gp - gq) / (2.0 * a + b);
        out(r, c) = 0.5 * (sum + diff);
        out(qr, qc) = 0.5 * (sum - diff);
        mark(r, c);
        mark(qr, qc);
    }
    return out;
}

}  // namespace polypdet
