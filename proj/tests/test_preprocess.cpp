#include <doctest.h>

#include <cmath>
#include <random>

#include "polypdet/error.hpp"
#include "polypdet/preprocess.hpp"
#include "support.hpp"

using namespace polypdet;

namespace {

double masked_cv(const Frame& f, const CircularMask& m) {
    double s = 0.0, s2 = 0.0;
    int n = 0;
    for (int r = 0; r < f.rows(); ++r)
        for (int c = 0; c < f.cols(); ++c)
            if (m.contains(r, c)) {
                s += f(r, c);
                s2 += f(r, c) * f(r, c);
                ++n;
            }
    const double mean = s / n;
    return std::sqrt(std::max(s2 / n - mean * mean, 0.0)) / mean;
}

Frame vignetted_flat(int rows, int cols, const CircularMask& m, double level, std::mt19937_64* rng = nullptr) {
    Frame f(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double rho = std::hypot((c + 1) - m.center_x(), (r + 1) - m.center_y()) / m.radius();
            const double g = 1.0 - 0.5 * rho * rho + 0.1 * std::pow(rho, 4);
            f(r, c) = level * g + (rng ? testing::uniform(*rng, -1.0, 1.0) : 0.0);
        }
    return f;
}

}  // namespace

TEST_CASE("radial gain model") {
    RadialGainModel g;
    CHECK(g(0.0) == 1.0);
    CHECK(g(0.7) == 1.0);
    g.coeffs = {-40.0, 0.0, 0.0};
    CHECK(g(1.0) == RadialGainModel::kMinGain);
    g.coeffs = {-0.5, 0.1, 0.0};
    CHECK(g(0.5) == doctest::Approx(std::exp(-0.5 * 0.25 + 0.1 * 0.0625)));
}

TEST_CASE("vignetting correction flattens a shaded flat field") {
    const CircularMask m = CircularMask::standard(128, 128);
    std::mt19937_64 rng(1);
    const Frame f = vignetted_flat(128, 128, m, 160.0, &rng);
    const VignettingResult v = correct_vignetting(f, m);
    CHECK_FALSE(v.degenerate);
    const double before = masked_cv(f, m);
    const double after = masked_cv(v.frame, m);
    CHECK(after < 0.25 * before);
    // Pixels outside the mask are untouched.
    CHECK(v.frame(0, 0) == f(0, 0));
}

TEST_CASE("vignetting correction preserves the masked mean") {
    const CircularMask m = CircularMask::standard(64, 64);
    const Frame f = vignetted_flat(64, 64, m, 120.0);
    const VignettingResult v = correct_vignetting(f, m);
    double a = 0.0, b = 0.0;
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c)
            if (m.contains(r, c)) {
                a += f(r, c);
                b += v.frame(r, c);
            }
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("vignetting correction of a uniform frame is the identity") {
    const CircularMask m = CircularMask::standard(32, 32);
    const VignettingResult v = correct_vignetting(Frame(32, 32, 90.0), m);
    CHECK_FALSE(v.degenerate);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c) CHECK(v.frame(r, c) == doctest::Approx(90.0).epsilon(1e-9));
}

TEST_CASE("too few samples flag a degenerate fit and leave the frame alone") {
    const CircularMask m(16, 16, 1.0);
    std::mt19937_64 rng(2);
    const Frame f = testing::random_frame(rng, 16, 16);
    const VignettingResult v = correct_vignetting(f, m);
    CHECK(v.degenerate);
    CHECK(v.frame == f);
}

TEST_CASE("mask must match the frame") {
    CHECK_THROWS_AS(correct_vignetting(Frame(16, 16), CircularMask(20, 20, 5)), DimensionError);
    CHECK_THROWS_AS(extrapolate_radial(Frame(16, 16), CircularMask(20, 20, 5)), DimensionError);
}

TEST_CASE("radial unit vectors") {
    // 1-based center (4, 4) on an 8x8 grid is pixel (3, 3).
    const RadialVector z = radial_unit(3, 3, 8, 8);
    CHECK(z.dx == 0.0);
    CHECK(z.dy == 0.0);
    const RadialVector e = radial_unit(3, 7, 8, 8);
    CHECK(e.dx == doctest::Approx(1.0));
    CHECK(e.dy == doctest::Approx(0.0));
    const RadialVector d = radial_unit(0, 0, 8, 8);
    CHECK(d.dx == doctest::Approx(-std::sqrt(0.5)));
    CHECK(d.dy == doctest::Approx(-std::sqrt(0.5)));
}

TEST_CASE("extrapolation keeps the interior and solves the upwind equation outside") {
    std::mt19937_64 rng(4);
    for (auto [rows, cols] : {std::pair{64, 64}, std::pair{33, 47}, std::pair{40, 31}}) {
        const CircularMask m(rows, cols, 0.45 * std::min(rows, cols));
        const Frame f = testing::random_frame(rng, rows, cols);
        const Frame e = extrapolate_radial(f, m);
        double worst = 0.0;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                if (m.contains(r, c)) {
                    CHECK(e(r, c) == f(r, c));
                } else {
                    worst = std::max(worst, upwind_residual(e, r, c));
                }
            }
        CHECK(worst <= 1e-6);
        CHECK(extrapolate_radial(e, m) == e);
    }
}

TEST_CASE("extrapolation grows linearly along a ray from a constant interior") {
    const CircularMask m(64, 64, 20.0);
    const Frame e = extrapolate_radial(Frame(64, 64, 10.0), m);
    // Along the horizontal axis through the center the solution steps by 1.
    const int r = 31;  // y = 32, the center row
    for (int c = 53; c < 63; ++c) CHECK(e(r, c + 1) - e(r, c) == doctest::Approx(1.0));
    CHECK(e(0, 0) > e(10, 10));
}
