#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "polypdet/error.hpp"
#include "polypdet/frame.hpp"
#include "support.hpp"

using namespace polypdet;

TEST_CASE("frame construction checks dimensions and values") {
    CHECK_THROWS_AS(Frame(7, 20), DimensionError);
    CHECK_THROWS_AS(Frame(8, 8, std::vector<double>(63)), DimensionError);
    std::vector<double> px(64, 1.0);
    px[5] = std::nan("");
    CHECK_THROWS_AS(Frame(8, 8, px), InputError);
    Frame f(8, 10, 3.0);
    CHECK(f.rows() == 8);
    CHECK(f.cols() == 10);
    CHECK(f.max() == 3.0);
    f(2, 3) = -1.0;
    CHECK(f.min() == -1.0);
}

TEST_CASE("mirror index reflects without repeating the edge") {
    CHECK(mirror_index(-1, 5) == 1);
    CHECK(mirror_index(-2, 5) == 2);
    CHECK(mirror_index(5, 5) == 3);
    CHECK(mirror_index(6, 5) == 2);
    CHECK(mirror_index(0, 5) == 0);
    CHECK(mirror_index(4, 5) == 4);
    // Far indices fold repeatedly with period 2(n-1).
    for (int i = -40; i < 40; ++i) CHECK(mirror_index(i, 5) == testing::reflect(i, 5));
    CHECK(mirror_index(-3, 1) == 0);
}

TEST_CASE("circular mask geometry") {
    CHECK_THROWS_AS(CircularMask(64, 64, 0.0), ParameterError);
    CHECK_THROWS_AS(CircularMask(64, 64, 32.5), ParameterError);
    const CircularMask m = CircularMask::standard(256, 256);
    CHECK(m.radius() == doctest::Approx(115.2));
    CHECK(m.center_x() == 128.0);
    CHECK(m.contains(127, 127));   // (x, y) = (128, 128), the center
    CHECK_FALSE(m.contains(0, 0));
    // (x, y) = (128 + 115, 128) lies inside, one more step does not.
    CHECK(m.contains(127, 127 + 115));
    CHECK_FALSE(m.contains(127, 127 + 116));
}

TEST_CASE("gaussian kernel taps") {
    CHECK_THROWS_AS(GaussianKernel1D(0.5), ParameterError);
    const GaussianKernel1D k(3.0);
    CHECK(k.radius() == 3);
    CHECK(k.taps().size() == 7);
    CHECK(std::accumulate(k.taps().begin(), k.taps().end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(k.taps()[0] == doctest::Approx(k.taps()[6]));
    CHECK(k.taps()[3] / k.taps()[2] == doctest::Approx(std::exp(1.0 / 18.0)));
    CHECK(GaussianKernel1D(1.2).taps().size() == 5);
}

TEST_CASE("separable convolution matches the direct 2D sum") {
    std::mt19937_64 rng(11);
    for (double sigma : {1.0, 2.5, 7.0}) {
        const Frame f = testing::random_frame(rng, 24, 31);
        const Frame a = gaussian_convolve(f, sigma);
        const Frame b = testing::brute_force_gaussian(f, sigma);
        double err = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a.pixels()[i] - b.pixels()[i]));
        CHECK(err <= 1e-9);
    }
}

TEST_CASE("convolution preserves constants and is linear") {
    std::mt19937_64 rng(3);
    const Frame c = gaussian_convolve(Frame(20, 20, 42.0), 5.0);
    for (double v : c.pixels()) CHECK(v == doctest::Approx(42.0).epsilon(1e-13));
    const Frame f = testing::random_frame(rng, 16, 16);
    Frame f2 = f;
    for (double& v : f2.pixels()) v *= 3.0;
    const Frame a = gaussian_convolve(f, 2.0);
    const Frame b = gaussian_convolve(f2, 2.0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.pixels()[i] == doctest::Approx(3.0 * a.pixels()[i]));
}

TEST_CASE("sigma wider than the frame still folds the boundary") {
    std::mt19937_64 rng(5);
    const Frame f = testing::random_frame(rng, 9, 12);
    const Frame a = gaussian_convolve(f, 30.0);
    const Frame b = testing::brute_force_gaussian(f, 30.0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.pixels()[i] == doctest::Approx(b.pixels()[i]).epsilon(1e-12));
}

TEST_CASE("grayscale uses Rec.601 weights") {
    const Frame r(8, 8, 100.0), g(8, 8, 50.0), b(8, 8, 200.0);
    CHECK(to_grayscale(r, g, b)(3, 3) == doctest::Approx(0.299 * 100 + 0.587 * 50 + 0.114 * 200));
    CHECK_THROWS_AS(to_grayscale(r, Frame(8, 9), b), DimensionError);
}

TEST_CASE("pixelwise helpers") {
    Frame w(8, 8, -1.0);
    w(0, 0) = 2.0;
    w(1, 1) = 0.0;
    const Frame p = positive_part(w);
    CHECK(p(0, 0) == 2.0);
    CHECK(p(1, 1) == 0.0);
    CHECK(p(2, 2) == 0.0);

    const CircularMask m(16, 16, 5.0);
    const Frame masked = apply_mask(Frame(16, 16, 7.0), m, -3.0);
    CHECK(masked(7, 7) == 7.0);
    CHECK(masked(0, 0) == -3.0);

    Frame a(16, 16, 1.0);
    const Frame b(16, 16, 0.0);
    a(0, 0) = 100.0;  // outside the mask, ignored
    std::size_t inside = 0;
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) inside += m.contains(r, c);
    CHECK(frobenius_distance(a, b, m) == doctest::Approx(std::sqrt(static_cast<double>(inside))));
}
