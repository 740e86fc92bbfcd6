#include <doctest.h>

#include <cmath>
#include <random>

#include "polypdet/error.hpp"
#include "polypdet/midpass.hpp"
#include "support.hpp"

using namespace polypdet;

namespace {

Frame bump_frame(int n, int cr, int cc, double amp, double sigma) {
    Frame f(n, n, 100.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
            f(r, c) += amp * std::exp(-d2 / (2.0 * sigma * sigma));
        }
    return f;
}

}  // namespace

TEST_CASE("mid-pass response peaks on a centered bump") {
    const int n = 128;
    const CircularMask m = CircularMask::standard(n, n);
    for (double sigma : {8.0, 10.0, 20.0}) {
        const MidpassImage u = midpass_filter(bump_frame(n, 63, 63, 80.0, sigma), 7.0, 30.0, m);
        int br = 0, bc = 0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (u.u(r, c) > u.u(br, bc)) br = r, bc = c;
        CHECK(std::hypot(br - 63, bc - 63) <= 2.0);
        CHECK(u.u(br, bc) > 0.0);
    }
}

TEST_CASE("mid-pass output is non-negative and zero outside the mask") {
    std::mt19937_64 rng(12);
    const CircularMask m = CircularMask::standard(64, 64);
    const MidpassImage u = midpass_filter(testing::random_frame(rng, 64, 64, 50, 200), 7.0, 30.0, m);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) {
            CHECK(u.u(r, c) >= 0.0);
            if (!m.contains(r, c)) CHECK(u.u(r, c) == 0.0);
        }
    // A constant frame has no mid-pass response.
    for (double v : midpass_filter(Frame(64, 64, 120.0), 7.0, 30.0, m).u.pixels()) CHECK(v == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("mid-pass is invariant under intensity scaling") {
    std::mt19937_64 rng(13);
    const CircularMask m = CircularMask::standard(64, 64);
    const Frame f = testing::random_frame(rng, 64, 64, 20, 230);
    const MidpassImage u = midpass_filter(f, 7.0, 30.0, m);
    for (double alpha : {0.5, 2.0, 10.0}) {
        Frame g = f;
        for (double& v : g.pixels()) v *= alpha;
        const MidpassImage ua = midpass_filter(g, 7.0, 30.0, m);
        double err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(ua.u.pixels()[i] - u.u.pixels()[i]));
        CHECK(err <= 1e-9);
    }
}

TEST_CASE("mid-pass parameters are validated") {
    const CircularMask m = CircularMask::standard(32, 32);
    CHECK_THROWS_AS(midpass_filter(Frame(32, 32), 30.0, 7.0, m), ParameterError);
    CHECK_THROWS_AS(midpass_filter(Frame(32, 32), 0.5, 7.0, m), ParameterError);
    CHECK_THROWS_AS(midpass_filter(Frame(32, 40), 7.0, 30.0, m), DimensionError);
}

TEST_CASE("threshold is half the maximum clamped to [M_L, M_U]") {
    CHECK(segmentation_threshold(0.5, 0.11, 0.16) == doctest::Approx(0.16));
    CHECK(segmentation_threshold(0.10, 0.11, 0.16) == doctest::Approx(0.11));
    CHECK(segmentation_threshold(0.28, 0.11, 0.16) == doctest::Approx(0.14));
    CHECK(segmentation_threshold(0.0, 0.11, 0.16) == doctest::Approx(0.11));
    CHECK_THROWS_AS(segmentation_threshold(0.3, 0.16, 0.11), ParameterError);
    CHECK_THROWS_AS(segmentation_threshold(0.3, 0.0, 0.11), ParameterError);
}

TEST_CASE("binary segmentation is inclusive at the threshold") {
    MidpassImage u{Frame(8, 8)};
    u.u(1, 1) = 0.14;
    u.u(2, 2) = 0.1399999;
    u.u(3, 3) = 0.5;
    const BinaryImage s = binary_segment(u, 0.14);
    CHECK(s(1, 1) == 1);
    CHECK(s(2, 2) == 0);
    CHECK(s(3, 3) == 1);
    CHECK(s.count() == 2);
    CHECK_THROWS_AS(binary_segment(u, 0.0), ParameterError);
}

TEST_CASE("components match breadth-first flood fill") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const double density = testing::uniform(rng, 0.1, 0.7);
        const BinaryImage b = testing::random_binary(rng, 32, 32, density);
        CHECK(testing::as_sets(connected_components(b)) == testing::flood_fill_components(b, true));
        CHECK(testing::as_sets(connected_components(b, Connectivity::Four)) == testing::flood_fill_components(b, false));
    }
}

TEST_CASE("component order and pixel order") {
    BinaryImage b(8, 8);
    // A diagonal chain is one 8-connected component but three 4-connected ones.
    b(5, 1) = 1;
    b(4, 2) = 1;
    b(3, 3) = 1;
    b(0, 6) = 1;
    b(0, 7) = 1;
    const auto eight = connected_components(b);
    REQUIRE(eight.size() == 2);
    CHECK(eight[0] == Component{{0, 6}, {0, 7}});
    CHECK(eight[1] == Component{{3, 3}, {4, 2}, {5, 1}});
    CHECK(connected_components(b, Connectivity::Four).size() == 4);
    CHECK(connected_components(BinaryImage(8, 8)).empty());

    // A U shape whose arms merge late keeps a single label.
    BinaryImage u(8, 8);
    for (int r = 0; r < 5; ++r) u(r, 1) = u(r, 5) = 1;
    for (int c = 1; c <= 5; ++c) u(5, c) = 1;
    const auto cu = connected_components(u);
    REQUIRE(cu.size() == 1);
    CHECK(cu[0].size() == 15);
    CHECK(std::is_sorted(cu[0].begin(), cu[0].end()));
}

TEST_CASE("segment combines threshold, binary image and labeling") {
    MidpassImage u{Frame(16, 16)};
    for (int r = 2; r < 5; ++r)
        for (int c = 2; c < 5; ++c) u.u(r, c) = 0.4;
    u.u(10, 10) = 0.2;
    const Segmentation s = segment(u, 0.11, 0.16);
    CHECK(s.theta == doctest::Approx(0.16));
    CHECK(s.s.count() == 10);
    CHECK(s.components.size() == 2);
}
