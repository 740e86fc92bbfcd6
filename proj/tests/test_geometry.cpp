#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "polypdet/error.hpp"
#include "polypdet/geometry.hpp"
#include "support.hpp"

using namespace polypdet;

namespace {

Component rectangle(int r0, int c0, int h, int w) {
    Component out;
    for (int r = r0; r < r0 + h; ++r)
        for (int c = c0; c < c0 + w; ++c) out.push_back({r, c});
    return out;
}

}  // namespace

TEST_CASE("3x5 rectangle has inertia [[10,0],[0,30]] and eccentricity 3") {
    const Component rect = rectangle(10, 20, 3, 5);
    CHECK(feature_size(rect) == 15);
    const Point2 c = center_of_mass(rect);
    CHECK(c.x == 23.0);  // cols 20..24 -> x 21..25
    CHECK(c.y == 12.0);
    const InertiaTensor t = inertia_tensor(rect);
    CHECK(t.a00 == 10.0);
    CHECK(t.a01 == 0.0);
    CHECK(t.a11 == 30.0);
    const Eigenvalues ev = eigenvalues(t);
    CHECK(ev.max == 30.0);
    CHECK(ev.min == 10.0);
    CHECK(eccentricity(t) == 3.0);
}

TEST_CASE("a single pixel has a zero tensor and infinite eccentricity") {
    const Component one{{4, 9}};
    const InertiaTensor t = inertia_tensor(one);
    CHECK(t == InertiaTensor{0.0, 0.0, 0.0});
    CHECK(eccentricity(t) == kInfiniteEccentricity);
    CHECK(center_of_mass(one) == Point2{10.0, 5.0});
}

TEST_CASE("a straight line is degenerate") {
    CHECK(eccentricity(inertia_tensor(rectangle(0, 0, 1, 9))) == kInfiniteEccentricity);
    Component diag;
    for (int k = 0; k < 7; ++k) diag.push_back({k, k});
    const InertiaTensor t = inertia_tensor(diag);
    CHECK(t.a01 < 0.0);  // x and y grow together, off-diagonal is -sum xy
    CHECK(eccentricity(t) == kInfiniteEccentricity);
}

TEST_CASE("empty features violate the contract") {
    CHECK_THROWS_AS(feature_size({}), ContractViolation);
    CHECK_THROWS_AS(center_of_mass({}), ContractViolation);
    CHECK_THROWS_AS(inertia_tensor({}), ContractViolation);
}

TEST_CASE("moments agree exactly with double-loop sums on random blobs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const int target = 2 + static_cast<int>(rng() % 400);
        const BinaryImage blob = testing::random_blob(rng, 48, 48, target);
        const Component pix = testing::pixels_of(blob);
        const testing::BruteMoments ref = testing::brute_moments(blob);
        CHECK(feature_size(pix) == ref.size);
        CHECK(center_of_mass(pix) == ref.centroid);
        const InertiaTensor t = inertia_tensor(pix);
        CHECK(t == ref.inertia);
        const double e = eccentricity(t);
        const double e_ref = testing::brute_eccentricity(ref.inertia);
        if (std::isinf(e_ref)) {
            CHECK(std::isinf(e));
        } else {
            CHECK(e == doctest::Approx(e_ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("moments do not depend on pixel order") {
    std::mt19937_64 rng(32);
    Component pix = testing::pixels_of(testing::random_blob(rng, 40, 40, 150));
    const InertiaTensor t = inertia_tensor(pix);
    std::shuffle(pix.begin(), pix.end(), rng);
    CHECK(inertia_tensor(pix) == t);
}

TEST_CASE("criteria validation") {
    CHECK_THROWS_AS((GeometricCriteria{10, 5, 6.5}.validate()), ParameterError);
    CHECK_THROWS_AS((GeometricCriteria{0, 5, 6.5}.validate()), ParameterError);
    CHECK_THROWS_AS((GeometricCriteria{1, 5, 0.5}.validate()), ParameterError);
}

TEST_CASE("size test runs first; eccentricity only for size-passers") {
    std::vector<Component> comps{rectangle(0, 0, 3, 5), rectangle(10, 0, 1, 40), rectangle(20, 0, 6, 6),
                                 rectangle(30, 0, 2, 2)};
    const GeometricCriteria crit{9, 100, 6.5};
    const std::vector<Feature> fs = analyze_features(comps, crit);
    REQUIRE(fs.size() == 4);
    CHECK(fs[0].index == 1);
    CHECK(fs[0].kept());
    CHECK(fs[1].passes_size);
    CHECK_FALSE(fs[1].passes_eccentricity);  // a line
    CHECK(fs[2].kept());
    CHECK_FALSE(fs[3].passes_size);
    CHECK_FALSE(fs[3].moments.has_value());
    CHECK(geometric_filter(fs) == std::vector<std::size_t>{0, 2});

    // Boundaries are inclusive.
    std::vector<Feature> again = fs;
    CHECK(geometric_filter(again, GeometricCriteria{15, 36, 3.0}) == std::vector<std::size_t>{0, 2});
    CHECK(geometric_filter(again, GeometricCriteria{16, 36, 3.0}) == std::vector<std::size_t>{2});
    CHECK(geometric_filter(again, GeometricCriteria{15, 36, 2.99}) == std::vector<std::size_t>{2});
}

TEST_CASE("ellipse of inertia encloses the feature's area") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const Component pix = testing::pixels_of(testing::random_blob(rng, 60, 60, 100 + trial * 20));
        const InertiaTensor t = inertia_tensor(pix);
        if (std::isinf(eccentricity(t))) continue;
        const auto pts = ellipse_of_inertia(t, static_cast<double>(pix.size()), center_of_mass(pix), 720);
        CHECK(testing::polygon_area(pts) == doctest::Approx(static_cast<double>(pix.size())).epsilon(1e-4));
        double mx = 0.0, my = 0.0;
        for (const Point2& p : pts) mx += p.x, my += p.y;
        CHECK(mx / pts.size() == doctest::Approx(center_of_mass(pix).x));
        CHECK(my / pts.size() == doctest::Approx(center_of_mass(pix).y));
    }
}

TEST_CASE("ellipse axes follow the columns of the tensor") {
    // Diagonal tensor: x extent scales with a00, y extent with a11.
    const Component rect = rectangle(0, 0, 3, 5);
    const auto pts = ellipse_of_inertia(inertia_tensor(rect), 15.0, center_of_mass(rect), 4);
    const double k = std::sqrt(15.0 / (std::numbers::pi * 300.0));
    CHECK(pts[0].x - 3.0 == doctest::Approx(10.0 * k));
    CHECK(pts[1].y - 2.0 == doctest::Approx(30.0 * k));
}

TEST_CASE("degenerate ellipses are refused") {
    CHECK_THROWS_AS(ellipse_of_inertia(inertia_tensor(rectangle(0, 0, 1, 9)), 9, {5, 1}, 36), ContractViolation);
    Feature f;
    f.pixels = rectangle(0, 0, 3, 3);
    f.size = 9;
    CHECK_THROWS_AS(ellipse_of_inertia(f, 36), ContractViolation);
}
