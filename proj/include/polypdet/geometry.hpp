#pragma once

// Per-feature moments (size, center of mass, tensor of inertia), the
// eigenvalue-ratio eccentricity, the size/eccentricity filter and the
// ellipse of inertia used for overlays.
//
// Coordinates are 1-based: x = col + 1, y = row + 1.

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "polypdet/midpass.hpp"

namespace polypdet {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Symmetric 2x2 tensor [[yy, -xy], [-xy, xx]] built from centered
/// coordinate sums: yy = sum y^2, xx = sum x^2, xy = sum x*y.
struct InertiaTensor {
    double a00 = 0.0;  // sum yhat^2
    double a01 = 0.0;  // -sum xhat*yhat
    double a11 = 0.0;  // sum xhat^2
    friend bool operator==(const InertiaTensor&, const InertiaTensor&) = default;
};

struct Eigenvalues {
    double max = 0.0;
    double min = 0.0;
    friend bool operator==(const Eigenvalues&, const Eigenvalues&) = default;
};

inline constexpr double kInfiniteEccentricity = std::numeric_limits<double>::infinity();
/// lambda_min counts as zero when it is at most this fraction of lambda_max.
inline constexpr double kEigenvalueZeroTolerance = 1e-9;

std::size_t feature_size(const Component& pixels);
Point2 center_of_mass(const Component& pixels);
/// Exact integer moment sums divided by the size once.
InertiaTensor inertia_tensor(const Component& pixels);
Eigenvalues eigenvalues(const InertiaTensor& t);
/// lambda_max / lambda_min, or infinity for degenerate (line or point) tensors.
double eccentricity(const InertiaTensor& t);

struct FeatureMoments {
    Point2 centroid;
    InertiaTensor inertia;
    Eigenvalues lambda;
    double eccentricity = kInfiniteEccentricity;
    friend bool operator==(const FeatureMoments&, const FeatureMoments&) = default;
};

struct Feature {
    int index = 0;  // 1-based, in labeling order
    Component pixels;
    std::size_t size = 0;
    bool passes_size = false;
    // Only computed for features that pass the size test.
    std::optional<FeatureMoments> moments;
    bool passes_eccentricity = false;

    bool kept() const noexcept { return passes_size && passes_eccentricity; }
};

struct GeometricCriteria {
    double size_low;
    double size_high;
    double max_eccentricity;

    /// Throws ParameterError unless 0 < size_low < size_high and max_eccentricity >= 1.
    void validate() const;
};

/// Builds features from components; size first, moments for size-passers.
std::vector<Feature> analyze_features(std::vector<Component> components, const GeometricCriteria& criteria);

/// 0-based positions into `features` of those satisfying both criteria.
std::vector<std::size_t> geometric_filter(const std::vector<Feature>& features);
std::vector<std::size_t> geometric_filter(std::vector<Feature>& features, const GeometricCriteria& criteria);

/// n_samples points of sqrt(S / (pi lmax lmin)) * I * (cos t, sin t) + c.
/// Throws ContractViolation when the feature has no moments or lambda_min = 0.
std::vector<Point2> ellipse_of_inertia(const Feature& feature, int n_samples);
std::vector<Point2> ellipse_of_inertia(const InertiaTensor& inertia, double size, Point2 centroid, int n_samples);

}  // namespace polypdet
