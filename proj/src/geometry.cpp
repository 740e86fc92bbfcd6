#include "polypdet/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#include "polypdet/error.hpp"

namespace polypdet {

namespace {

struct RawMoments {
    std::int64_t n = 0;
    std::int64_t sx = 0;
    std::int64_t sy = 0;
    std::int64_t sxx = 0;
    std::int64_t syy = 0;
    std::int64_t sxy = 0;
};

RawMoments raw_moments(const Component& pixels) {
    RawMoments m;
    for (const Pixel& p : pixels) {
        const std::int64_t x = p.col + 1;
        const std::int64_t y = p.row + 1;
        ++m.n;
        m.sx += x;
        m.sy += y;
        m.sxx += x * x;
        m.syy += y * y;
        m.sxy += x * y;
    }
    return m;
}

void require_nonempty(const Component& pixels) {
    if (pixels.empty()) throw ContractViolation("feature pixel set is empty");
}

}  // namespace

std::size_t feature_size(const Component& pixels) {
    require_nonempty(pixels);
    return pixels.size();
}

Point2 center_of_mass(const Component& pixels) {
    require_nonempty(pixels);
    const RawMoments m = raw_moments(pixels);
    const auto n = static_cast<double>(m.n);
    return {static_cast<double>(m.sx) / n, static_cast<double>(m.sy) / n};
}

InertiaTensor inertia_tensor(const Component& pixels) {
    require_nonempty(pixels);
    const RawMoments m = raw_moments(pixels);
    // n * sum(yhat^2) = n * sum(y^2) - (sum y)^2, exact in integers.
    const std::int64_t cyy = m.n * m.syy - m.sy * m.sy;
    const std::int64_t cxx = m.n * m.sxx - m.sx * m.sx;
    const std::int64_t cxy = m.n * m.sxy - m.sx * m.sy;
    const auto n = static_cast<double>(m.n);
    InertiaTensor t;
    t.a00 = static_cast<double>(cyy) / n;
    t.a11 = static_cast<double>(cxx) / n;
    t.a01 = cxy == 0 ? 0.0 : -static_cast<double>(cxy) / n;
    return t;
}

Eigenvalues eigenvalues(const InertiaTensor& t) {
    const double mean = 0.5 * (t.a00 + t.a11);
    const double rad = std::hypot(0.5 * (t.a00 - t.a11), t.a01);
    return {mean + rad, mean - rad};
}

double eccentricity(const InertiaTensor& t) {
    const Eigenvalues ev = eigenvalues(t);
    if (!(ev.max > 0.0) || ev.min <= kEigenvalueZeroTolerance * ev.max) return kInfiniteEccentricity;
    return ev.max / ev.min;
}

void GeometricCriteria::validate() const {
    if (!(0.0 < size_low && size_low < size_high)) throw ParameterError("size bounds require 0 < S_L < S_U");
    if (!(max_eccentricity >= 1.0)) throw ParameterError("E_max must be >= 1");
}

std::vector<Feature> analyze_features(std::vector<Component> components, const GeometricCriteria& criteria) {
    criteria.validate();
    std::vector<Feature> features;
    features.reserve(components.size());
    int index = 0;
    for (Component& comp : components) {
        Feature f;
        f.index = ++index;
        f.size = feature_size(comp);
        f.pixels = std::move(comp);
        const auto s = static_cast<double>(f.size);
        f.passes_size = criteria.size_low <= s && s <= criteria.size_high;
        if (f.passes_size) {
            FeatureMoments m;
            m.centroid = center_of_mass(f.pixels);
            m.inertia = inertia_tensor(f.pixels);
            m.lambda = eigenvalues(m.inertia);
            m.eccentricity = eccentricity(m.inertia);
            f.passes_eccentricity = m.eccentricity <= criteria.max_eccentricity;
            f.moments = m;
        }
        features.push_back(std::move(f));
    }
    return features;
}

std::vector<std::size_t> geometric_filter(const std::vector<Feature>& features) {
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < features.size(); ++k)
        if (features[k].kept()) kept.push_back(k);
    return kept;
}

std::vector<std::size_t> geometric_filter(std::vector<Feature>& features, const GeometricCriteria& criteria) {
    criteria.validate();
    for (Feature& f : features) {
        const auto s = static_cast<double>(f.size);
        f.passes_size = criteria.size_low <= s && s <= criteria.size_high;
        f.passes_eccentricity = false;
        if (!f.passes_size) continue;
        if (!f.moments) {
            FeatureMoments m;
            m.centroid = center_of_mass(f.pixels);
            m.inertia = inertia_tensor(f.pixels);
            m.lambda = eigenvalues(m.inertia);
            m.eccentricity = eccentricity(m.inertia);
            f.moments = m;
        }
        f.passes_eccentricity = f.moments->eccentricity <= criteria.max_eccentricity;
    }
    return geometric_filter(features);
}

std::vector<Point2> ellipse_of_inertia(const InertiaTensor& inertia, double size, Point2 centroid, int n_samples) {
    if (n_samples < 3) throw ParameterError("ellipse needs at least 3 samples");
    const Eigenvalues lambda = eigenvalues(inertia);
    if (!(lambda.min > kEigenvalueZeroTolerance * lambda.max)) {
        throw ContractViolation("degenerate feature: lambda_min is zero");
    }
    const double scale = std::sqrt(size / (std::numbers::pi * lambda.max * lambda.min));
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / n_samples;
        const double cs = std::cos(theta);
        const double sn = std::sin(theta);
        pts.push_back({scale * (inertia.a00 * cs + inertia.a01 * sn) + centroid.x,
                       scale * (inertia.a01 * cs + inertia.a11 * sn) + centroid.y});
    }
    return pts;
}

std::vector<Point2> ellipse_of_inertia(const Feature& feature, int n_samples) {
    if (!feature.moments) throw ContractViolation("ellipse requested for a feature without moments");
    return ellipse_of_inertia(feature.moments->inertia, static_cast<double>(feature.size), feature.moments->centroid,
                              n_samples);
}

}  // namespace polypdet
