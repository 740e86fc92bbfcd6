#pragma once

// Intensity normalization and radial extrapolation outside the field of view.

#include <array>

#include "polypdet/frame.hpp"

namespace polypdet {

/// Radial illumination gain g(rho) = exp(a1 rho^2 + a2 rho^4 + a3 rho^6),
/// rho = distance from the mask center divided by the mask radius.
/// g(0) = 1 and evaluation is floored at kMinGain.
struct RadialGainModel {
    static constexpr double kMinGain = 0.05;
    std::array<double, 3> coeffs{0.0, 0.0, 0.0};

    double operator()(double rho) const noexcept;
};

struct VignettingResult {
    Frame frame;
    RadialGainModel gain;
    bool degenerate = false;  // fit failed; frame returned unchanged
};

/// Interface for pluggable intensity normalization.
class IntensityNormalizer {
public:
    virtual ~IntensityNormalizer() = default;
    virtual VignettingResult normalize(const Frame& f, const CircularMask& m) const = 0;
};

/// Least-squares fit of log intensity against even powers of rho inside the
/// mask (darkest 5% excluded), followed by division by the fitted gain and a
/// rescale that preserves the masked mean.
class RadialGainNormalizer final : public IntensityNormalizer {
public:
    VignettingResult normalize(const Frame& f, const CircularMask& m) const override;
};

VignettingResult correct_vignetting(const Frame& f, const CircularMask& m);

/// Unit radial direction (row component, col component) at a pixel.
struct RadialVector {
    double dy;
    double dx;
};

/// r_ij for a pixel; the zero vector at the exact center.
RadialVector radial_unit(int r, int c, int rows, int cols) noexcept;

/// Fills pixels outside the mask by solving the first-order upwind
/// discretization of grad(f) . r = 1, sweeping outward by distance.
/// Pixels inside the mask are returned unchanged.
Frame extrapolate_radial(const Frame& f, const CircularMask& m);

/// Upwind residual |grad(f) . r - 1| at an exterior pixel, using the same
/// neighbor selection as extrapolate_radial.
double upwind_residual(const Frame& f, int r, int c);

}  // namespace polypdet
