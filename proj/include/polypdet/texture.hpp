#pragma once

// Cartoon + texture decomposition and the texture peak used for
// frame pre-selection.

#include "polypdet/frame.hpp"

namespace polypdet {

struct TextureDecomposition {
    Frame cartoon;
    Frame texture;  // input - cartoon
};

/// Ramp knots of the blend weight as a function of the relative local
/// total-variation reduction: weight 0 at or below `low`, 1 at or above `high`.
struct DecompositionKnots {
    double low = 0.25;
    double high = 0.5;
};

/// Nonlinear low-pass/high-pass split. The low-pass operator is
/// L = I - (I - G)^n_iter with G a Gaussian of width sigma_t; each pixel is
/// blended between f and L f according to how much L reduces the local
/// total variation there.
TextureDecomposition decompose_cartoon_texture(const Frame& f, double sigma_t, int n_iter,
                                               DecompositionKnots knots = {});

struct TexturePeak {
    Frame transformed;  // T, zero outside the mask
    double t_max = 0.0;
};

/// T = G_sigma * |t|^p, masked to zero outside `m`; t_max is the maximum of T.
TexturePeak texture_transform(const Frame& texture, double sigma, double p, const CircularMask& m);

/// T_L <= t_max <= T_U. Throws ParameterError unless t_low < t_high.
bool preselect(double t_max, double t_low, double t_high);

}  // namespace polypdet
