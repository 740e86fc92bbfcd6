#pragma once

// Ratio-of-Gaussians mid-pass filter, clamped half-max threshold, binary
// segmentation and connected-component decomposition.

#include <vector>

#include "polypdet/frame.hpp"

namespace polypdet {

/// Floor applied to the wide-Gaussian denominator of the mid-pass ratio.
inline constexpr double kMidpassDenominatorFloor = 1e-3;

/// u = max(G_sigma1 f / G_sigma2 f - 1, 0), zero outside the mask.
struct MidpassImage {
    Frame u;
};

struct Pixel {
    int row;
    int col;
    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// One connected component; pixels are listed in row-major order.
using Component = std::vector<Pixel>;

enum class Connectivity { Four = 4, Eight = 8 };
inline constexpr Connectivity kDefaultConnectivity = Connectivity::Eight;

struct Segmentation {
    BinaryImage s;
    double theta = 0.0;
    std::vector<Component> components;
};

/// Throws ParameterError unless 1 <= sigma1 < sigma2.
MidpassImage midpass_filter(const Frame& f, double sigma1, double sigma2, const CircularMask& m);

/// max(min(max(u)/2, M_U), M_L). Throws ParameterError unless 0 < M_L < M_U.
double segmentation_threshold(const MidpassImage& u, double m_low, double m_high);
double segmentation_threshold(double u_max, double m_low, double m_high);

/// s_ij = 1 iff u_ij >= theta. Throws ParameterError unless theta > 0.
BinaryImage binary_segment(const MidpassImage& u, double theta);

/// Two-pass union-find labeling. Components are numbered by the first pixel
/// met in a row-major scan.
std::vector<Component> connected_components(const BinaryImage& s,
                                            Connectivity conn = kDefaultConnectivity);

/// Threshold, segment and label in one step.
Segmentation segment(const MidpassImage& u, double m_low, double m_high,
                     Connectivity conn = kDefaultConnectivity);

}  // namespace polypdet
