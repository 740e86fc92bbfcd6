#pragma once

// Best-fit ball radius, the decision parameter R_max, the threshold
// classifier and the end-to-end per-frame pipeline.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polypdet/frame.hpp"
#include "polypdet/geometry.hpp"
#include "polypdet/image_io.hpp"
#include "polypdet/midpass.hpp"
#include "polypdet/params.hpp"

namespace polypdet {

struct WeightedCentroid {
    Point2 center;
    double mass = 0.0;      // U = sum of u over the feature
    bool unweighted = false; // U was zero; plain centroid used instead
    friend bool operator==(const WeightedCentroid&, const WeightedCentroid&) = default;
};

/// u-weighted mean of (x, y) over the feature's pixels.
WeightedCentroid weighted_centroid(const MidpassImage& u, const Component& pixels);

/// Clipped paraboloid cap max(R^2 - (i - cy)^2 - (j - cx)^2, 0) / N_x^2 on
/// a rows x cols grid (N_x = cols). Throws ParameterError when R < 1.
Frame ball_surface(double radius, Point2 center, int rows, int cols);

struct BallFit {
    int feature_index = 0;  // 1-based, matches Feature::index
    WeightedCentroid centroid;
    int r_opt = 0;
    double objective = 0.0;  // Frobenius distance over the mask at r_opt
    friend bool operator==(const BallFit&, const BallFit&) = default;
};

/// Exhaustive scan over integer R in [1, floor(N_x / 3)], minimizing the
/// masked Frobenius distance between u and the ball surface; the smallest
/// R wins ties.
BallFit fit_ball_radius(const MidpassImage& u, const WeightedCentroid& center, const CircularMask& m);

/// Objective value for one radius (exposed for optimality checks).
double ball_objective(const MidpassImage& u, Point2 center, int radius, const CircularMask& m);

/// Largest r_opt, or 0 for an empty list.
int decision_radius(const std::vector<BallFit>& fits);

enum class Label { Normal, Polyp };
std::string to_string(Label label);

/// Polyp iff r_max >= r_p. Throws ParameterError when r_p <= 0.
Label classify(int r_max, int r_p);

enum class ExitStage { Preselect, Geometry, Classifier };
std::string to_string(ExitStage stage);

/// Per-feature summary kept in a decision.
struct FeatureRecord {
    int index = 0;
    std::size_t size = 0;
    bool passes_size = false;
    bool passes_eccentricity = false;
    std::optional<FeatureMoments> moments;
    std::optional<BallFit> ball;
    friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

struct FrameDecision {
    std::string frame_id;
    double t_max = 0.0;
    bool preselect = false;
    std::optional<double> theta;
    int n_components = 0;
    std::vector<FeatureRecord> features;
    int r_max = 0;
    int r_p = 0;
    Label label = Label::Normal;
    ExitStage exit_stage = ExitStage::Preselect;
    bool vignetting_degenerate = false;

    /// Index into `features` of the feature whose ball gave r_max.
    std::optional<std::size_t> winning_feature() const;

    friend bool operator==(const FrameDecision&, const FrameDecision&) = default;
};

/// Intermediate images, filled when requested.
struct FrameTrace {
    Frame gray;
    Frame preprocessed;
    Frame texture;
    Frame texture_transform;
    MidpassImage midpass;
    Segmentation segmentation;
};

/// Vignetting correction then radial extrapolation outside the mask.
Frame preprocess_frame(const Frame& gray, const PipelineParams& params, bool* degenerate = nullptr);

/// Mid-pass through classification on a pre-processed frame, as if the
/// frame had passed pre-selection.
FrameDecision analyze_geometry(const Frame& preprocessed, const PipelineParams& params, FrameTrace* trace = nullptr);

/// Texture pre-selection followed by analyze_geometry.
FrameDecision analyze_preprocessed(const Frame& preprocessed, const PipelineParams& params,
                                   FrameTrace* trace = nullptr);

/// Full pipeline on a decoded image. Throws InputError when the image does
/// not match the parameter dimensions.
FrameDecision process_frame(const RgbImage& image, const PipelineParams& params, FrameTrace* trace = nullptr);

/// Decodes and processes an image file.
FrameDecision process_image_file(const std::filesystem::path& path, const PipelineParams& params,
                                 FrameTrace* trace = nullptr);

void to_json(nlohmann::json& j, const FrameDecision& d);
void from_json(const nlohmann::json& j, FrameDecision& d);

}  // namespace polypdet
