#pragma once

// Synthetic capsule-endoscopy-like frames with ground truth: smooth mucosa
// under radial vignetting, elongated folds, an optional round textured
// polyp, bubble clusters and sensor noise inside a circular field of view.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "polypdet/eval.hpp"
#include "polypdet/frame.hpp"
#include "polypdet/geometry.hpp"
#include "polypdet/image_io.hpp"

namespace polypdet {

/// mt19937_64 with locally defined uniform and normal draws, so sequences
/// do not depend on the standard library vendor.
class PhantomRng {
public:
    explicit PhantomRng(std::uint64_t seed);
    std::uint64_t next();
    double uniform();                  // [0, 1)
    double uniform(double lo, double hi);
    double normal();                   // standard normal, Box-Muller
    int integer(int lo, int hi);       // inclusive bounds

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Mixes a base seed with an index; used to give every frame its own stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct PolypSpec {
    Point2 center;            // 1-based (x, y)
    double radius = 40.0;     // pixels
    double amplitude = 70.0;  // dome height on the base intensity scale
    double texture = 0.08;    // relative speckle amplitude on the dome
};

struct PhantomSpec {
    int nx = 256;
    int ny = 256;
    double base = 150.0;
    // Gain g = 1 + c0 rho^2 + c1 rho^4 + c2 rho^6, rho relative to the field of view.
    std::array<double, 3> vignetting{-0.5, 0.1, 0.0};
    int n_folds = 0;
    double fold_amplitude = 60.0;
    double fold_width = 4.0;    // Gaussian cross-section sigma
    double fold_length = 150.0;
    // Soft untextured mucosal lumps, placed at random inside the field of view.
    int n_lumps = 0;
    double lump_amplitude = 30.0;
    double lump_radius = 16.0;
    std::optional<PolypSpec> polyp;
    bool detectable_polyp = false;  // require radius within [N_x/15, N_x/4.5]
    double bubble_coverage = 0.0;   // expected bubble area / field-of-view area
    double mucosa_texture = 0.0;    // relative speckle amplitude everywhere
    double noise = 1.5;
    std::array<double, 3> tint{1.0, 0.75, 0.6};
    std::uint64_t seed = 0;

    /// Field-of-view radius, 0.45 N_x.
    double fov_radius() const { return 0.45 * nx; }
    /// Throws SpecError.
    void validate() const;
};

struct GroundTruth {
    Label label = Label::Normal;
    std::optional<Point2> center;
    std::optional<double> radius;
    BinaryImage mask;  // polyp disc
};

struct PhantomFrame {
    RgbImage image;  // integer-valued samples in [0,255]
    GroundTruth truth;
};

/// Deterministic in the spec (including its seed). Throws SpecError when
/// the spec is invalid or the polyp disc leaves the field of view.
PhantomFrame generate_frame(const PhantomSpec& spec);

enum class SceneKind { Flat, Folds, Bubbles, Textured, Polyp };
std::string to_string(SceneKind kind);

// Frozen scene presets used by the dataset generator.
PhantomSpec scene_preset(SceneKind kind, int nx, int ny, std::uint64_t seed);

struct DatasetSpec {
    int n_sequences = 16;
    int frames_per_sequence = 10;
    int n_normal = 400;
    int n_patients = 8;
    int nx = 256;
    int ny = 256;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct GeneratedFrame {
    FrameRecord record;
    SceneKind kind = SceneKind::Flat;
    std::optional<double> polyp_radius;
    std::optional<Point2> polyp_center;
};

/// Writes PNG images, manifest.csv and scenes.csv into `dir`. Polyp
/// sequences move from far (small radius) to near (large radius) with the
/// nearest radius at least twice the farthest. Throws SpecError on bad
/// counts and IoError when `dir` is not writable.
std::vector<GeneratedFrame> generate_dataset(const DatasetSpec& spec, const std::filesystem::path& dir);

/// Frame list and per-frame specs without rendering; record paths are
/// relative (frames/<id>.png).
std::vector<std::pair<GeneratedFrame, PhantomSpec>> plan_dataset(const DatasetSpec& spec);

}  // namespace polypdet
