#pragma once

// Evaluation harness: manifest ingestion, cached scoring, per-frame and
// per-polyp ROC curves, threshold calibration on a training subset,
// per-patient false positives, and the +10% parameter robustness study.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polypdet/classifier.hpp"
#include "polypdet/params.hpp"

namespace polypdet {

struct FrameRecord {
    std::string frame_id;
    std::filesystem::path path;
    Label truth = Label::Normal;
    std::string patient;
    std::string sequence;  // empty for normal frames
};

/// Parses `frame_id,path,label,patient,sequence` CSV text. Relative image
/// paths are resolved against `base_dir`. Throws ParseError (with line
/// number) on malformed rows and ValidationError on duplicate ids or polyp
/// rows without a sequence.
std::vector<FrameRecord> parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
std::vector<FrameRecord> load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<FrameRecord>& records);

/// One scored frame; r_max is the integer decision parameter.
struct Score {
    std::string frame_id;
    int r_max = 0;
    Label truth = Label::Normal;
    std::string patient;
    std::string sequence;
};

struct FailedFrame {
    std::string frame_id;
    std::string reason;
};

struct ScoreTable {
    std::vector<Score> scores;          // record order, failures excluded
    std::vector<FailedFrame> failures;  // record order
    std::vector<FrameDecision> decisions;
    std::size_t computed = 0;  // frames run through the pipeline this call
    std::size_t reused = 0;    // frames taken from the cache
};

struct ScoreOptions {
    std::optional<std::filesystem::path> cache;
    unsigned threads = 1;
};

/// Scores every record. With a cache path, entries whose params hash
/// matches are reused and the refreshed cache is written after all frames
/// are done. Results do not depend on the thread count.
ScoreTable score_dataset(const std::vector<FrameRecord>& records, const PipelineParams& params,
                         const ScoreOptions& options = {});

/// Cache file: a header line {"format", "params_hash"} then one decision per line.
void write_score_cache(const std::filesystem::path& path, const PipelineParams& params,
                       const std::vector<FrameDecision>& decisions);
/// Empty when the file is absent or its hash does not match.
std::vector<FrameDecision> read_score_cache(const std::filesystem::path& path, const PipelineParams& params);

// ---------------------------------------------------------------------------
// Metrics. Rates are fractions in [0,1]; SPEC/SENS helpers return percent.

struct RocPoint {
    int r_p = 0;
    double fpr = 0.0;
    double tpr = 0.0;
};

enum class RocBasis { PerFrame, PerPolyp };
std::string to_string(RocBasis basis);

struct RocCurve {
    RocBasis basis = RocBasis::PerFrame;
    std::vector<RocPoint> points;  // increasing R_P
    std::size_t n_positive = 0;    // polyp frames, or sequences for per-polyp
    std::size_t n_negative = 0;

    /// Trapezoidal area over the realized points closed by (0,0) and (1,1).
    double auc() const;
    /// Trapezoidal area over the realized points and (0,0) only.
    double partial_auc() const;
};

/// Points for R_P = 1 .. max score + 1. Throws MetricError unless both
/// classes are present.
RocCurve roc_per_frame(const std::vector<Score>& scores);
/// TPR from per-sequence detection flags, FPR per frame. Throws
/// MetricError when no sequences (or no normal frames) are present.
RocCurve roc_per_polyp(const std::vector<Score>& scores);

double specificity(const std::vector<Score>& scores, int r_p);
double sensitivity_per_frame(const std::vector<Score>& scores, int r_p);
double sensitivity_per_polyp(const std::vector<Score>& scores, int r_p);
/// Detection flag per sequence, in order of first appearance.
std::vector<std::pair<std::string, bool>> detection_flags(const std::vector<Score>& scores, int r_p);

/// Smallest integer R_P >= 1 whose specificity on `training` is at least
/// target_spec percent. Throws MetricError without normal frames and
/// CalibrationError when the target cannot be met.
int select_threshold(const std::vector<Score>& training, double target_spec);

struct PatientRow {
    std::string patient;
    std::size_t n_normal = 0;
    std::size_t false_positives = 0;
    double fpr = 0.0;  // fraction
};

struct PatientTable {
    std::vector<PatientRow> rows;  // patients in natural order
    PatientRow total;
};

PatientTable per_patient_false_positives(const std::vector<Score>& scores, int r_p);

/// |pert - base| / base * 100. Throws DomainError when base <= 0.
double delta_metric(double base, double pert);

// ---------------------------------------------------------------------------
// Robustness study

struct MetricSet {
    double spec = 0.0;        // percent
    double sens_frame = 0.0;  // percent
    double sens_polyp = 0.0;  // percent
};

struct SensitivityRow {
    std::string parameter;
    double base_value = 0.0;
    double perturbed_value = 0.0;
    MetricSet perturbed;
    // Empty when the base metric is zero (relative change undefined).
    std::optional<double> delta_spec;
    std::optional<double> delta_sens_frame;
    std::optional<double> delta_sens_polyp;
};

struct SensitivityReport {
    int r_p = 0;
    std::size_t n_polyp_frames = 0;
    std::size_t n_normal_frames = 0;
    MetricSet base;
    std::vector<SensitivityRow> rows;
};

/// The geometric-stage parameters perturbed by default.
const std::vector<std::string>& default_sensitivity_parameters();

/// All polyp records plus the first `max_normals` normal records, in manifest order.
std::vector<FrameRecord> reduced_dataset(const std::vector<FrameRecord>& records, std::size_t max_normals);

struct SensitivityOptions {
    std::size_t max_normals = 4000;
    unsigned threads = 1;
};

/// Rescores the reduced dataset once per parameter with only that
/// parameter raised by 10% (integer parameters rounded up) and reports
/// the relative changes at the fixed R_P of `base`.
SensitivityReport sensitivity_study(const std::vector<FrameRecord>& records, const PipelineParams& base,
                                    const std::vector<std::string>& parameters,
                                    const SensitivityOptions& options = {});

// ---------------------------------------------------------------------------
// Full evaluation and reports

struct EvalOptions {
    std::vector<std::string> train_patients;  // empty: the whole dataset trains
    double target_spec = 90.0;
    ScoreOptions scoring;
};

struct EvalReport {
    std::size_t n_frames = 0;
    std::size_t n_polyp = 0;
    std::size_t n_normal = 0;
    std::size_t n_sequences = 0;
    std::vector<std::string> train_patients;
    double target_spec = 0.0;
    int chosen_r_p = 0;
    double training_spec = 0.0;
    MetricSet operating_point;
    std::vector<std::pair<std::string, bool>> flags;
    RocCurve roc_frame;
    RocCurve roc_polyp;
    PatientTable patients;
    std::vector<FailedFrame> failures;
    std::optional<SensitivityReport> sensitivity;
};

/// Scores the dataset, calibrates R_P on the training patients and
/// evaluates the whole dataset at that threshold.
EvalReport evaluate_dataset(const std::vector<FrameRecord>& records, const PipelineParams& params,
                            const EvalOptions& options);
EvalReport evaluate_scores(const ScoreTable& table, const EvalOptions& options);

nlohmann::json to_json(const RocCurve& curve);
nlohmann::json to_json(const PatientTable& table);
nlohmann::json to_json(const SensitivityReport& report);
nlohmann::json to_json(const EvalReport& report);

std::string roc_csv(const RocCurve& curve);
/// Both curves, the no-discrimination diagonal, and the operating points.
std::string roc_svg(const RocCurve& per_frame, const RocCurve& per_polyp, int marked_r_p);

/// Writes report.json, roc_frame.csv, roc_polyp.csv and roc.svg into `dir`.
void write_reports(const std::filesystem::path& dir, const EvalReport& report);

}  // namespace polypdet
