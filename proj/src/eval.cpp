#include "polypdet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "polypdet/error.hpp"
#include "polypdet/texture.hpp"
#include "parallel.hpp"

namespace polypdet {

using detail::parallel_for;

namespace {

constexpr const char* kCacheFormat = "polypdet-score-cache/1";
constexpr const char* kManifestHeader = "frame_id,path,label,patient,sequence";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.size() - pos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

bool is_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool natural_less(const std::string& a, const std::string& b) {
    if (is_digits(a) && is_digits(b)) {
        const std::string ta = a.substr(std::min(a.find_first_not_of('0'), a.size() - 1));
        const std::string tb = b.substr(std::min(b.find_first_not_of('0'), b.size() - 1));
        if (ta.size() != tb.size()) return ta.size() < tb.size();
        if (ta != tb) return ta < tb;
    }
    return a < b;
}

std::size_t count_if_score(const std::vector<Score>& scores, Label truth, int r_p) {
    return static_cast<std::size_t>(std::count_if(scores.begin(), scores.end(), [&](const Score& s) {
        return s.truth == truth && s.r_max >= r_p;
    }));
}

std::size_t count_truth(const std::vector<Score>& scores, Label truth) {
    return static_cast<std::size_t>(
        std::count_if(scores.begin(), scores.end(), [&](const Score& s) { return s.truth == truth; }));
}

Score score_of(const FrameRecord& rec, int r_max) { return {rec.frame_id, r_max, rec.truth, rec.patient, rec.sequence}; }

double trapezoid(const std::vector<std::pair<double, double>>& pts) {
    double area = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k)
        area += (pts[k].first - pts[k - 1].first) * 0.5 * (pts[k].second + pts[k - 1].second);
    return area;
}

std::vector<std::pair<double, double>> ascending(const RocCurve& c) {
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it) pts.emplace_back(it->fpr, it->tpr);
    return pts;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

std::vector<FrameRecord> parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
    std::vector<FrameRecord> out;
    std::set<std::string> seen;
    bool header_seen = false;
    long lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        ++lineno;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            std::string norm;
            for (char c : line)
                if (c != ' ' && c != '\t') norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            if (norm != kManifestHeader) throw ParseError(std::string("expected header '") + kManifestHeader + "'", lineno);
            header_seen = true;
            continue;
        }
        std::vector<std::string> f = split_csv(line);
        if (f.size() == 4) f.emplace_back();
        if (f.size() != 5) throw ParseError("expected 5 comma-separated fields, got " + std::to_string(f.size()), lineno);
        FrameRecord rec;
        rec.frame_id = f[0];
        if (rec.frame_id.empty()) throw ParseError("empty frame_id", lineno);
        if (f[1].empty()) throw ParseError("empty path", lineno);
        rec.path = std::filesystem::path(f[1]);
        if (rec.path.is_relative() && !base_dir.empty()) rec.path = base_dir / rec.path;
        if (f[2] == "polyp") {
            rec.truth = Label::Polyp;
        } else if (f[2] == "normal") {
            rec.truth = Label::Normal;
        } else {
            throw ParseError("label must be 'polyp' or 'normal', got '" + f[2] + "'", lineno);
        }
        rec.patient = f[3];
        if (rec.patient.empty()) throw ParseError("empty patient id", lineno);
        rec.sequence = f[4];
        if (rec.truth == Label::Polyp && rec.sequence.empty()) {
            throw ValidationError("line " + std::to_string(lineno) + ": polyp frame '" + rec.frame_id +
                                  "' has no sequence id");
        }
        if (rec.truth == Label::Normal && !rec.sequence.empty()) {
            throw ValidationError("line " + std::to_string(lineno) + ": normal frame '" + rec.frame_id +
                                  "' carries a sequence id");
        }
        if (!seen.insert(rec.frame_id).second) {
            throw ValidationError("line " + std::to_string(lineno) + ": duplicate frame_id '" + rec.frame_id + "'");
        }
        out.push_back(std::move(rec));
    }
    if (!header_seen && !out.empty()) throw ParseError("missing header", 1);
    return out;
}

std::vector<FrameRecord> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

void write_manifest(const std::filesystem::path& path, const std::vector<FrameRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << kManifestHeader << "\n";
    for (const FrameRecord& r : records) {
        out << r.frame_id << "," << r.path.generic_string() << "," << to_string(r.truth) << "," << r.patient << ","
            << r.sequence << "\n";
    }
    if (!out) throw IoError("failed writing manifest " + path.string());
}

// ---------------------------------------------------------------------------
// Scoring and cache

void write_score_cache(const std::filesystem::path& path, const PipelineParams& params,
                       const std::vector<FrameDecision>& decisions) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write score cache " + path.string());
    out << nlohmann::json{{"format", kCacheFormat}, {"params_hash", params.score_hash()}}.dump() << "\n";
    for (const FrameDecision& d : decisions) out << nlohmann::json(d).dump() << "\n";
    if (!out) throw IoError("failed writing score cache " + path.string());
}

std::vector<FrameDecision> read_score_cache(const std::filesystem::path& path, const PipelineParams& params) {
    std::ifstream in(path);
    if (!in) return {};
    std::string line;
    if (!std::getline(in, line)) return {};
    nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object() || header.value("format", "") != kCacheFormat ||
        header.value("params_hash", "") != params.score_hash()) {
        return {};
    }
    std::vector<FrameDecision> out;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("malformed score cache entry in " + path.string(), lineno);
        out.push_back(j.get<FrameDecision>());
    }
    return out;
}

ScoreTable score_dataset(const std::vector<FrameRecord>& records, const PipelineParams& params,
                         const ScoreOptions& options) {
    params.validate();
    std::unordered_map<std::string, FrameDecision> cached;
    bool cache_valid = false;
    if (options.cache && std::filesystem::exists(*options.cache)) {
        for (FrameDecision& d : read_score_cache(*options.cache, params)) {
            cache_valid = true;
            std::string id = d.frame_id;
            cached.emplace(std::move(id), std::move(d));
        }
    }

    const std::size_t n = records.size();
    std::vector<std::optional<FrameDecision>> results(n);
    std::vector<std::string> errors(n);
    std::vector<std::uint8_t> from_cache(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (auto it = cached.find(records[i].frame_id); it != cached.end()) {
            FrameDecision d = it->second;
            d.r_p = params.r_p;
            d.label = classify(d.r_max, params.r_p);
            results[i] = std::move(d);
            from_cache[i] = 1;
        }
    }

    parallel_for(n, options.threads, [&](std::size_t i) {
        if (from_cache[i]) return;
        try {
            FrameDecision d = process_frame(read_image(records[i].path), params);
            d.frame_id = records[i].frame_id;
            results[i] = std::move(d);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    ScoreTable table;
    for (std::size_t i = 0; i < n; ++i) {
        if (results[i]) {
            table.scores.push_back(score_of(records[i], results[i]->r_max));
            table.decisions.push_back(std::move(*results[i]));
            if (from_cache[i]) {
                ++table.reused;
            } else {
                ++table.computed;
            }
        } else {
            table.failures.push_back({records[i].frame_id, errors[i]});
        }
    }

    if (options.cache && (table.computed > 0 || !cache_valid)) {
        write_score_cache(*options.cache, params, table.decisions);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Metrics

std::string to_string(RocBasis basis) { return basis == RocBasis::PerFrame ? "per-frame" : "per-polyp"; }

double RocCurve::auc() const {
    auto pts = ascending(*this);
    pts.emplace_back(1.0, 1.0);
    return trapezoid(pts);
}

double RocCurve::partial_auc() const { return trapezoid(ascending(*this)); }

double specificity(const std::vector<Score>& scores, int r_p) {
    const std::size_t nn = count_truth(scores, Label::Normal);
    if (nn == 0) throw MetricError("specificity needs at least one normal frame");
    return 100.0 * (1.0 - static_cast<double>(count_if_score(scores, Label::Normal, r_p)) / nn);
}

double sensitivity_per_frame(const std::vector<Score>& scores, int r_p) {
    const std::size_t np = count_truth(scores, Label::Polyp);
    if (np == 0) throw MetricError("sensitivity needs at least one polyp frame");
    return 100.0 * static_cast<double>(count_if_score(scores, Label::Polyp, r_p)) / np;
}

std::vector<std::pair<std::string, bool>> detection_flags(const std::vector<Score>& scores, int r_p) {
    std::vector<std::pair<std::string, bool>> flags;
    std::unordered_map<std::string, std::size_t> index;
    for (const Score& s : scores) {
        if (s.truth != Label::Polyp) continue;
        auto [it, inserted] = index.emplace(s.sequence, flags.size());
        if (inserted) flags.emplace_back(s.sequence, false);
        if (s.r_max >= r_p) flags[it->second].second = true;
    }
    return flags;
}

double sensitivity_per_polyp(const std::vector<Score>& scores, int r_p) {
    const auto flags = detection_flags(scores, r_p);
    if (flags.empty()) throw MetricError("per-polyp sensitivity needs at least one sequence");
    const auto hit = std::count_if(flags.begin(), flags.end(), [](const auto& f) { return f.second; });
    return 100.0 * static_cast<double>(hit) / static_cast<double>(flags.size());
}

RocCurve roc_per_frame(const std::vector<Score>& scores) {
    RocCurve c;
    c.basis = RocBasis::PerFrame;
    c.n_positive = count_truth(scores, Label::Polyp);
    c.n_negative = count_truth(scores, Label::Normal);
    if (c.n_positive == 0 || c.n_negative == 0) throw MetricError("ROC needs both polyp and normal frames");
    int max_score = 0;
    for (const Score& s : scores) max_score = std::max(max_score, s.r_max);
    for (int r = 1; r <= max_score + 1; ++r) {
        c.points.push_back({r, static_cast<double>(count_if_score(scores, Label::Normal, r)) / c.n_negative,
                            static_cast<double>(count_if_score(scores, Label::Polyp, r)) / c.n_positive});
    }
    return c;
}

RocCurve roc_per_polyp(const std::vector<Score>& scores) {
    RocCurve c;
    c.basis = RocBasis::PerPolyp;
    c.n_negative = count_truth(scores, Label::Normal);
    const auto flags0 = detection_flags(scores, 1);
    c.n_positive = flags0.size();
    if (c.n_positive == 0) throw MetricError("per-polyp ROC needs at least one polyp sequence");
    if (c.n_negative == 0) throw MetricError("per-polyp ROC needs at least one normal frame");
    int max_score = 0;
    for (const Score& s : scores) max_score = std::max(max_score, s.r_max);
    for (int r = 1; r <= max_score + 1; ++r) {
        const auto flags = detection_flags(scores, r);
        const auto hit = std::count_if(flags.begin(), flags.end(), [](const auto& f) { return f.second; });
        c.points.push_back({r, static_cast<double>(count_if_score(scores, Label::Normal, r)) / c.n_negative,
                            static_cast<double>(hit) / c.n_positive});
    }
    return c;
}

int select_threshold(const std::vector<Score>& training, double target_spec) {
    const std::size_t nn = count_truth(training, Label::Normal);
    if (nn == 0) throw MetricError("threshold calibration needs normal frames in the training subset");
    if (!(target_spec <= 100.0)) {
        throw CalibrationError("target specificity " + std::to_string(target_spec) + "% is unattainable");
    }
    int max_normal = 0;
    for (const Score& s : training)
        if (s.truth == Label::Normal) max_normal = std::max(max_normal, s.r_max);
    for (int r = 1; r <= max_normal + 1; ++r) {
        const std::size_t tn = nn - count_if_score(training, Label::Normal, r);
        // tn / nn >= target / 100, compared without dividing.
        if (100.0 * static_cast<double>(tn) + 1e-9 >= target_spec * static_cast<double>(nn)) return r;
    }
    throw CalibrationError("no threshold reaches the target specificity");
}

PatientTable per_patient_false_positives(const std::vector<Score>& scores, int r_p) {
    std::map<std::string, PatientRow, decltype(&natural_less)> rows(&natural_less);
    for (const Score& s : scores) {
        PatientRow& row = rows[s.patient];
        row.patient = s.patient;
        if (s.truth != Label::Normal) continue;
        ++row.n_normal;
        if (s.r_max >= r_p) ++row.false_positives;
    }
    PatientTable t;
    t.total.patient = "Total";
    for (auto& [id, row] : rows) {
        row.fpr = row.n_normal ? static_cast<double>(row.false_positives) / row.n_normal : 0.0;
        t.total.n_normal += row.n_normal;
        t.total.false_positives += row.false_positives;
        t.rows.push_back(row);
    }
    t.total.fpr = t.total.n_normal ? static_cast<double>(t.total.false_positives) / t.total.n_normal : 0.0;
    return t;
}

double delta_metric(double base, double pert) {
    if (!(base > 0.0)) throw DomainError("relative change needs a positive base value");
    return std::abs(pert - base) / base * 100.0;
}

// ---------------------------------------------------------------------------
// Robustness study

const std::vector<std::string>& default_sensitivity_parameters() {
    static const std::vector<std::string> names{"sigma1", "sigma2", "M_L", "M_U", "S_L", "S_U", "E_max"};
    return names;
}

std::vector<FrameRecord> reduced_dataset(const std::vector<FrameRecord>& records, std::size_t max_normals) {
    std::vector<FrameRecord> out;
    std::size_t normals = 0;
    for (const FrameRecord& r : records) {
        if (r.truth == Label::Polyp) {
            out.push_back(r);
        } else if (normals < max_normals) {
            out.push_back(r);
            ++normals;
        }
    }
    return out;
}

namespace {

// Parameters read before the mid-pass stage; variants that agree on all of
// them share one pre-processing and texture evaluation per frame.
bool same_front_end(const PipelineParams& a, const PipelineParams& b) {
    for (const char* name : {"N_x", "N_y", "R_mask", "n_iter", "sigma_t", "sigma", "p", "T_L", "T_U", "knot_low",
                             "knot_high"}) {
        if (a.get(name) != b.get(name)) return false;
    }
    return true;
}

MetricSet metrics_at(const std::vector<Score>& scores, int r_p) {
    MetricSet m;
    m.spec = specificity(scores, r_p);
    m.sens_frame = sensitivity_per_frame(scores, r_p);
    m.sens_polyp = detection_flags(scores, r_p).empty() ? 0.0 : sensitivity_per_polyp(scores, r_p);
    return m;
}

std::optional<double> maybe_delta(double base, double pert) {
    if (!(base > 0.0)) return std::nullopt;
    return delta_metric(base, pert);
}

}  // namespace

SensitivityReport sensitivity_study(const std::vector<FrameRecord>& records, const PipelineParams& base,
                                    const std::vector<std::string>& parameters, const SensitivityOptions& options) {
    base.validate();
    const std::vector<FrameRecord> subset = reduced_dataset(records, options.max_normals);

    std::vector<PipelineParams> variants{base};
    for (const std::string& name : parameters) {
        PipelineParams p = base;
        p.set(name, perturb_up_10pct(name, base.get(name)));
        p.validate();
        variants.push_back(p);
    }

    const std::size_t n = subset.size();
    std::vector<std::vector<int>> r_max(variants.size(), std::vector<int>(n, 0));
    std::vector<std::string> errors(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        try {
            const RgbImage img = read_image(subset[i].path);
            if (img.cols() != base.nx || img.rows() != base.ny) {
                throw InputError("frame size does not match parameters");
            }
            const Frame gray = to_grayscale(img);
            const Frame f = preprocess_frame(gray, base);
            const FrameDecision front = analyze_preprocessed(f, base);
            r_max[0][i] = front.r_max;
            for (std::size_t v = 1; v < variants.size(); ++v) {
                if (!same_front_end(base, variants[v])) {
                    r_max[v][i] = process_frame(img, variants[v]).r_max;
                } else if (front.preselect) {
                    r_max[v][i] = analyze_geometry(f, variants[v]).r_max;
                }
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    auto scores_for = [&](std::size_t v) {
        std::vector<Score> s;
        for (std::size_t i = 0; i < n; ++i)
            if (errors[i].empty()) s.push_back(score_of(subset[i], r_max[v][i]));
        return s;
    };

    SensitivityReport rep;
    rep.r_p = base.r_p;
    const std::vector<Score> base_scores = scores_for(0);
    rep.n_polyp_frames = count_truth(base_scores, Label::Polyp);
    rep.n_normal_frames = count_truth(base_scores, Label::Normal);
    rep.base = metrics_at(base_scores, base.r_p);
    for (std::size_t k = 0; k < parameters.size(); ++k) {
        SensitivityRow row;
        row.parameter = parameters[k];
        row.base_value = base.get(parameters[k]);
        row.perturbed_value = variants[k + 1].get(parameters[k]);
        row.perturbed = metrics_at(scores_for(k + 1), base.r_p);
        row.delta_spec = maybe_delta(rep.base.spec, row.perturbed.spec);
        row.delta_sens_frame = maybe_delta(rep.base.sens_frame, row.perturbed.sens_frame);
        row.delta_sens_polyp = maybe_delta(rep.base.sens_polyp, row.perturbed.sens_polyp);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalReport evaluate_scores(const ScoreTable& table, const EvalOptions& options) {
    const std::vector<Score>& scores = table.scores;
    EvalReport rep;
    rep.n_frames = scores.size();
    rep.n_polyp = count_truth(scores, Label::Polyp);
    rep.n_normal = count_truth(scores, Label::Normal);
    rep.train_patients = options.train_patients;
    std::sort(rep.train_patients.begin(), rep.train_patients.end(), natural_less);
    rep.target_spec = options.target_spec;
    rep.failures = table.failures;

    std::vector<Score> training;
    const std::set<std::string> train(options.train_patients.begin(), options.train_patients.end());
    for (const Score& s : scores)
        if (train.empty() || train.count(s.patient)) training.push_back(s);
    if (training.empty()) throw MetricError("training subset is empty");

    rep.chosen_r_p = select_threshold(training, options.target_spec);
    rep.training_spec = specificity(training, rep.chosen_r_p);
    rep.operating_point = metrics_at(scores, rep.chosen_r_p);
    rep.flags = detection_flags(scores, rep.chosen_r_p);
    rep.n_sequences = rep.flags.size();
    rep.roc_frame = roc_per_frame(scores);
    rep.roc_polyp = roc_per_polyp(scores);
    rep.patients = per_patient_false_positives(scores, rep.chosen_r_p);
    return rep;
}

EvalReport evaluate_dataset(const std::vector<FrameRecord>& records, const PipelineParams& params,
                            const EvalOptions& options) {
    return evaluate_scores(score_dataset(records, params, options.scoring), options);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const MetricSet& m) {
    return {{"spec", m.spec}, {"sens_frame", m.sens_frame}, {"sens_polyp", m.sens_polyp}};
}

nlohmann::json to_json(const PatientRow& r) {
    return {{"patient", r.patient}, {"n_normal", r.n_normal}, {"fpn", r.false_positives}, {"fpr", r.fpr}};
}

}  // namespace

nlohmann::json to_json(const RocCurve& curve) {
    nlohmann::json pts = nlohmann::json::array();
    for (const RocPoint& p : curve.points) pts.push_back({{"r_p", p.r_p}, {"fpr", p.fpr}, {"tpr", p.tpr}});
    return {{"basis", to_string(curve.basis)},
            {"n_positive", curve.n_positive},
            {"n_negative", curve.n_negative},
            {"auc", curve.auc()},
            {"partial_auc", curve.partial_auc()},
            {"points", std::move(pts)}};
}

nlohmann::json to_json(const PatientTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const PatientRow& r : table.rows) rows.push_back(to_json(r));
    return {{"rows", std::move(rows)}, {"total", to_json(table.total)}};
}

nlohmann::json to_json(const SensitivityReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const SensitivityRow& r : report.rows) {
        rows.push_back({{"parameter", r.parameter},
                        {"base_value", r.base_value},
                        {"perturbed_value", r.perturbed_value},
                        {"perturbed", to_json(r.perturbed)},
                        {"delta_spec", optional_number(r.delta_spec)},
                        {"delta_sens_frame", optional_number(r.delta_sens_frame)},
                        {"delta_sens_polyp", optional_number(r.delta_sens_polyp)}});
    }
    return {{"r_p", report.r_p},
            {"n_polyp_frames", report.n_polyp_frames},
            {"n_normal_frames", report.n_normal_frames},
            {"base", to_json(report.base)},
            {"rows", std::move(rows)}};
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json flags = nlohmann::json::array();
    for (const auto& [seq, hit] : report.flags) flags.push_back({{"sequence", seq}, {"detected", hit}});
    nlohmann::json failures = nlohmann::json::array();
    for (const FailedFrame& f : report.failures) failures.push_back({{"frame_id", f.frame_id}, {"reason", f.reason}});
    nlohmann::json j{{"n_frames", report.n_frames},
                     {"n_polyp", report.n_polyp},
                     {"n_normal", report.n_normal},
                     {"n_sequences", report.n_sequences},
                     {"train_patients", report.train_patients},
                     {"target_spec", report.target_spec},
                     {"chosen_r_p", report.chosen_r_p},
                     {"training_spec", report.training_spec},
                     {"operating_point", to_json(report.operating_point)},
                     {"detection_flags", std::move(flags)},
                     {"roc_frame", to_json(report.roc_frame)},
                     {"roc_polyp", to_json(report.roc_polyp)},
                     {"per_patient", to_json(report.patients)},
                     {"failures", std::move(failures)}};
    j["sensitivity"] = report.sensitivity ? to_json(*report.sensitivity) : nlohmann::json(nullptr);
    return j;
}

std::string roc_csv(const RocCurve& curve) {
    std::string out = "r_p,fpr,tpr\n";
    char buf[96];
    for (const RocPoint& p : curve.points) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f\n", p.r_p, p.fpr, p.tpr);
        out += buf;
    }
    return out;
}

std::string roc_svg(const RocCurve& per_frame, const RocCurve& per_polyp, int marked_r_p) {
    constexpr double kSize = 400.0;
    constexpr double kMargin = 50.0;
    auto px = [&](double fpr) { return kMargin + fpr * kSize; };
    auto py = [&](double tpr) { return kMargin + (1.0 - tpr) * kSize; };
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + 2 * kMargin << "\" height=\""
      << kSize + 2 * kMargin << "\">\n";
    s << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" fill=\"white\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
      << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    auto curve = [&](const RocCurve& c, const char* color) {
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << px(0) << ","
          << py(0);
        for (auto it = c.points.rbegin(); it != c.points.rend(); ++it) s << " " << px(it->fpr) << "," << py(it->tpr);
        s << "\"/>\n";
        for (const RocPoint& p : c.points) {
            if (p.r_p != marked_r_p) continue;
            const double x = px(p.fpr);
            const double y = py(p.tpr);
            s << "<path d=\"M" << x - 5 << "," << y - 5 << " L" << x + 5 << "," << y + 5 << " M" << x - 5 << ","
              << y + 5 << " L" << x + 5 << "," << y - 5 << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
        }
    };
    curve(per_frame, "blue");
    curve(per_polyp, "green");
    s << "<text x=\"" << kMargin + kSize / 2 << "\" y=\"" << kSize + 2 * kMargin - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">FPR</text>\n";
    s << "<text x=\"16\" y=\"" << kMargin + kSize / 2 << "\" font-size=\"14\">TPR</text>\n";
    s << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin - 28 << "\" font-size=\"12\" fill=\"blue\">per frame</text>\n";
    s << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin - 12
      << "\" font-size=\"12\" fill=\"green\">per polyp</text>\n";
    s << "</svg>\n";
    return s.str();
}

void write_reports(const std::filesystem::path& dir, const EvalReport& report) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create report directory " + dir.string() + ": " + ec.message());
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream out(dir / name, std::ios::trunc | std::ios::binary);
        if (!out) throw IoError("cannot write " + (dir / name).string());
        out << text;
        if (!out) throw IoError("failed writing " + (dir / name).string());
    };
    write("report.json", to_json(report).dump(2) + "\n");
    write("roc_frame.csv", roc_csv(report.roc_frame));
    write("roc_polyp.csv", roc_csv(report.roc_polyp));
    write("roc.svg", roc_svg(report.roc_frame, report.roc_polyp, report.chosen_r_p));
}

}  // namespace polypdet
