#include "polypdet/classifier.hpp"

#include <cmath>
#include <limits>

#include "polypdet/error.hpp"
#include "polypdet/preprocess.hpp"
#include "polypdet/texture.hpp"

namespace polypdet {

namespace {

inline double cap_value(double r2, int row, int col, Point2 center, double inv_nx2) {
    const double dy = (row + 1) - center.y;
    const double dx = (col + 1) - center.x;
    const double b = (r2 - (dy * dy + dx * dx)) * inv_nx2;
    return b >= 0.0 ? b : 0.0;
}

}  // namespace

WeightedCentroid weighted_centroid(const MidpassImage& u, const Component& pixels) {
    if (pixels.empty()) throw ContractViolation("weighted centroid of an empty feature");
    double mass = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (const Pixel& p : pixels) {
        const double w = u.u(p.row, p.col);
        mass += w;
        sx += w * (p.col + 1);
        sy += w * (p.row + 1);
    }
    if (mass > 0.0) return {{sx / mass, sy / mass}, mass, false};
    return {center_of_mass(pixels), 0.0, true};
}

Frame ball_surface(double radius, Point2 center, int rows, int cols) {
    if (!(radius >= 1.0)) throw ParameterError("ball radius must be >= 1");
    Frame b(rows, cols);
    const double inv_nx2 = 1.0 / (static_cast<double>(cols) * cols);
    const double r2 = radius * radius;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) b(r, c) = cap_value(r2, r, c, center, inv_nx2);
    return b;
}

double ball_objective(const MidpassImage& u, Point2 center, int radius, const CircularMask& m) {
    const Frame& f = u.u;
    if (!m.fits(f)) throw DimensionError("mask does not match mid-pass image");
    const double inv_nx2 = 1.0 / (static_cast<double>(f.cols()) * f.cols());
    const double r2 = static_cast<double>(radius) * radius;
    double acc = 0.0;
    for (int r = 0; r < f.rows(); ++r)
        for (int c = 0; c < f.cols(); ++c) {
            if (!m.contains(r, c)) continue;
            const double d = f(r, c) - cap_value(r2, r, c, center, inv_nx2);
            acc += d * d;
        }
    return std::sqrt(acc);
}

BallFit fit_ball_radius(const MidpassImage& u, const WeightedCentroid& center, const CircularMask& m) {
    const Frame& f = u.u;
    if (!m.fits(f)) throw DimensionError("mask does not match mid-pass image");
    const int r_hi = f.cols() / 3;

    // Gather the masked pixels once; the scan touches them r_hi times.
    struct Sample {
        double dy2_dx2;
        double u;
    };
    std::vector<Sample> samples;
    samples.reserve(f.size());
    for (int r = 0; r < f.rows(); ++r)
        for (int c = 0; c < f.cols(); ++c)
            if (m.contains(r, c)) {
                const double dy = (r + 1) - center.center.y;
                const double dx = (c + 1) - center.center.x;
                samples.push_back({dy * dy + dx * dx, f(r, c)});
            }

    const double inv_nx2 = 1.0 / (static_cast<double>(f.cols()) * f.cols());
    BallFit best;
    best.centroid = center;
    best.objective = std::numeric_limits<double>::infinity();
    for (int radius = 1; radius <= std::max(r_hi, 1); ++radius) {
        const double r2 = static_cast<double>(radius) * radius;
        double acc = 0.0;
        for (const Sample& s : samples) {
            const double b = (r2 - s.dy2_dx2) * inv_nx2;
            const double d = s.u - (b >= 0.0 ? b : 0.0);
            acc += d * d;
        }
        const double obj = std::sqrt(acc);
        if (obj < best.objective) {
            best.objective = obj;
            best.r_opt = radius;
        }
    }
    return best;
}

int decision_radius(const std::vector<BallFit>& fits) {
    int r = 0;
    for (const BallFit& f : fits) r = std::max(r, f.r_opt);
    return r;
}

std::string to_string(Label label) { return label == Label::Polyp ? "polyp" : "normal"; }

Label classify(int r_max, int r_p) {
    if (r_p <= 0) throw ParameterError("R_P must be positive");
    return r_max >= r_p ? Label::Polyp : Label::Normal;
}

std::string to_string(ExitStage stage) {
    switch (stage) {
        case ExitStage::Preselect: return "preselect";
        case ExitStage::Geometry: return "geometry";
        case ExitStage::Classifier: return "classifier";
    }
    return "unknown";
}

std::optional<std::size_t> FrameDecision::winning_feature() const {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < features.size(); ++k) {
        const auto& b = features[k].ball;
        if (b && b->r_opt == r_max && r_max > 0) {
            best = k;
            break;
        }
    }
    return best;
}

Frame preprocess_frame(const Frame& gray, const PipelineParams& params, bool* degenerate) {
    const CircularMask mask(gray.rows(), gray.cols(), params.r_mask);
    VignettingResult v = correct_vignetting(gray, mask);
    if (degenerate) *degenerate = v.degenerate;
    return extrapolate_radial(v.frame, mask);
}

FrameDecision analyze_geometry(const Frame& f, const PipelineParams& params, FrameTrace* trace) {
    params.validate();
    const CircularMask mask(f.rows(), f.cols(), params.r_mask);
    FrameDecision d;
    d.preselect = true;
    d.r_p = params.r_p;

    MidpassImage u = midpass_filter(f, params.sigma1, params.sigma2, mask);
    Segmentation seg = segment(u, params.m_low, params.m_high);
    d.theta = seg.theta;
    d.n_components = static_cast<int>(seg.components.size());

    const GeometricCriteria criteria{params.s_low, params.s_high, params.e_max};
    std::vector<Feature> features =
        analyze_features(trace ? seg.components : std::move(seg.components), criteria);

    std::vector<BallFit> fits;
    for (const Feature& feat : features) {
        FeatureRecord rec{feat.index, feat.size, feat.passes_size, feat.passes_eccentricity, feat.moments, {}};
        if (feat.kept()) {
            BallFit fit = fit_ball_radius(u, weighted_centroid(u, feat.pixels), mask);
            fit.feature_index = feat.index;
            rec.ball = fit;
            fits.push_back(fit);
        }
        d.features.push_back(std::move(rec));
    }

    d.exit_stage = fits.empty() ? ExitStage::Geometry : ExitStage::Classifier;
    d.r_max = decision_radius(fits);
    d.label = classify(d.r_max, params.r_p);

    if (trace) {
        trace->preprocessed = f;
        trace->midpass = std::move(u);
        trace->segmentation = std::move(seg);
    }
    return d;
}

FrameDecision analyze_preprocessed(const Frame& f, const PipelineParams& params, FrameTrace* trace) {
    params.validate();
    const CircularMask mask(f.rows(), f.cols(), params.r_mask);
    const TextureDecomposition parts =
        decompose_cartoon_texture(f, params.sigma_t, params.n_iter, {params.knot_low, params.knot_high});
    TexturePeak peak = texture_transform(parts.texture, params.sigma, params.p, mask);

    FrameDecision d;
    if (preselect(peak.t_max, params.t_low, params.t_high)) {
        d = analyze_geometry(f, params, trace);
    } else {
        d.preselect = false;
        d.r_p = params.r_p;
        d.r_max = 0;
        d.label = classify(0, params.r_p);
        d.exit_stage = ExitStage::Preselect;
        if (trace) trace->preprocessed = f;
    }
    d.t_max = peak.t_max;
    if (trace) {
        trace->texture = parts.texture;
        trace->texture_transform = std::move(peak.transformed);
    }
    return d;
}

FrameDecision process_frame(const RgbImage& image, const PipelineParams& params, FrameTrace* trace) {
    params.validate();
    if (image.cols() != params.nx || image.rows() != params.ny) {
        throw InputError("frame is " + std::to_string(image.cols()) + "x" + std::to_string(image.rows()) +
                         " but parameters expect " + std::to_string(params.nx) + "x" + std::to_string(params.ny));
    }
    const Frame gray = to_grayscale(image);
    bool degenerate = false;
    const Frame f = preprocess_frame(gray, params, &degenerate);
    FrameDecision d = analyze_preprocessed(f, params, trace);
    d.vignetting_degenerate = degenerate;
    if (trace) trace->gray = gray;
    return d;
}

FrameDecision process_image_file(const std::filesystem::path& path, const PipelineParams& params,
                                 FrameTrace* trace) {
    FrameDecision d = process_frame(read_image(path), params, trace);
    d.frame_id = path.stem().string();
    return d;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_or_inf(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

ExitStage stage_from_string(const std::string& s) {
    if (s == "preselect") return ExitStage::Preselect;
    if (s == "geometry") return ExitStage::Geometry;
    if (s == "classifier") return ExitStage::Classifier;
    throw InputError("unknown exit stage '" + s + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const FrameDecision& d) {
    nlohmann::json feats = nlohmann::json::array();
    for (const FeatureRecord& f : d.features) {
        nlohmann::json jf{{"index", f.index},
                          {"size", f.size},
                          {"passes_size", f.passes_size},
                          {"passes_eccentricity", f.passes_eccentricity}};
        if (f.moments) {
            const FeatureMoments& m = *f.moments;
            jf["centroid"] = {m.centroid.x, m.centroid.y};
            jf["inertia"] = {m.inertia.a00, m.inertia.a01, m.inertia.a11};
            jf["eccentricity"] = number_or_null(m.eccentricity);
        }
        if (f.ball) {
            const BallFit& b = *f.ball;
            jf["ball"] = {{"center", {b.centroid.center.x, b.centroid.center.y}},
                          {"mass", b.centroid.mass},
                          {"unweighted", b.centroid.unweighted},
                          {"r_opt", b.r_opt},
                          {"objective", b.objective}};
        }
        feats.push_back(std::move(jf));
    }
    j = nlohmann::json{{"frame_id", d.frame_id},
                       {"t_max", d.t_max},
                       {"preselect", d.preselect},
                       {"theta", d.theta ? nlohmann::json(*d.theta) : nlohmann::json(nullptr)},
                       {"n_components", d.n_components},
                       {"features", std::move(feats)},
                       {"r_max", d.r_max},
                       {"r_p", d.r_p},
                       {"label", to_string(d.label)},
                       {"exit_stage", to_string(d.exit_stage)},
                       {"vignetting_degenerate", d.vignetting_degenerate}};
}

void from_json(const nlohmann::json& j, FrameDecision& d) {
    try {
        d = FrameDecision{};
        d.frame_id = j.at("frame_id").get<std::string>();
        d.t_max = j.at("t_max").get<double>();
        d.preselect = j.at("preselect").get<bool>();
        if (j.contains("theta") && !j.at("theta").is_null()) d.theta = j.at("theta").get<double>();
        d.n_components = j.at("n_components").get<int>();
        d.r_max = j.at("r_max").get<int>();
        d.r_p = j.value("r_p", 0);
        d.label = j.value("label", std::string("normal")) == "polyp" ? Label::Polyp : Label::Normal;
        d.exit_stage = stage_from_string(j.at("exit_stage").get<std::string>());
        d.vignetting_degenerate = j.value("vignetting_degenerate", false);
        for (const auto& jf : j.at("features")) {
            FeatureRecord f;
            f.index = jf.at("index").get<int>();
            f.size = jf.at("size").get<std::size_t>();
            f.passes_size = jf.at("passes_size").get<bool>();
            f.passes_eccentricity = jf.at("passes_eccentricity").get<bool>();
            if (jf.contains("inertia")) {
                FeatureMoments m;
                m.centroid = {jf.at("centroid")[0].get<double>(), jf.at("centroid")[1].get<double>()};
                m.inertia = {jf.at("inertia")[0].get<double>(), jf.at("inertia")[1].get<double>(),
                             jf.at("inertia")[2].get<double>()};
                m.lambda = eigenvalues(m.inertia);
                m.eccentricity = number_or_inf(jf.at("eccentricity"));
                f.moments = m;
            }
            if (jf.contains("ball")) {
                const auto& jb = jf.at("ball");
                BallFit b;
                b.feature_index = f.index;
                b.centroid.center = {jb.at("center")[0].get<double>(), jb.at("center")[1].get<double>()};
                b.centroid.mass = jb.at("mass").get<double>();
                b.centroid.unweighted = jb.value("unweighted", false);
                b.r_opt = jb.at("r_opt").get<int>();
                b.objective = jb.at("objective").get<double>();
                f.ball = b;
            }
            d.features.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed frame decision: ") + e.what());
    }
}

}  // namespace polypdet
