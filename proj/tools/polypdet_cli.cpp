// polypdet: classify capsule frames, evaluate datasets, generate phantoms.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "polypdet/classifier.hpp"
#include "polypdet/error.hpp"
#include "polypdet/eval.hpp"
#include "polypdet/image_io.hpp"
#include "polypdet/params.hpp"
#include "polypdet/phantom.hpp"
#include "polypdet/render.hpp"

namespace {

using namespace polypdet;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

struct ParamOptions {
    std::string file;
    std::vector<std::string> sets;
};

PipelineParams build_params(const ParamOptions& o, int nx, int ny) {
    PipelineParams p = PipelineParams::defaults(nx, ny);
    try {
        if (!o.file.empty()) apply_param_file(p, o.file);
        for (const std::string& s : o.sets) apply_param_assignment(p, s);
    } catch (const Error& e) {
        // A bad parameter source is a configuration problem whatever its cause.
        throw ParameterError(e.what());
    }
    p.validate();
    return p;
}

// Dataset parameters take their size-dependent defaults from the first frame.
PipelineParams dataset_params(const ParamOptions& o, const std::vector<FrameRecord>& records) {
    if (records.empty()) throw ValidationError("manifest lists no frames");
    const RgbImage first = read_image(records.front().path);
    return build_params(o, first.cols(), first.rows());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

ScoreOptions score_options(const std::string& cache, unsigned threads) {
    ScoreOptions s;
    if (!cache.empty()) s.cache = cache;
    s.threads = threads;
    return s;
}

void error_line(const char* kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polyp detection in capsule endoscopy frames"};
    app.require_subcommand(1);

    ParamOptions popt;
    unsigned threads = 1;
    std::uint64_t seed = 1;
    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--params", popt.file, "key=value parameter file")->check(CLI::ExistingFile);
        sub->add_option("--set", popt.sets, "parameter override key=value (repeatable)");
    };

    // classify
    std::vector<std::string> images;
    auto* classify = app.add_subcommand("classify", "Print the decision for each image as one JSON line");
    classify->add_option("images", images, "input images")->required();
    add_params(classify);

    // evaluate / roc / calibrate / sensitivity
    std::string manifest;
    std::string out_dir = "report";
    std::string cache;
    std::vector<std::string> train_patients;
    double target_spec = 90.0;
    bool with_sensitivity = false;
    std::size_t max_normals = 4000;
    std::vector<std::string> sens_params;

    auto* evaluate = app.add_subcommand("evaluate", "Score a dataset, calibrate R_P and write reports");
    evaluate->add_option("--manifest", manifest, "dataset manifest CSV")->required();
    evaluate->add_option("--train-patient", train_patients, "training patient id (repeatable; default all)");
    evaluate->add_option("--target-spec", target_spec, "target specificity in percent")->capture_default_str();
    evaluate->add_option("--out", out_dir, "report directory")->capture_default_str();
    evaluate->add_option("--cache", cache, "score cache file");
    evaluate->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    evaluate->add_flag("--sensitivity", with_sensitivity, "include the +10% robustness study");
    evaluate->add_option("--max-normals", max_normals, "normal frames in the robustness study")->capture_default_str();
    add_params(evaluate);

    auto* roc = app.add_subcommand("roc", "Write per-frame and per-polyp ROC curves");
    roc->add_option("--manifest", manifest, "dataset manifest CSV")->required();
    roc->add_option("--out", out_dir, "output directory")->capture_default_str();
    roc->add_option("--cache", cache, "score cache file");
    roc->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    add_params(roc);

    auto* calibrate = app.add_subcommand("calibrate", "Pick the smallest R_P reaching the target specificity");
    calibrate->add_option("--manifest", manifest, "dataset manifest CSV")->required();
    calibrate->add_option("--train-patient", train_patients, "training patient id (repeatable; default all)");
    calibrate->add_option("--target-spec", target_spec, "target specificity in percent")->capture_default_str();
    calibrate->add_option("--cache", cache, "score cache file");
    calibrate->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    add_params(calibrate);

    std::string out_file;
    auto* sensitivity = app.add_subcommand("sensitivity", "Raise each parameter by 10% and report metric changes");
    sensitivity->add_option("--manifest", manifest, "dataset manifest CSV")->required();
    sensitivity->add_option("--param", sens_params, "parameter to perturb (repeatable; default geometric set)");
    sensitivity->add_option("--max-normals", max_normals, "normal frames used")->capture_default_str();
    sensitivity->add_option("--out", out_file, "write the JSON table here instead of stdout");
    sensitivity->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    add_params(sensitivity);

    // synth
    DatasetSpec dspec;
    int size = 256;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with manifest");
    synth->add_option("--out", out_dir, "dataset directory")->required();
    synth->add_option("--sequences", dspec.n_sequences, "polyp sequences")->capture_default_str();
    synth->add_option("--frames", dspec.frames_per_sequence, "frames per sequence")->capture_default_str();
    synth->add_option("--normals", dspec.n_normal, "normal frames")->capture_default_str();
    synth->add_option("--patients", dspec.n_patients, "patients")->capture_default_str();
    synth->add_option("--size", size, "frame side in pixels")->capture_default_str();
    synth->add_option("--seed", seed, "random seed")->capture_default_str();
    synth->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    // render
    std::string image;
    std::string out_png;
    auto* render = app.add_subcommand("render", "Draw inertia ellipses and the R_max circle onto a frame");
    render->add_option("image", image, "input image")->required();
    render->add_option("--out", out_png, "output PNG")->required();
    add_params(render);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_line("config", e.what());
        return kExitConfig;
    }

    try {
        if (*classify) {
            for (const std::string& path : images) {
                const RgbImage img = read_image(path);
                const PipelineParams p = build_params(popt, img.cols(), img.rows());
                FrameDecision d = process_frame(img, p);
                d.frame_id = std::filesystem::path(path).stem().string();
                std::cout << nlohmann::json(d).dump() << "\n";
            }
        } else if (*evaluate) {
            const auto records = load_manifest(manifest);
            const PipelineParams p = dataset_params(popt, records);
            EvalOptions eo;
            eo.train_patients = train_patients;
            eo.target_spec = target_spec;
            eo.scoring = score_options(cache, threads);
            EvalReport rep = evaluate_dataset(records, p, eo);
            if (with_sensitivity) {
                PipelineParams at = p;
                at.r_p = rep.chosen_r_p;
                rep.sensitivity = sensitivity_study(records, at, default_sensitivity_parameters(),
                                                    SensitivityOptions{max_normals, threads});
            }
            write_reports(out_dir, rep);
            std::printf("R_P=%d SPEC=%.2f%% SENS_frame=%.2f%% SENS_polyp=%.2f%% AUC_frame=%.4f AUC_polyp=%.4f\n",
                        rep.chosen_r_p, rep.operating_point.spec, rep.operating_point.sens_frame,
                        rep.operating_point.sens_polyp, rep.roc_frame.auc(), rep.roc_polyp.auc());
        } else if (*roc) {
            const auto records = load_manifest(manifest);
            const PipelineParams p = dataset_params(popt, records);
            const ScoreTable t = score_dataset(records, p, score_options(cache, threads));
            const RocCurve frame = roc_per_frame(t.scores);
            const RocCurve polyp = roc_per_polyp(t.scores);
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
            write_text(out_dir + "/roc_frame.csv", roc_csv(frame));
            write_text(out_dir + "/roc_polyp.csv", roc_csv(polyp));
            write_text(out_dir + "/roc.svg", roc_svg(frame, polyp, p.r_p));
            std::printf("AUC_frame=%.4f AUC_polyp=%.4f\n", frame.auc(), polyp.auc());
        } else if (*calibrate) {
            const auto records = load_manifest(manifest);
            const PipelineParams p = dataset_params(popt, records);
            const ScoreTable t = score_dataset(records, p, score_options(cache, threads));
            std::vector<Score> training;
            for (const Score& s : t.scores)
                if (train_patients.empty() ||
                    std::find(train_patients.begin(), train_patients.end(), s.patient) != train_patients.end())
                    training.push_back(s);
            const int r_p = select_threshold(training, target_spec);
            std::cout << nlohmann::json{{"r_p", r_p},
                                        {"target_spec", target_spec},
                                        {"training_spec", specificity(training, r_p)},
                                        {"n_training", training.size()}}
                             .dump()
                      << "\n";
        } else if (*sensitivity) {
            const auto records = load_manifest(manifest);
            const PipelineParams p = dataset_params(popt, records);
            const auto names = sens_params.empty() ? default_sensitivity_parameters() : sens_params;
            const SensitivityReport rep = sensitivity_study(records, p, names, SensitivityOptions{max_normals, threads});
            const std::string text = to_json(rep).dump(2) + "\n";
            if (out_file.empty()) {
                std::cout << text;
            } else {
                write_text(out_file, text);
            }
        } else if (*synth) {
            dspec.nx = size;
            dspec.ny = size;
            dspec.seed = seed;
            dspec.threads = threads;
            const auto frames = generate_dataset(dspec, out_dir);
            std::printf("wrote %zu frames and %s/manifest.csv\n", frames.size(), out_dir.c_str());
        } else if (*render) {
            const RgbImage img = read_image(image);
            const PipelineParams p = build_params(popt, img.cols(), img.rows());
            const FrameDecision d = process_frame(img, p);
            write_image(out_png, render_overlay(img, d));
        }
    } catch (const Error& e) {
        switch (e.kind()) {
            case ErrorKind::Input: error_line("input", e.what()); return kExitInput;
            case ErrorKind::Config: error_line("config", e.what()); return kExitConfig;
            case ErrorKind::Internal: error_line("internal", e.what()); return kExitInternal;
        }
    } catch (const std::exception& e) {
        error_line("internal", e.what());
        return kExitInternal;
    }
    return kExitOk;
}
