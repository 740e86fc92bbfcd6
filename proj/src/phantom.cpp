#include "polypdet/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "polypdet/error.hpp"
#include "parallel.hpp"

namespace polypdet {

PhantomRng::PhantomRng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t PhantomRng::next() { return engine_(); }

double PhantomRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double PhantomRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double PhantomRng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    return mag * std::cos(2.0 * std::numbers::pi * u2);
}

int PhantomRng::integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

double gain_at(const std::array<double, 3>& c, double rho) {
    const double x = rho * rho;
    return 1.0 + x * (c[0] + x * (c[1] + x * c[2]));
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// Unit-variance speckle: white noise smoothed at a 1-2 px correlation length.
Frame speckle_field(int rows, int cols, PhantomRng& rng) {
    Frame w(rows, cols);
    for (double& v : w.pixels()) v = rng.normal();
    Frame s = gaussian_convolve(w, 1.2);
    double sum2 = 0.0;
    for (double v : s.pixels()) sum2 += v * v;
    const double inv = 1.0 / std::sqrt(sum2 / static_cast<double>(s.size()));
    for (double& v : s.pixels()) v *= inv;
    return s;
}

}  // namespace

void PhantomSpec::validate() const {
    if (nx < Frame::kMinSide || ny < Frame::kMinSide) throw SpecError("frame sides must be at least 8");
    if (!(base > 0.0 && base <= 255.0)) throw SpecError("base intensity must lie in (0, 255]");
    for (double c : vignetting)
        if (!std::isfinite(c)) throw SpecError("vignetting coefficients must be finite");
    for (int k = 0; k <= 100; ++k)
        if (gain_at(vignetting, k / 100.0) <= 0.0) throw SpecError("vignetting gain must stay positive");
    if (n_folds < 0 || n_lumps < 0) throw SpecError("fold and lump counts must be non-negative");
    if (n_lumps > 0 && !(lump_radius > 0.0 && std::isfinite(lump_amplitude))) {
        throw SpecError("lumps need a positive radius");
    }
    if (n_folds > 0 && !(fold_width > 0.0 && fold_length > 0.0 && std::isfinite(fold_amplitude))) {
        throw SpecError("folds need positive width and length");
    }
    if (!finite_nonneg(bubble_coverage) || bubble_coverage > 5.0) throw SpecError("bubble coverage must lie in [0, 5]");
    if (!finite_nonneg(mucosa_texture) || !finite_nonneg(noise)) throw SpecError("texture and noise must be >= 0");
    for (double t : tint)
        if (!(t > 0.0 && t <= 1.0)) throw SpecError("tint factors must lie in (0, 1]");
    if (polyp) {
        const PolypSpec& p = *polyp;
        if (!(p.radius > 0.0) || !std::isfinite(p.amplitude) || !finite_nonneg(p.texture)) {
            throw SpecError("polyp needs a positive radius and finite amplitude");
        }
        if (detectable_polyp && (p.radius < nx / 15.0 || p.radius > nx / 4.5)) {
            throw SpecError("detectable polyp radius must lie in [N_x/15, N_x/4.5]");
        }
        const double off = std::hypot(p.center.x - nx / 2.0, p.center.y - ny / 2.0);
        if (off + p.radius > fov_radius()) throw SpecError("polyp lies outside the circular field of view");
    }
    if (fov_radius() > std::min(nx, ny) / 2.0) throw SpecError("field of view does not fit the frame");
}

PhantomFrame generate_frame(const PhantomSpec& spec) {
    spec.validate();
    const int rows = spec.ny;
    const int cols = spec.nx;
    const double cx = cols / 2.0;
    const double cy = rows / 2.0;
    const double fov = spec.fov_radius();
    PhantomRng rng(spec.seed);

    Frame img(rows, cols, spec.base);

    // Roughly parallel folds at a common orientation, spaced so they do not cross.
    const double theta0 = rng.uniform(0.0, std::numbers::pi);
    const double spacing = rng.uniform(35.0, 50.0) * cols / 256.0;
    for (int k = 0; k < spec.n_folds; ++k) {
        const double theta = theta0 + rng.uniform(-0.12, 0.12);
        const double across = (k - (spec.n_folds - 1) / 2.0) * spacing + rng.uniform(-4.0, 4.0);
        const double along = rng.uniform(-0.1, 0.1) * fov;
        const double fx = cx + along * std::cos(theta0) - across * std::sin(theta0);
        const double fy = cy + along * std::sin(theta0) + across * std::cos(theta0);
        const double amp = spec.fold_amplitude * rng.uniform(0.8, 1.2);
        const double w = spec.fold_width * rng.uniform(0.8, 1.2);
        const double half = 0.5 * spec.fold_length * rng.uniform(0.8, 1.2);
        const double bend = rng.uniform(-1.0, 1.0) / (8.0 * half);
        const double ux = std::cos(theta);
        const double uy = std::sin(theta);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double dx = (c + 1) - fx;
                const double dy = (r + 1) - fy;
                const double s = dx * ux + dy * uy;
                const double n = -dx * uy + dy * ux - bend * s * s;
                const double over = std::max(std::abs(s) - half, 0.0);
                const double e = (n * n + over * over) / (2.0 * w * w);
                if (e < 30.0) img(r, c) += amp * std::exp(-e);
            }
        }
    }

    for (int k = 0; k < spec.n_lumps; ++k) {
        const double lr = spec.lump_radius * rng.uniform(0.8, 1.2);
        const double rad = std::max(fov - lr - 2.0, 0.0) * std::sqrt(rng.uniform());
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double lx = cx + rad * std::cos(phi);
        const double ly = cy + rad * std::sin(phi);
        const double amp = spec.lump_amplitude * rng.uniform(0.8, 1.2);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double d2 = ((c + 1) - lx) * ((c + 1) - lx) + ((r + 1) - ly) * ((r + 1) - ly);
                if (d2 >= lr * lr) continue;
                const double q = 1.0 - d2 / (lr * lr);
                img(r, c) += amp * q * q;
            }
        }
    }

    if (spec.mucosa_texture > 0.0) {
        const Frame s = speckle_field(rows, cols, rng);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) img(r, c) *= std::max(1.0 + spec.mucosa_texture * s(r, c), 0.0);
    }

    GroundTruth truth;
    truth.mask = BinaryImage(rows, cols);
    if (spec.polyp) {
        const PolypSpec& p = *spec.polyp;
        truth.label = Label::Polyp;
        truth.center = p.center;
        truth.radius = p.radius;
        const Frame s = p.texture > 0.0 ? speckle_field(rows, cols, rng) : Frame(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double dx = (c + 1) - p.center.x;
                const double dy = (r + 1) - p.center.y;
                const double d2 = dx * dx + dy * dy;
                if (d2 > p.radius * p.radius) continue;
                truth.mask(r, c) = 1;
                const double q = 1.0 - d2 / (p.radius * p.radius);
                const double edge = std::min(1.0, (p.radius - std::sqrt(d2)) / 3.0);
                img(r, c) = (img(r, c) + p.amplitude * q * q) * std::max(1.0 + p.texture * edge * s(r, c), 0.0);
            }
        }
    }

    if (spec.bubble_coverage > 0.0) {
        constexpr double kMinR = 3.0;
        constexpr double kMaxR = 8.0;
        const double mean_area = std::numbers::pi * (kMinR * kMinR + kMinR * kMaxR + kMaxR * kMaxR) / 3.0;
        const int count = static_cast<int>(std::lround(spec.bubble_coverage * std::numbers::pi * fov * fov / mean_area));
        for (int k = 0; k < count; ++k) {
            const double rad = fov * std::sqrt(rng.uniform());
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double bx = cx + rad * std::cos(phi);
            const double by = cy + rad * std::sin(phi);
            const double br = rng.uniform(kMinR, kMaxR);
            const double sx = bx - 0.35 * br;
            const double sy = by - 0.35 * br;
            const int r0 = std::max(0, static_cast<int>(by - br - 3));
            const int r1 = std::min(rows - 1, static_cast<int>(by + br + 3));
            const int c0 = std::max(0, static_cast<int>(bx - br - 3));
            const int c1 = std::min(cols - 1, static_cast<int>(bx + br + 3));
            for (int r = r0; r <= r1; ++r) {
                for (int c = c0; c <= c1; ++c) {
                    const double d = std::hypot((c + 1) - bx, (r + 1) - by);
                    const double ds2 = ((c + 1) - sx) * ((c + 1) - sx) + ((r + 1) - sy) * ((r + 1) - sy);
                    double add = 70.0 * std::exp(-(d - br) * (d - br) / (2.0 * 0.7 * 0.7));
                    if (d < br) add += 8.0;
                    add += 90.0 * std::exp(-ds2 / (2.0 * 0.8 * 0.8));
                    img(r, c) += add;
                }
            }
        }
    }

    const CircularMask mask(rows, cols, fov);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (!mask.contains(r, c)) {
                img(r, c) = 0.0;
                continue;
            }
            const double rho = std::hypot((c + 1) - cx, (r + 1) - cy) / fov;
            img(r, c) = img(r, c) * gain_at(spec.vignetting, rho) + spec.noise * rng.normal();
        }
    }

    PhantomFrame out{RgbImage{Frame(rows, cols), Frame(rows, cols), Frame(rows, cols)}, std::move(truth)};
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = img(r, c);
            out.image.red(r, c) = std::clamp(std::round(v * spec.tint[0]), 0.0, 255.0);
            out.image.green(r, c) = std::clamp(std::round(v * spec.tint[1]), 0.0, 255.0);
            out.image.blue(r, c) = std::clamp(std::round(v * spec.tint[2]), 0.0, 255.0);
        }
    }
    return out;
}

std::string to_string(SceneKind kind) {
    switch (kind) {
        case SceneKind::Flat: return "flat";
        case SceneKind::Folds: return "folds";
        case SceneKind::Bubbles: return "bubbles";
        case SceneKind::Textured: return "textured";
        case SceneKind::Polyp: return "polyp";
    }
    return "unknown";
}

PhantomSpec scene_preset(SceneKind kind, int nx, int ny, std::uint64_t seed) {
    PhantomRng rng(derive_seed(seed, 0x5CE9E));
    PhantomSpec s;
    s.nx = nx;
    s.ny = ny;
    s.seed = seed;
    s.base = rng.uniform(135.0, 165.0);
    s.vignetting = {rng.uniform(-0.5, -0.2), rng.uniform(0.0, 0.1), 0.0};
    s.noise = 1.5;
    s.mucosa_texture = 0.01;
    const double scale = nx / 256.0;
    switch (kind) {
        case SceneKind::Flat:
            break;
        case SceneKind::Folds:
            s.n_folds = rng.integer(2, 4);
            s.fold_amplitude = rng.uniform(70.0, 90.0);
            s.fold_width = rng.uniform(3.0, 4.0) * scale;
            s.fold_length = rng.uniform(140.0, 200.0) * scale;
            s.mucosa_texture = 0.04;
            break;
        case SceneKind::Bubbles:
            s.bubble_coverage = rng.uniform(1.0, 1.5);
            break;
        case SceneKind::Textured:
            s.mucosa_texture = rng.uniform(0.04, 0.06);
            s.n_lumps = rng.integer(0, 2);
            s.lump_amplitude = rng.uniform(25.0, 45.0);
            s.lump_radius = rng.uniform(16.0, 26.0) * scale;
            break;
        case SceneKind::Polyp: {
            PolypSpec p;
            p.radius = rng.uniform(30.0, 55.0) * scale;
            const double off = rng.uniform(0.0, s.fov_radius() - p.radius - 2.0);
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            p.center = {nx / 2.0 + off * std::cos(phi), ny / 2.0 + off * std::sin(phi)};
            p.amplitude = rng.uniform(60.0, 80.0);
            p.texture = rng.uniform(0.06, 0.10);
            s.polyp = p;
            s.detectable_polyp = true;
            break;
        }
    }
    return s;
}

std::vector<std::pair<GeneratedFrame, PhantomSpec>> plan_dataset(const DatasetSpec& spec) {
    if (spec.n_sequences < 0 || spec.n_normal < 0 || spec.n_patients < 1 ||
        (spec.n_sequences > 0 && spec.frames_per_sequence < 1)) {
        throw SpecError("dataset counts must be non-negative with at least one patient and one frame per sequence");
    }
    if (spec.n_sequences + spec.n_normal == 0) throw SpecError("dataset would be empty");
    const double scale = spec.nx / 256.0;
    std::vector<std::pair<GeneratedFrame, PhantomSpec>> plan;
    std::uint64_t frame_no = 0;
    char id[64];

    for (int k = 0; k < spec.n_sequences; ++k) {
        PhantomRng rng(derive_seed(spec.seed, 1'000'000 + static_cast<std::uint64_t>(k)));
        const double r_near = rng.uniform(38.0, 46.0) * scale;
        const double r_far = std::max(r_near / 2.2, spec.nx / 15.0);
        const double amplitude = rng.uniform(60.0, 80.0);
        const double texture = rng.uniform(0.06, 0.10);
        PhantomSpec probe;
        probe.nx = spec.nx;
        probe.ny = spec.ny;
        const double fov = probe.fov_radius();
        const double off = rng.uniform(0.0, std::max(fov - r_near - 6.0, 0.0));
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const std::string patient = std::to_string(k % spec.n_patients + 1);
        std::snprintf(id, sizeof id, "s%02d", k + 1);
        const std::string sequence = id;
        for (int j = 0; j < spec.frames_per_sequence; ++j) {
            const double t = spec.frames_per_sequence > 1 ? static_cast<double>(j) / (spec.frames_per_sequence - 1) : 1.0;
            const double radius = r_far * std::pow(r_near / r_far, t);
            Point2 center{spec.nx / 2.0 + off * std::cos(phi) + rng.uniform(-3.0, 3.0),
                          spec.ny / 2.0 + off * std::sin(phi) + rng.uniform(-3.0, 3.0)};
            const double room = fov - radius - 1.0;
            const double dcx = center.x - spec.nx / 2.0;
            const double dcy = center.y - spec.ny / 2.0;
            const double d = std::hypot(dcx, dcy);
            if (d > room) {
                center.x = spec.nx / 2.0 + dcx * room / d;
                center.y = spec.ny / 2.0 + dcy * room / d;
            }
            PhantomSpec fs = scene_preset(SceneKind::Polyp, spec.nx, spec.ny, derive_seed(spec.seed, frame_no++));
            fs.polyp = PolypSpec{center, radius, amplitude, texture};
            GeneratedFrame g;
            std::snprintf(id, sizeof id, "%s_f%02d", sequence.c_str(), j + 1);
            g.record = {id, std::filesystem::path("frames") / (std::string(id) + ".png"), Label::Polyp, patient, sequence};
            g.kind = SceneKind::Polyp;
            g.polyp_radius = radius;
            g.polyp_center = center;
            plan.emplace_back(std::move(g), fs);
        }
    }

    constexpr SceneKind kNormalKinds[] = {SceneKind::Flat, SceneKind::Folds, SceneKind::Bubbles, SceneKind::Textured};
    for (int i = 0; i < spec.n_normal; ++i) {
        const SceneKind kind = kNormalKinds[i % 4];
        GeneratedFrame g;
        std::snprintf(id, sizeof id, "n%04d", i + 1);
        g.record = {id, std::filesystem::path("frames") / (std::string(id) + ".png"), Label::Normal,
                    std::to_string((i / 4) % spec.n_patients + 1), ""};
        g.kind = kind;
        plan.emplace_back(std::move(g), scene_preset(kind, spec.nx, spec.ny, derive_seed(spec.seed, frame_no++)));
    }
    return plan;
}

std::vector<GeneratedFrame> generate_dataset(const DatasetSpec& spec, const std::filesystem::path& dir) {
    auto plan = plan_dataset(spec);
    std::error_code ec;
    std::filesystem::create_directories(dir / "frames", ec);
    if (ec) throw IoError("cannot create dataset directory " + dir.string() + ": " + ec.message());

    detail::parallel_for(plan.size(), spec.threads, [&](std::size_t i) {
        const PhantomFrame f = generate_frame(plan[i].second);
        write_image(dir / plan[i].first.record.path, f.image);
    });

    std::vector<GeneratedFrame> out;
    std::vector<FrameRecord> records;
    std::ofstream scenes(dir / "scenes.csv");
    if (!scenes) throw IoError("cannot write " + (dir / "scenes.csv").string());
    scenes << "frame_id,kind,radius,center_x,center_y\n";
    char buf[128];
    for (auto& [g, s] : plan) {
        records.push_back(g.record);
        if (g.polyp_radius) {
            std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f", *g.polyp_radius, g.polyp_center->x, g.polyp_center->y);
        } else {
            std::snprintf(buf, sizeof buf, ",,");
        }
        scenes << g.record.frame_id << "," << to_string(g.kind) << "," << buf << "\n";
        GeneratedFrame abs = g;
        abs.record.path = dir / g.record.path;
        out.push_back(std::move(abs));
    }
    if (!scenes) throw IoError("failed writing scenes.csv");
    write_manifest(dir / "manifest.csv", records);
    return out;
}

}  // namespace polypdet
