#include "polypdet/params.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include "polypdet/error.hpp"

namespace polypdet {

namespace {

using Member = std::variant<int PipelineParams::*, double PipelineParams::*>;

struct Entry {
    const char* name;
    Member member;
};

const std::array<Entry, 19>& table() {
    static const std::array<Entry, 19> entries{{
        {"N_x", &PipelineParams::nx},
        {"N_y", &PipelineParams::ny},
        {"R_mask", &PipelineParams::r_mask},
        {"n_iter", &PipelineParams::n_iter},
        {"sigma_t", &PipelineParams::sigma_t},
        {"sigma", &PipelineParams::sigma},
        {"p", &PipelineParams::p},
        {"T_L", &PipelineParams::t_low},
        {"T_U", &PipelineParams::t_high},
        {"sigma1", &PipelineParams::sigma1},
        {"sigma2", &PipelineParams::sigma2},
        {"M_L", &PipelineParams::m_low},
        {"M_U", &PipelineParams::m_high},
        {"S_L", &PipelineParams::s_low},
        {"S_U", &PipelineParams::s_high},
        {"E_max", &PipelineParams::e_max},
        {"R_P", &PipelineParams::r_p},
        {"knot_low", &PipelineParams::knot_low},
        {"knot_high", &PipelineParams::knot_high},
    }};
    return entries;
}

// Stored as doubles but integral by definition.
constexpr std::array<std::string_view, 4> kIntegralDoubles{"sigma1", "sigma2", "S_L", "S_U"};

const Entry& lookup(std::string_view name) {
    for (const Entry& e : table())
        if (name == e.name) return e;
    throw ParameterError("unknown parameter '" + std::string(name) + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(std::string_view s, long line) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) throw ParseError("not a number: '" + std::string(s) + "'", line);
    return v;
}

void apply_line(PipelineParams& params, std::string_view line, long lineno) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", lineno);
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) throw ParseError("expected key=value", lineno);
    params.set(key, parse_number(val, lineno));
}

}  // namespace

PipelineParams PipelineParams::defaults(int nx, int ny) {
    PipelineParams p;
    p.nx = nx;
    p.ny = ny;
    p.r_mask = 0.45 * nx;
    p.sigma = std::ceil(nx / 25.0);
    p.s_low = std::ceil((nx / 15.0) * (nx / 15.0));
    p.s_high = std::ceil((nx / 4.5) * (nx / 4.5));
    return p;
}

void PipelineParams::validate() const {
    auto fail = [](const std::string& w) { throw ParameterError(w); };
    if (nx < 8 || ny < 8) fail("frame dimensions must be at least 8");
    if (!(r_mask > 0.0 && r_mask <= std::min(nx, ny) / 2.0)) fail("R_mask must be in (0, min(N_x, N_y)/2]");
    if (n_iter < 1) fail("n_iter must be >= 1");
    if (!(sigma_t >= 1.0)) fail("sigma_t must be >= 1");
    if (!(sigma >= 1.0)) fail("sigma must be >= 1");
    if (!(p > 0.0 && p <= 1.0)) fail("p must be in (0, 1]");
    if (!(0.0 <= t_low && t_low < t_high)) fail("pre-selection bounds require 0 <= T_L < T_U");
    if (!(sigma1 >= 1.0 && sigma1 < sigma2)) fail("mid-pass requires 1 <= sigma1 < sigma2");
    if (!(0.0 < m_low && m_low < m_high)) fail("threshold bounds require 0 < M_L < M_U");
    if (!(0.0 < s_low && s_low < s_high)) fail("size bounds require 0 < S_L < S_U");
    if (!(e_max >= 1.0)) fail("E_max must be >= 1");
    if (r_p < 1) fail("R_P must be positive");
    if (!(knot_low < knot_high)) fail("decomposition knots require knot_low < knot_high");
}

const std::vector<std::string>& PipelineParams::names() {
    static const std::vector<std::string> n = [] {
        std::vector<std::string> v;
        for (const Entry& e : table()) v.emplace_back(e.name);
        return v;
    }();
    return n;
}

bool PipelineParams::is_integer(std::string_view name) {
    const Entry& e = lookup(name);
    return std::holds_alternative<int PipelineParams::*>(e.member) ||
           std::find(kIntegralDoubles.begin(), kIntegralDoubles.end(), name) != kIntegralDoubles.end();
}

double PipelineParams::get(std::string_view name) const {
    const Entry& e = lookup(name);
    return std::visit([this](auto m) { return static_cast<double>(this->*m); }, e.member);
}

void PipelineParams::set(std::string_view name, double value) {
    const Entry& e = lookup(name);
    if (!std::isfinite(value)) throw ParameterError("parameter " + std::string(name) + " must be finite");
    if (is_integer(name) && value != std::floor(value)) {
        throw ParameterError("parameter " + std::string(name) + " must be an integer");
    }
    std::visit(
        [&](auto m) {
            using T = std::remove_reference_t<decltype(this->*m)>;
            this->*m = static_cast<T>(value);
        },
        e.member);
}

std::string PipelineParams::to_text() const {
    std::string out;
    for (const Entry& e : table()) out += std::string(e.name) + "=" + format_double(get(e.name)) + "\n";
    return out;
}

std::string PipelineParams::score_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const Entry& e : table()) {
        if (std::string_view(e.name) == "R_P") continue;
        const std::string line = std::string(e.name) + "=" + format_double(get(e.name)) + "\n";
        for (unsigned char ch : line) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_param_text(PipelineParams& params, std::string_view text) {
    long lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            try {
                apply_line(params, line, lineno);
            } catch (const ParameterError& e) {
                throw ParseError(e.what(), lineno);
            }
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

void apply_param_file(PipelineParams& params, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open params file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    apply_param_text(params, ss.str());
}

void apply_param_assignment(PipelineParams& params, std::string_view assignment) {
    apply_line(params, trim(assignment), 1);
}

double perturb_up_10pct(std::string_view name, double base) {
    if (PipelineParams::is_integer(name)) {
        // ceil(1.1 * X) in exact integer arithmetic: 1.1 * 30 must give 33, not 34.
        const auto x = static_cast<long long>(base);
        const long long num = 11 * x;
        return static_cast<double>(num >= 0 ? (num + 9) / 10 : num / 10);
    }
    return 1.1 * base;
}

}  // namespace polypdet
