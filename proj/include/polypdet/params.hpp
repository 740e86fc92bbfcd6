#pragma once

// All tunables of the per-frame pipeline in one validated record.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace polypdet {

struct PipelineParams {
    int nx = 256;
    int ny = 256;
    double r_mask = 0.45 * 256;
    int n_iter = 5;
    double sigma_t = 5;
    double sigma = 11;  // ceil(N_x / 25)
    double p = 0.8;
    double t_low = 3;
    double t_high = 8;
    double sigma1 = 7;
    double sigma2 = 30;
    double m_low = 0.11;
    double m_high = 0.16;
    double s_low = 292;   // ceil((N_x / 15)^2)
    double s_high = 3237; // ceil((N_x / 4.5)^2)
    double e_max = 6.5;
    int r_p = 37;
    // Blend-weight ramp of the cartoon/texture split.
    double knot_low = 0.25;
    double knot_high = 0.5;

    /// Default values for an N_x x N_y frame, with the size-dependent
    /// entries (R_mask, sigma, S_L, S_U) derived from N_x.
    static PipelineParams defaults(int nx = 256, int ny = 256);

    /// Throws ParameterError on the first violated constraint.
    void validate() const;

    /// Names accepted by get/set, in canonical order.
    static const std::vector<std::string>& names();
    static bool is_integer(std::string_view name);
    double get(std::string_view name) const;
    /// Throws ParameterError for unknown names or non-integral values of
    /// integer parameters. Does not validate the whole record.
    void set(std::string_view name, double value);

    /// One "name=value" line per parameter.
    std::string to_text() const;
    /// Stable 64-bit FNV-1a hash of every parameter that influences scores
    /// (everything except R_P), as 16 hex digits.
    std::string score_hash() const;

    friend bool operator==(const PipelineParams&, const PipelineParams&) = default;
};

/// Applies "key = value" lines (blank lines and '#' comments ignored).
/// Throws ParseError with the line number on malformed input.
void apply_param_text(PipelineParams& params, std::string_view text);
void apply_param_file(PipelineParams& params, const std::filesystem::path& path);
/// Applies one "key=value" override.
void apply_param_assignment(PipelineParams& params, std::string_view assignment);

/// The +10% perturbation of a parameter; integer parameters round up.
double perturb_up_10pct(std::string_view name, double base);

}  // namespace polypdet
