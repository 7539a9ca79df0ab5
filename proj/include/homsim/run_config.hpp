#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homsim/experiment_sim.hpp"
#include "homsim/fitting.hpp"

namespace homsim {

// Parsed key = value run configuration. Everything is optional at parse time;
// each command demands the keys it needs and applies its own defaults, so one
// file can drive sweeps, simulations and fits.
struct RunConfig {
    std::optional<std::string> configuration; // "standard_hom" or "modified"

    std::optional<double> wavelength_um;
    std::optional<double> length_um;
    std::optional<double> n_symmetric_real;
    std::optional<double> n_symmetric_imag;
    std::optional<double> n_antisymmetric_real;
    std::optional<double> n_antisymmetric_imag;

    std::optional<double> pair_rate_hz;
    std::optional<double> efficiency_arm1;
    std::optional<double> efficiency_arm2;
    std::optional<double> integration_time_s;
    std::optional<double> background_rate_hz;
    std::optional<double> visibility_cap;
    std::optional<std::uint64_t> rng_seed;

    std::optional<double> stage_min_um;
    std::optional<double> stage_max_um;
    std::optional<std::uint64_t> stage_points;

    std::optional<double> coherence_length_um;
    std::optional<double> center_offset_um;

    std::optional<std::uint64_t> fit_max_iterations;
    std::optional<double> fit_cost_tolerance;
};

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
// Unknown keys, duplicate keys and unparsable values are rejected with the
// 1-based line number in the message.
RunConfig parse_run_config_text(std::string_view text);
RunConfig load_run_config(const std::string& path);

// Builders. Missing required keys raise ValidationError naming the key.
// A negative n_*_imag value is folded to its magnitude and reported through
// *warnings when given.

// length_um is required unless require_length is false (sweeps supply their
// own lengths).
CouplerSpec coupler_from_config(const RunConfig& config, bool require_length,
                                std::vector<std::string>* warnings = nullptr);
OverlapModel overlap_from_config(const RunConfig& config);
ExperimentConfig experiment_from_config(const RunConfig& config,
                                        std::vector<std::string>* warnings = nullptr);
FitOptions fit_options_from_config(const RunConfig& config);

} // namespace homsim
