#pragma once

#include <cstdint>
#include <vector>

#include "homsim/coupled_mode.hpp"
#include "homsim/fock_interference.hpp"

namespace homsim {

enum class InterferometerKind {
    standard_hom, // coincidences across the two coupler outputs: a dip
    modified      // coincidences across one split output: a peak
};

struct CoincidenceRecord {
    double stage_position_um = 0.0;
    std::uint64_t counts = 0;
    double integration_time_s = 0.0;
};

struct ExperimentConfig {
    double pair_rate_hz = 7000.0;
    double efficiency_arm1 = 0.3;
    double efficiency_arm2 = 0.3;
    double integration_time_s = 1.0;
    std::vector<double> stage_positions_um; // strictly increasing
    InterferometerKind configuration = InterferometerKind::standard_hom;
    CouplerSpec coupler;
    OverlapModel overlap;
    // Scales the achievable overlap, modelling residual distinguishability:
    // x' = visibility_cap * overlap(position).
    double visibility_cap = 1.0;
    double background_rate_hz = 0.0; // accidental floor, default none
    std::uint64_t rng_seed = 1;

    void validate() const;
};

// Evenly spaced stage grid with exact endpoints, points >= 2.
std::vector<double> make_stage_grid(double min_um, double max_um, std::size_t points);

// Mean coincidence rate (Hz) at one stage position:
//   pair_rate * eff1 * eff2 * p(x') + background.
double expected_coincidence_rate(const ExperimentConfig& config, double stage_position_um);

// Draws Poisson counts per stage position. Each position uses its own counter
// derived RNG stream keyed by (rng_seed, position index), so results do not
// depend on evaluation order or thread count: simulate() runs the positions
// in parallel (OpenMP when available) and is bit-identical to
// simulate_serial(). Throws ValidationError if any expected count exceeds
// 1e12.
std::vector<CoincidenceRecord> simulate(const ExperimentConfig& config);
std::vector<CoincidenceRecord> simulate_serial(const ExperimentConfig& config);

} // namespace homsim
