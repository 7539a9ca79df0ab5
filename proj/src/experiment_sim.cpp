#include "homsim/experiment_sim.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "homsim/rng.hpp"

namespace homsim {

void ExperimentConfig::validate() const {
    if (!(pair_rate_hz > 0.0)) {
        throw ValidationError("pair_rate_hz must be > 0, got " + std::to_string(pair_rate_hz));
    }
    if (!(efficiency_arm1 >= 0.0 && efficiency_arm1 <= 1.0)) {
        throw ValidationError("efficiency_arm1 must be in [0, 1], got " +
                              std::to_string(efficiency_arm1));
    }
    if (!(efficiency_arm2 >= 0.0 && efficiency_arm2 <= 1.0)) {
        throw ValidationError("efficiency_arm2 must be in [0, 1], got " +
                              std::to_string(efficiency_arm2));
    }
    if (!(integration_time_s > 0.0)) {
        throw ValidationError("integration_time_s must be > 0, got " +
                              std::to_string(integration_time_s));
    }
    if (stage_positions_um.empty()) {
        throw ValidationError("stage_positions_um must contain at least one position");
    }
    for (std::size_t i = 0; i + 1 < stage_positions_um.size(); ++i) {
        if (!(stage_positions_um[i] < stage_positions_um[i + 1])) {
            throw ValidationError("stage_positions_um must be strictly increasing (violated at index " +
                                  std::to_string(i + 1) + ")");
        }
    }
    if (!(visibility_cap >= 0.0 && visibility_cap <= 1.0)) {
        throw ValidationError("visibility_cap must be in [0, 1], got " +
                              std::to_string(visibility_cap));
    }
    if (!(background_rate_hz >= 0.0)) {
        throw ValidationError("background_rate_hz must be >= 0, got " +
                              std::to_string(background_rate_hz));
    }
    coupler.validate();
    overlap.validate();
}

std::vector<double> make_stage_grid(double min_um, double max_um, std::size_t points) {
    if (points < 2) {
        throw ValidationError("stage grid needs at least 2 points");
    }
    if (!(min_um < max_um)) {
        throw ValidationError("stage grid needs min < max");
    }
    std::vector<double> grid(points);
    const double span = max_um - min_um;
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = min_um + span * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    grid.back() = max_um;
    return grid;
}

namespace {

double rate_at(const ExperimentConfig& config, const ScatteringAmplitudes& amps,
               double stage_position_um) {
    const double x = config.visibility_cap * overlap(config.overlap, stage_position_um);
    const double p = config.configuration == InterferometerKind::standard_hom
                         ? hom_coincidence_probability(amps, x)
                         : modified_coincidence_probability(amps, x);
    return config.pair_rate_hz * config.efficiency_arm1 * config.efficiency_arm2 * p +
           config.background_rate_hz;
}

} // namespace

double expected_coincidence_rate(const ExperimentConfig& config, double stage_position_um) {
    config.validate();
    return rate_at(config, coupler_coefficients(config.coupler), stage_position_um);
}

namespace {

constexpr double kMaxExpectedCounts = 1e12;

// validate() is the caller's job; repeating it per point would make this pass
// quadratic in the grid size
std::vector<double> expected_counts_per_point(const ExperimentConfig& config) {
    const auto amps = coupler_coefficients(config.coupler);
    std::vector<double> means(config.stage_positions_um.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        means[i] = rate_at(config, amps, config.stage_positions_um[i]) *
                   config.integration_time_s;
        if (!(means[i] <= kMaxExpectedCounts)) {
            throw ValidationError("expected counts " + std::to_string(means[i]) +
                                  " at stage position " +
                                  std::to_string(config.stage_positions_um[i]) +
                                  " exceed 1e12; reduce rate or integration time");
        }
    }
    return means;
}

CoincidenceRecord draw_point(const ExperimentConfig& config, double mean, std::size_t index) {
    auto stream = rng::substream(config.rng_seed, index);
    return {config.stage_positions_um[index], rng::poisson_sample(mean, stream),
            config.integration_time_s};
}

} // namespace

std::vector<CoincidenceRecord> simulate_serial(const ExperimentConfig& config) {
    config.validate();
    const auto means = expected_counts_per_point(config);
    std::vector<CoincidenceRecord> records(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        records[i] = draw_point(config, means[i], i);
    }
    return records;
}

std::vector<CoincidenceRecord> simulate(const ExperimentConfig& config) {
    config.validate();
    const auto means = expected_counts_per_point(config);
    std::vector<CoincidenceRecord> records(means.size());
    const std::int64_t n = static_cast<std::int64_t>(means.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        records[static_cast<std::size_t>(i)] =
            draw_point(config, means[static_cast<std::size_t>(i)], static_cast<std::size_t>(i));
    }
    return records;
}

} // namespace homsim
