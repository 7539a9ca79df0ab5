// Times the parallel kernels against their serial reference implementations
// and checks that both produce identical output.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "homsim/coupled_mode.hpp"
#include "homsim/experiment_sim.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double best_of_ms(int repeats, Fn&& fn) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto start = Clock::now();
        fn();
        const auto stop = Clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(stop - start).count());
    }
    return best;
}

bool rows_identical(const std::vector<homsim::SweepRow>& a,
                    const std::vector<homsim::SweepRow>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].length_um != b[i].length_um || a[i].reflectance != b[i].reflectance ||
            a[i].transmittance != b[i].transmittance || a[i].throughput != b[i].throughput ||
            a[i].bunching != b[i].bunching || a[i].ok != b[i].ok || a[i].error != b[i].error) {
            return false;
        }
    }
    return true;
}

bool records_identical(const std::vector<homsim::CoincidenceRecord>& a,
                       const std::vector<homsim::CoincidenceRecord>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].stage_position_um != b[i].stage_position_um || a[i].counts != b[i].counts ||
            a[i].integration_time_s != b[i].integration_time_s) {
            return false;
        }
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    std::size_t sweep_points = 2000000;
    std::size_t sim_points = 200000;
    int repeats = 3;

    CLI::App app{"homsim kernel benchmark: serial reference vs parallel"};
    app.add_option("--sweep-points", sweep_points, "lengths in the coupler sweep");
    app.add_option("--sim-points", sim_points, "stage positions in the simulation");
    app.add_option("--repeat", repeats, "repetitions, best time reported")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("threads: %d\n\n", threads);
    std::printf("%-28s %10s %12s %12s %9s %10s\n", "kernel", "points", "serial_ms",
                "parallel_ms", "speedup", "identical");

    // Lossy coupler at the scales the sweeps target.
    const homsim::ComplexIndex n_sym{1.318, 0.00426};
    const homsim::ComplexIndex n_anti{1.150, 0.00437};
    const double wavelength = 1.55;

    {
        std::vector<double> lengths(sweep_points);
        for (std::size_t i = 0; i < sweep_points; ++i) {
            lengths[i] = 200.0 * static_cast<double>(i + 1) / static_cast<double>(sweep_points);
        }
        std::vector<homsim::SweepRow> serial_rows;
        std::vector<homsim::SweepRow> parallel_rows;
        const double serial_ms = best_of_ms(repeats, [&] {
            serial_rows =
                homsim::sweep_bunching_vs_length_serial(n_sym, n_anti, wavelength, lengths);
        });
        const double parallel_ms = best_of_ms(repeats, [&] {
            parallel_rows = homsim::sweep_bunching_vs_length(n_sym, n_anti, wavelength, lengths);
        });
        std::printf("%-28s %10zu %12.1f %12.1f %9.2f %10s\n", "sweep_bunching_vs_length",
                    sweep_points, serial_ms, parallel_ms, serial_ms / parallel_ms,
                    rows_identical(serial_rows, parallel_rows) ? "yes" : "NO");
    }

    {
        homsim::ExperimentConfig config;
        config.coupler = homsim::CouplerSpec{n_sym, n_anti, wavelength, 2.306547619047619};
        config.overlap = homsim::OverlapModel{162.6, 0.0};
        config.visibility_cap = 0.955;
        config.efficiency_arm1 = 0.3;
        config.efficiency_arm2 = 0.3;
        config.stage_positions_um = homsim::make_stage_grid(-500.0, 500.0, sim_points);
        config.rng_seed = 20260817;

        std::vector<homsim::CoincidenceRecord> serial_records;
        std::vector<homsim::CoincidenceRecord> parallel_records;
        const double serial_ms =
            best_of_ms(repeats, [&] { serial_records = homsim::simulate_serial(config); });
        const double parallel_ms =
            best_of_ms(repeats, [&] { parallel_records = homsim::simulate(config); });
        std::printf("%-28s %10zu %12.1f %12.1f %9.2f %10s\n", "simulate", sim_points,
                    serial_ms, parallel_ms, serial_ms / parallel_ms,
                    records_identical(serial_records, parallel_records) ? "yes" : "NO");
    }

    return 0;
}
