// homsim: two-photon interference in lossy two-mode directional couplers.
// Subcommands: sweep-coupler, simulate, fit, find-splitter.
// Exit codes: 0 success, 2 input/config error, 3 degenerate physics,
// 4 fit non-convergence.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "homsim/coupled_mode.hpp"
#include "homsim/csv_io.hpp"
#include "homsim/experiment_sim.hpp"
#include "homsim/fitting.hpp"
#include "homsim/run_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitNoConvergence = 4;

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& warning : warnings) {
        std::cerr << "warning: " << warning << '\n';
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw homsim::ValidationError("cannot open output file '" + path + "'");
    }
    return out;
}

// Precedence: --seed flag, then HOMSIM_SEED, then the config file, then 1.
std::uint64_t resolve_seed(const homsim::RunConfig& config,
                           const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) {
        return *flag_seed;
    }
    if (const char* env = std::getenv("HOMSIM_SEED")) {
        const std::string text(env);
        if (text.empty() || text.front() == '-' || text.front() == '+') {
            throw homsim::ValidationError("HOMSIM_SEED must be an unsigned integer, got '" +
                                          text + "'");
        }
        char* end = nullptr;
        const unsigned long long parsed = std::strtoull(text.c_str(), &end, 10);
        if (end != text.c_str() + text.size()) {
            throw homsim::ValidationError("HOMSIM_SEED must be an unsigned integer, got '" +
                                          text + "'");
        }
        return parsed;
    }
    return config.rng_seed.value_or(1);
}

void write_sweep_gnuplot(const std::string& script_path, const std::string& csv_path) {
    auto out = open_output(script_path);
    out << "# gnuplot script; run: gnuplot -p " << script_path << "\n"
        << "set datafile separator ','\n"
        << "set xlabel 'coupling length (um)'\n"
        << "set ylabel 'probability'\n"
        << "set yrange [0:1.05]\n"
        << "plot '" << csv_path << "' skip 1 using 1:5 with linespoints title 'bunching P', \\\n"
        << "     '" << csv_path << "' skip 1 using 1:4 with lines title 'throughput'\n";
}

void write_records_gnuplot(const std::string& script_path, const std::string& csv_path) {
    auto out = open_output(script_path);
    out << "# gnuplot script; run: gnuplot -p " << script_path << "\n"
        << "set datafile separator ','\n"
        << "set xlabel 'stage position (um)'\n"
        << "set ylabel 'coincidence counts'\n"
        << "plot '" << csv_path << "' skip 1 using 1:2 with points pt 7 title 'counts'\n";
}

void write_fit_gnuplot(const std::string& script_path, const std::string& csv_path,
                       const homsim::FitResult& fit) {
    auto out = open_output(script_path);
    const char sign = fit.params.polarity == homsim::Polarity::peak ? '+' : '-';
    out << "# gnuplot script; run: gnuplot -p " << script_path << "\n"
        << "set datafile separator ','\n"
        << "set xlabel 'stage position (um)'\n"
        << "set ylabel 'coincidence counts'\n"
        << "C = " << homsim::format_double(fit.params.baseline) << "\n"
        << "V = " << homsim::format_double(fit.params.visibility) << "\n"
        << "Lc = " << homsim::format_double(fit.params.coherence_length_um) << "\n"
        << "x0 = " << homsim::format_double(fit.params.center_um) << "\n"
        << "f(x) = C * (1 " << sign << " V * exp(-((x - x0) / Lc)**2))\n"
        << "plot '" << csv_path << "' skip 1 using 1:2 with points pt 7 title 'counts', \\\n"
        << "     f(x) with lines title 'fit'\n";
}

struct SweepArgs {
    std::string config_path;
    std::string out_path;
    std::vector<double> lengths;
    std::uint64_t branches = 0;
    bool gnuplot = false;
};

int run_sweep(const SweepArgs& args) {
    const auto config = homsim::load_run_config(args.config_path);
    std::vector<std::string> warnings;
    const auto spec = homsim::coupler_from_config(config, false, &warnings);
    print_warnings(warnings);

    std::vector<double> lengths;
    if (args.branches > 0) {
        if (spec.delta_real() == 0.0) {
            throw homsim::DegenerateInputError(
                "equal supermode indices: no beating, the coupler never splits 50/50");
        }
        // max length 2N quarter-beats covers exactly the first N odd multiples
        const double quarter_beat =
            spec.wavelength_um / (4.0 * std::abs(spec.delta_real()));
        lengths = homsim::find_5050_lengths(spec.n_symmetric, spec.n_antisymmetric,
                                            spec.wavelength_um,
                                            2.0 * static_cast<double>(args.branches) *
                                                quarter_beat);
    } else {
        lengths = args.lengths;
        for (double length : lengths) {
            if (!(length >= 0.0)) {
                throw homsim::ValidationError("--lengths values must be >= 0, got " +
                                              homsim::format_double(length));
            }
        }
    }

    const auto rows = homsim::sweep_bunching_vs_length(spec.n_symmetric, spec.n_antisymmetric,
                                                       spec.wavelength_um, lengths);
    auto out = open_output(args.out_path);
    homsim::write_sweep_csv(out, rows);
    std::cout << "wrote " << rows.size() << " sweep rows to " << args.out_path << '\n';
    if (args.gnuplot) {
        write_sweep_gnuplot(args.out_path + ".gp", args.out_path);
        std::cout << "wrote plot script " << args.out_path << ".gp\n";
    }
    return kExitOk;
}

struct SimulateArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    bool gnuplot = false;
};

int run_simulate(const SimulateArgs& args) {
    const auto config = homsim::load_run_config(args.config_path);
    std::vector<std::string> warnings;
    auto experiment = homsim::experiment_from_config(config, &warnings);
    print_warnings(warnings);
    experiment.rng_seed = resolve_seed(config, args.seed);

    const auto records = homsim::simulate(experiment);
    auto out = open_output(args.out_path);
    homsim::write_records_csv(out, records);
    std::cout << "wrote " << records.size() << " records to " << args.out_path
              << " (seed " << experiment.rng_seed << ")\n";
    if (args.gnuplot) {
        write_records_gnuplot(args.out_path + ".gp", args.out_path);
        std::cout << "wrote plot script " << args.out_path << ".gp\n";
    }
    return kExitOk;
}

struct FitArgs {
    std::string data_path;
    std::string out_path;
    std::string polarity;
    std::string config_path;
    std::uint64_t max_iterations = 0; // 0 = not set
    bool gnuplot = false;
};

void write_fit_report(std::ostream& out, const homsim::FitResult& fit) {
    const char sign = fit.params.polarity == homsim::Polarity::peak ? '+' : '-';
    out << "# interference fit report\n"
        << "# model: counts = C * (1 " << sign << " V * exp(-((x - center) / L_c)^2))\n"
        << "# converged: " << (fit.converged ? "yes" : "no") << " after " << fit.iterations
        << " iterations\n"
        << "# weighted_rss: " << homsim::format_double(fit.weighted_rss) << "\n"
        << "# gradient_inf_norm: " << homsim::format_double(fit.gradient_inf_norm) << "\n"
        << "param,value,std_error\n"
        << "baseline_counts," << homsim::format_double(fit.params.baseline) << ','
        << homsim::format_double(fit.std_errors[0]) << '\n'
        << "visibility," << homsim::format_double(fit.params.visibility) << ','
        << homsim::format_double(fit.std_errors[1]) << '\n'
        << "coherence_length_um," << homsim::format_double(fit.params.coherence_length_um)
        << ',' << homsim::format_double(fit.std_errors[2]) << '\n'
        << "center_um," << homsim::format_double(fit.params.center_um) << ','
        << homsim::format_double(fit.std_errors[3]) << '\n';
}

int run_fit(const FitArgs& args) {
    const auto rows = homsim::load_dataset_csv(args.data_path);
    const auto points = homsim::fit_points_from_rows(rows);

    homsim::FitOptions options;
    if (!args.config_path.empty()) {
        options = homsim::fit_options_from_config(homsim::load_run_config(args.config_path));
    }
    if (args.max_iterations > 0) {
        if (args.max_iterations > 1000000) {
            throw homsim::ValidationError("--max-iterations must be <= 1e6");
        }
        options.max_iterations = static_cast<int>(args.max_iterations);
    }
    const auto polarity =
        args.polarity == "peak" ? homsim::Polarity::peak : homsim::Polarity::dip;

    const auto fit = homsim::fit_dip(std::span<const homsim::FitPoint>(points), polarity,
                                     options);
    auto out = open_output(args.out_path);
    write_fit_report(out, fit);
    write_fit_report(std::cout, fit);
    if (args.gnuplot) {
        write_fit_gnuplot(args.out_path + ".gp", args.data_path, fit);
        std::cout << "wrote plot script " << args.out_path << ".gp\n";
    }
    if (!fit.converged) {
        std::cerr << "error: fit did not converge after " << fit.iterations
                  << " iterations\n";
        return kExitNoConvergence;
    }
    return kExitOk;
}

struct FindSplitterArgs {
    std::string config_path;
    double max_length_um = 0.0;
};

int run_find_splitter(const FindSplitterArgs& args) {
    const auto config = homsim::load_run_config(args.config_path);
    std::vector<std::string> warnings;
    const auto spec = homsim::coupler_from_config(config, false, &warnings);
    print_warnings(warnings);

    const auto lengths = homsim::find_5050_lengths(spec.n_symmetric, spec.n_antisymmetric,
                                                   spec.wavelength_um, args.max_length_um);
    std::cout << "m,length_um,P,throughput\n";
    for (std::size_t m = 0; m < lengths.size(); ++m) {
        homsim::CouplerSpec at_length = spec;
        at_length.length_um = lengths[m];
        const auto amps = homsim::coupler_coefficients(at_length);
        const auto ratio = homsim::splitting_ratio(amps);
        std::cout << m << ',' << homsim::format_double(lengths[m]) << ','
                  << homsim::format_double(homsim::bunching_probability(amps)) << ','
                  << homsim::format_double(ratio.throughput) << '\n';
    }
    return kExitOk;
}

template <typename Handler>
int guarded(Handler&& handler) {
    try {
        return handler();
    } catch (const homsim::DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const homsim::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-photon interference in lossy two-mode directional couplers: "
                 "coupler sweeps, coincidence simulation, dip/peak fitting"};
    app.set_version_flag("--version", "homsim 1.0.0");
    app.require_subcommand(1);

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand(
        "sweep-coupler", "Evaluate splitting and bunching probability versus coupling length");
    sweep->add_option("config", sweep_args.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* lengths_opt = sweep->add_option("--lengths", sweep_args.lengths,
                                          "comma-separated coupling lengths in um")
                            ->delimiter(',');
    auto* branches_opt =
        sweep->add_option("--at-5050-branches", sweep_args.branches,
                          "evaluate at the first N 50/50 branch lengths")
            ->check(CLI::PositiveNumber);
    lengths_opt->excludes(branches_opt);
    branches_opt->excludes(lengths_opt);
    sweep->add_option("--out", sweep_args.out_path, "output CSV path")->required();
    sweep->add_flag("--gnuplot", sweep_args.gnuplot, "also write a gnuplot script");

    SimulateArgs simulate_args;
    std::uint64_t simulate_seed = 0;
    auto* simulate = app.add_subcommand(
        "simulate", "Generate a Poisson coincidence dataset versus stage position");
    simulate->add_option("config", simulate_args.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* seed_opt = simulate->add_option(
        "--seed", simulate_seed, "RNG seed (overrides HOMSIM_SEED and the config file)");
    simulate->add_option("--out", simulate_args.out_path, "output CSV path")->required();
    simulate->add_flag("--gnuplot", simulate_args.gnuplot, "also write a gnuplot script");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit a dip/peak interference model to a dataset");
    fit->add_option("data", fit_args.data_path, "input CSV dataset")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--polarity", fit_args.polarity, "dip or peak")
        ->required()
        ->check(CLI::IsMember({"dip", "peak"}));
    fit->add_option("--out", fit_args.out_path, "fit report output path")->required();
    fit->add_option("--config", fit_args.config_path,
                    "optional run configuration supplying fit options")
        ->check(CLI::ExistingFile);
    fit->add_option("--max-iterations", fit_args.max_iterations,
                    "override the solver iteration cap")
        ->check(CLI::PositiveNumber);
    fit->add_flag("--gnuplot", fit_args.gnuplot, "also write a gnuplot script");

    FindSplitterArgs splitter_args;
    auto* splitter = app.add_subcommand(
        "find-splitter", "List 50/50 coupling lengths with bunching and throughput");
    splitter->add_option("config", splitter_args.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    splitter->add_option("--max-length-um", splitter_args.max_length_um,
                         "largest coupling length to consider")
        ->required()
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    if (sweep->parsed()) {
        if (lengths_opt->count() == 0 && branches_opt->count() == 0) {
            std::cerr << "error: sweep-coupler needs --lengths or --at-5050-branches\n";
            return kExitInput;
        }
        return guarded([&] { return run_sweep(sweep_args); });
    }
    if (simulate->parsed()) {
        if (seed_opt->count() > 0) {
            simulate_args.seed = simulate_seed;
        }
        return guarded([&] { return run_simulate(simulate_args); });
    }
    if (fit->parsed()) {
        return guarded([&] { return run_fit(fit_args); });
    }
    if (splitter->parsed()) {
        return guarded([&] { return run_find_splitter(splitter_args); });
    }
    std::cerr << "error: no subcommand given\n";
    return kExitInput;
}
