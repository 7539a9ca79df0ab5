#include "homsim/run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace homsim {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(std::size_t line_no, const std::string& message) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + message);
}

double parse_double_value(const std::string& value, std::size_t line_no, const std::string& key) {
    char* end = nullptr;
    const double parsed = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || !std::isfinite(parsed)) {
        fail(line_no, "cannot parse value '" + value + "' for key '" + key + "' as a number");
    }
    return parsed;
}

std::uint64_t parse_u64_value(const std::string& value, std::size_t line_no,
                              const std::string& key) {
    if (value.empty() || value.front() == '-' || value.front() == '+') {
        fail(line_no, "key '" + key + "' needs an unsigned integer, got '" + value + "'");
    }
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size()) {
        fail(line_no, "cannot parse value '" + value + "' for key '" + key +
                          "' as an unsigned integer");
    }
    return parsed;
}

void assign_key(RunConfig& config, const std::string& key, const std::string& value,
                std::size_t line_no) {
    if (key == "configuration") {
        if (value != "standard_hom" && value != "modified") {
            fail(line_no, "configuration must be 'standard_hom' or 'modified', got '" + value +
                              "'");
        }
        config.configuration = value;
        return;
    }
    if (key == "rng_seed") {
        config.rng_seed = parse_u64_value(value, line_no, key);
        return;
    }
    if (key == "stage_points") {
        config.stage_points = parse_u64_value(value, line_no, key);
        return;
    }
    if (key == "fit_max_iterations") {
        config.fit_max_iterations = parse_u64_value(value, line_no, key);
        return;
    }

    struct DoubleKey {
        const char* name;
        std::optional<double> RunConfig::* field;
    };
    static constexpr DoubleKey double_keys[] = {
        {"wavelength_um", &RunConfig::wavelength_um},
        {"length_um", &RunConfig::length_um},
        {"n_symmetric_real", &RunConfig::n_symmetric_real},
        {"n_symmetric_imag", &RunConfig::n_symmetric_imag},
        {"n_antisymmetric_real", &RunConfig::n_antisymmetric_real},
        {"n_antisymmetric_imag", &RunConfig::n_antisymmetric_imag},
        {"pair_rate_hz", &RunConfig::pair_rate_hz},
        {"efficiency_arm1", &RunConfig::efficiency_arm1},
        {"efficiency_arm2", &RunConfig::efficiency_arm2},
        {"integration_time_s", &RunConfig::integration_time_s},
        {"background_rate_hz", &RunConfig::background_rate_hz},
        {"visibility_cap", &RunConfig::visibility_cap},
        {"stage_min_um", &RunConfig::stage_min_um},
        {"stage_max_um", &RunConfig::stage_max_um},
        {"coherence_length_um", &RunConfig::coherence_length_um},
        {"center_offset_um", &RunConfig::center_offset_um},
        {"fit_cost_tolerance", &RunConfig::fit_cost_tolerance},
    };
    for (const auto& entry : double_keys) {
        if (key == entry.name) {
            config.*(entry.field) = parse_double_value(value, line_no, key);
            return;
        }
    }
    fail(line_no, "unknown key '" + key + "'");
}

template <typename T>
T require_key(const std::optional<T>& field, const char* key) {
    if (!field) {
        throw ValidationError(std::string("missing required config key '") + key + "'");
    }
    return *field;
}

ComplexIndex index_from_config(const std::optional<double>& real,
                               const std::optional<double>& imag, const char* real_key,
                               const char* imag_key, std::vector<std::string>* warnings) {
    bool flipped = false;
    const ComplexIndex index =
        ComplexIndex::from_effective_index(require_key(real, real_key), imag.value_or(0.0),
                                           &flipped);
    if (flipped && warnings != nullptr) {
        warnings->push_back(std::string(imag_key) +
                            " is negative; using its magnitude as the loss");
    }
    return index;
}

} // namespace

RunConfig parse_run_config_text(std::string_view text) {
    RunConfig config;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        const auto comment = raw_line.find('#');
        if (comment != std::string::npos) {
            raw_line.erase(comment);
        }
        const std::string line = trim(raw_line);
        if (line.empty()) {
            continue;
        }
        const auto equals = line.find('=');
        if (equals == std::string::npos) {
            fail(line_no, "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, equals));
        const std::string value = trim(line.substr(equals + 1));
        if (key.empty()) {
            fail(line_no, "missing key before '='");
        }
        if (value.empty()) {
            fail(line_no, "empty value for key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            fail(line_no, "duplicate key '" + key + "'");
        }
        assign_key(config, key, value, line_no);
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config_text(buffer.str());
}

CouplerSpec coupler_from_config(const RunConfig& config, bool require_length,
                                std::vector<std::string>* warnings) {
    CouplerSpec spec;
    spec.n_symmetric = index_from_config(config.n_symmetric_real, config.n_symmetric_imag,
                                         "n_symmetric_real", "n_symmetric_imag", warnings);
    spec.n_antisymmetric =
        index_from_config(config.n_antisymmetric_real, config.n_antisymmetric_imag,
                          "n_antisymmetric_real", "n_antisymmetric_imag", warnings);
    spec.wavelength_um = require_key(config.wavelength_um, "wavelength_um");
    spec.length_um = require_length ? require_key(config.length_um, "length_um")
                                    : config.length_um.value_or(0.0);
    spec.validate();
    return spec;
}

OverlapModel overlap_from_config(const RunConfig& config) {
    OverlapModel model{config.coherence_length_um.value_or(162.6),
                       config.center_offset_um.value_or(0.0)};
    model.validate();
    return model;
}

ExperimentConfig experiment_from_config(const RunConfig& config,
                                        std::vector<std::string>* warnings) {
    ExperimentConfig experiment;
    experiment.pair_rate_hz = config.pair_rate_hz.value_or(7000.0);
    experiment.efficiency_arm1 = config.efficiency_arm1.value_or(0.3);
    experiment.efficiency_arm2 = config.efficiency_arm2.value_or(0.3);
    experiment.integration_time_s = config.integration_time_s.value_or(1.0);
    experiment.background_rate_hz = config.background_rate_hz.value_or(0.0);
    experiment.visibility_cap = config.visibility_cap.value_or(1.0);
    experiment.rng_seed = config.rng_seed.value_or(1);
    experiment.configuration = config.configuration.value_or("standard_hom") == "modified"
                                   ? InterferometerKind::modified
                                   : InterferometerKind::standard_hom;
    experiment.coupler = coupler_from_config(config, true, warnings);
    experiment.overlap = overlap_from_config(config);
    const double stage_min = config.stage_min_um.value_or(-500.0);
    const double stage_max = config.stage_max_um.value_or(500.0);
    const std::uint64_t stage_points = config.stage_points.value_or(61);
    if (stage_points > 100000000) {
        throw ValidationError("stage_points too large: " + std::to_string(stage_points));
    }
    experiment.stage_positions_um =
        make_stage_grid(stage_min, stage_max, static_cast<std::size_t>(stage_points));
    experiment.validate();
    return experiment;
}

FitOptions fit_options_from_config(const RunConfig& config) {
    FitOptions options;
    const std::uint64_t iterations = config.fit_max_iterations.value_or(200);
    if (iterations < 1 || iterations > 1000000) {
        throw ValidationError("fit_max_iterations must be in [1, 1e6]");
    }
    options.max_iterations = static_cast<int>(iterations);
    options.cost_tolerance = config.fit_cost_tolerance.value_or(1e-10);
    if (!(options.cost_tolerance > 0.0)) {
        throw ValidationError("fit_cost_tolerance must be > 0");
    }
    return options;
}

} // namespace homsim
