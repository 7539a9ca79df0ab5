#include "homsim/coupled_mode.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

namespace homsim {

ComplexIndex ComplexIndex::from_effective_index(double real_part, double imag_part,
                                                bool* flipped) {
    if (flipped != nullptr) {
        *flipped = imag_part < 0.0;
    }
    ComplexIndex index{real_part, std::abs(imag_part)};
    index.validate();
    return index;
}

void ComplexIndex::validate() const {
    if (!(real_part > 0.0)) {
        throw ValidationError("effective index real part must be > 0, got " +
                              std::to_string(real_part));
    }
    if (!(loss_part >= 0.0)) {
        throw ValidationError("effective index loss part must be >= 0, got " +
                              std::to_string(loss_part));
    }
}

double CouplerSpec::k0() const {
    return 2.0 * M_PI / wavelength_um;
}

double CouplerSpec::delta_real() const {
    return n_symmetric.real_part - n_antisymmetric.real_part;
}

double CouplerSpec::delta_loss() const {
    return n_symmetric.loss_part - n_antisymmetric.loss_part;
}

void CouplerSpec::validate() const {
    n_symmetric.validate();
    n_antisymmetric.validate();
    if (!(wavelength_um > 0.0)) {
        throw ValidationError("wavelength_um must be > 0, got " +
                              std::to_string(wavelength_um));
    }
    if (!(length_um >= 0.0)) {
        throw ValidationError("length_um must be >= 0, got " + std::to_string(length_um));
    }
}

ScatteringAmplitudes coupler_coefficients(const CouplerSpec& spec) {
    spec.validate();
    const double k0L = spec.k0() * spec.length_um;
    const std::complex<double> f =
        std::exp(std::complex<double>(-spec.n_antisymmetric.loss_part * k0L,
                                      spec.n_antisymmetric.real_part * k0L));
    const std::complex<double> g =
        std::exp(std::complex<double>(-spec.delta_loss() * k0L, spec.delta_real() * k0L));
    return {0.5 * f * (g + 1.0), 0.5 * f * (g - 1.0)};
}

SplittingRatio splitting_ratio(const ScatteringAmplitudes& amps) {
    const double reflectance = std::norm(amps.r);
    const double transmittance = std::norm(amps.t);
    return {reflectance, transmittance, reflectance + transmittance};
}

double bunching_probability(const ScatteringAmplitudes& amps) {
    const double bunched = 4.0 * std::norm(amps.r * amps.t);
    const double coincident = std::norm(amps.r * amps.r + amps.t * amps.t);
    const double total = bunched + coincident;
    if (total == 0.0) {
        throw DegenerateInputError("both amplitudes vanish; no surviving photon pairs");
    }
    return bunched / total;
}

std::vector<double> find_5050_lengths(const ComplexIndex& n_symmetric,
                                      const ComplexIndex& n_antisymmetric,
                                      double wavelength_um, double max_length_um,
                                      double tolerance) {
    n_symmetric.validate();
    n_antisymmetric.validate();
    if (!(wavelength_um > 0.0)) {
        throw ValidationError("wavelength_um must be > 0");
    }
    if (!(max_length_um > 0.0)) {
        throw ValidationError("max_length_um must be > 0");
    }
    if (!(tolerance > 0.0)) {
        throw ValidationError("tolerance must be > 0");
    }
    const double dn = n_symmetric.real_part - n_antisymmetric.real_part;
    if (dn == 0.0) {
        throw DegenerateInputError(
            "equal supermode indices: no beating, the coupler never splits 50/50");
    }
    const double quarter_beat = wavelength_um / (4.0 * std::abs(dn));
    if (max_length_um / quarter_beat > 2e7) {
        throw ValidationError("more than 1e7 50/50 points in range; narrow max_length_um");
    }

    std::vector<double> lengths;
    for (std::uint64_t m = 0;; ++m) {
        const double length = static_cast<double>(2 * m + 1) * quarter_beat;
        if (length > max_length_um) {
            break;
        }
        CouplerSpec spec{n_symmetric, n_antisymmetric, wavelength_um, length};
        const auto amps = coupler_coefficients(spec);
        const double ar = std::abs(amps.r);
        const double at = std::abs(amps.t);
        if (std::abs(ar - at) <= tolerance * std::max(ar, at)) {
            lengths.push_back(length);
        }
    }
    return lengths;
}

namespace {

SweepRow evaluate_sweep_point(const ComplexIndex& n_symmetric,
                              const ComplexIndex& n_antisymmetric, double wavelength_um,
                              double length_um) {
    SweepRow row;
    row.length_um = length_um;
    try {
        CouplerSpec spec{n_symmetric, n_antisymmetric, wavelength_um, length_um};
        const auto amps = coupler_coefficients(spec);
        const auto ratio = splitting_ratio(amps);
        row.reflectance = ratio.reflectance;
        row.transmittance = ratio.transmittance;
        row.throughput = ratio.throughput;
        row.bunching = bunching_probability(amps);
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

} // namespace

std::vector<SweepRow> sweep_bunching_vs_length_serial(const ComplexIndex& n_symmetric,
                                                      const ComplexIndex& n_antisymmetric,
                                                      double wavelength_um,
                                                      std::span<const double> lengths_um) {
    n_symmetric.validate();
    n_antisymmetric.validate();
    if (!(wavelength_um > 0.0)) {
        throw ValidationError("wavelength_um must be > 0");
    }
    if (lengths_um.empty()) {
        throw ValidationError("sweep needs at least one length");
    }
    std::vector<SweepRow> rows(lengths_um.size());
    for (std::size_t i = 0; i < lengths_um.size(); ++i) {
        rows[i] = evaluate_sweep_point(n_symmetric, n_antisymmetric, wavelength_um,
                                       lengths_um[i]);
    }
    return rows;
}

std::vector<SweepRow> sweep_bunching_vs_length(const ComplexIndex& n_symmetric,
                                               const ComplexIndex& n_antisymmetric,
                                               double wavelength_um,
                                               std::span<const double> lengths_um) {
    n_symmetric.validate();
    n_antisymmetric.validate();
    if (!(wavelength_um > 0.0)) {
        throw ValidationError("wavelength_um must be > 0");
    }
    if (lengths_um.empty()) {
        throw ValidationError("sweep needs at least one length");
    }
    std::vector<SweepRow> rows(lengths_um.size());
    const std::int64_t n = static_cast<std::int64_t>(lengths_um.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)] =
            evaluate_sweep_point(n_symmetric, n_antisymmetric, wavelength_um,
                                 lengths_um[static_cast<std::size_t>(i)]);
    }
    return rows;
}

} // namespace homsim
