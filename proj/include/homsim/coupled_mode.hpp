#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "homsim/errors.hpp"

namespace homsim {

// Effective index of one coupler supermode. loss_part is the extinction
// coefficient kappa >= 0; field amplitude decays as exp(-kappa * k0 * L).
struct ComplexIndex {
    double real_part = 1.0;
    double loss_part = 0.0;

    // Builds from an effective index quoted with either sign convention for
    // the imaginary part; the magnitude is taken as the loss. *flipped is set
    // when a negative imaginary part had to be normalized.
    static ComplexIndex from_effective_index(double real_part, double imag_part,
                                             bool* flipped = nullptr);

    void validate() const;
};

// Two-mode directional coupler described by its symmetric and antisymmetric
// supermodes. Lengths and wavelengths are in micrometers.
struct CouplerSpec {
    ComplexIndex n_symmetric;
    ComplexIndex n_antisymmetric;
    double wavelength_um = 1.55;
    double length_um = 0.0;

    double k0() const;         // vacuum wavenumber, rad/um
    double delta_real() const; // Re(n_s) - Re(n_a)
    double delta_loss() const; // kappa_s - kappa_a

    void validate() const;
};

// Single-photon scattering amplitudes of the coupler. Non-unitary when the
// supermodes are lossy: |r|^2 + |t|^2 <= 1.
struct ScatteringAmplitudes {
    std::complex<double> r; // bar (same-waveguide) amplitude
    std::complex<double> t; // cross amplitude
};

struct SplittingRatio {
    double reflectance = 0.0;   // |r|^2
    double transmittance = 0.0; // |t|^2
    double throughput = 0.0;    // |r|^2 + |t|^2
};

// Supermode-beating amplitudes at the coupler output,
//   r = f (g + 1) / 2,  t = f (g - 1) / 2,
// with f the antisymmetric-mode propagator and g the ratio of the two
// propagators. L = 0 gives r = 1, t = 0.
ScatteringAmplitudes coupler_coefficients(const CouplerSpec& spec);

SplittingRatio splitting_ratio(const ScatteringAmplitudes& amps);

// Probability that an input photon pair leaves bunched (both photons in one
// output), conditioned on both photons surviving:
//   P = 4|rt|^2 / (4|rt|^2 + |r^2 + t^2|^2).
// Throws DegenerateInputError when r = t = 0 (nothing survives).
double bunching_probability(const ScatteringAmplitudes& amps);

// All lengths in (0, max_length_um] where the coupler splits 50/50, i.e.
// ||r| - |t|| / max(|r|, |t|) <= tolerance. For a beating coupler these are
// the odd quarter-beat lengths (2m+1) * lambda / (4 |Re dn|), independent of
// loss. Throws DegenerateInputError when Re(dn) = 0 (no beating, never splits).
std::vector<double> find_5050_lengths(const ComplexIndex& n_symmetric,
                                      const ComplexIndex& n_antisymmetric,
                                      double wavelength_um,
                                      double max_length_um,
                                      double tolerance = 1e-9);

// One evaluated point of a bunching-vs-length sweep. A point whose length is
// invalid is flagged rather than aborting the sweep.
struct SweepRow {
    double length_um = 0.0;
    double reflectance = 0.0;
    double transmittance = 0.0;
    double throughput = 0.0;
    double bunching = 0.0;
    bool ok = false;
    std::string error;
};

// Evaluates the coupler at each requested length, preserving input order.
// The plain variant runs the points in parallel (OpenMP when available) and
// produces output bit-identical to the _serial reference.
std::vector<SweepRow> sweep_bunching_vs_length(const ComplexIndex& n_symmetric,
                                               const ComplexIndex& n_antisymmetric,
                                               double wavelength_um,
                                               std::span<const double> lengths_um);

std::vector<SweepRow> sweep_bunching_vs_length_serial(const ComplexIndex& n_symmetric,
                                                      const ComplexIndex& n_antisymmetric,
                                                      double wavelength_um,
                                                      std::span<const double> lengths_um);

} // namespace homsim
