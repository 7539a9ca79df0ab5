#pragma once

#include <complex>

#include "homsim/coupled_mode.hpp"

namespace homsim {

// Unnormalized two-photon output state for |1,1> in, in the post-selected
// double-survival sector. The norm is below 1 for a lossy coupler.
struct TwoPhotonOutput {
    std::complex<double> amp_20; // both photons in port 1
    std::complex<double> amp_02; // both photons in port 2
    std::complex<double> amp_11; // one photon in each port

    double norm_squared() const;

    // (|amp_20|^2 + |amp_02|^2) / norm_squared(); throws DegenerateInputError
    // when the state is empty.
    double bunching_probability() const;
};

// Scatters one photon into each coupler port:
// amp_20 = amp_02 = sqrt(2) r t, amp_11 = r^2 + t^2.
TwoPhotonOutput scatter_two_photons(const ScatteringAmplitudes& amps);

// Gaussian spectral overlap of the two photons as a function of the optical
// path difference set by the delay stage. Peaks at 1 when the paths match.
struct OverlapModel {
    double coherence_length_um = 1.0;
    double center_offset_um = 0.0;

    void validate() const;
};

double overlap(const OverlapModel& model, double stage_position_um);

// Coincidence probability (one photon per output) behind the coupler for
// partial overlap x in [0, 1]:
//   C(x) = |r|^4 + |t|^4 + 2 x Re(r^2 conj(t^2)).
// Interpolates between distinguishable photons (x = 0) and full interference
// (x = 1).
double hom_coincidence_probability(const ScatteringAmplitudes& amps, double overlap_x);

// Click probability in the interferometer that splits one output port 50/50
// and counts coincidences between its halves. Photon pairs bunched into that
// port split with probability 1/2, so
//   M(x) = |r|^2 |t|^2 (1 + x) / 2,
// a peak instead of a dip.
double modified_coincidence_probability(const ScatteringAmplitudes& amps, double overlap_x);

struct BunchedProbabilities {
    double both_port1 = 0.0;
    double both_port2 = 0.0;
};

// Probability of both photons exiting in port 1 resp. port 2:
// |r|^2 |t|^2 (1 + x) each.
BunchedProbabilities bunched_output_probabilities(const ScatteringAmplitudes& amps,
                                                  double overlap_x);

} // namespace homsim
