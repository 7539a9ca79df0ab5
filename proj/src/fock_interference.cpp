#include "homsim/fock_interference.hpp"

#include <cmath>
#include <string>

namespace homsim {

namespace {

void check_overlap_range(double overlap_x) {
    if (!(overlap_x >= 0.0 && overlap_x <= 1.0)) {
        throw ValidationError("overlap must be in [0, 1], got " + std::to_string(overlap_x));
    }
}

} // namespace

double TwoPhotonOutput::norm_squared() const {
    return std::norm(amp_20) + std::norm(amp_02) + std::norm(amp_11);
}

double TwoPhotonOutput::bunching_probability() const {
    const double bunched = std::norm(amp_20) + std::norm(amp_02);
    const double total = bunched + std::norm(amp_11);
    if (total == 0.0) {
        throw DegenerateInputError("empty two-photon state");
    }
    return bunched / total;
}

TwoPhotonOutput scatter_two_photons(const ScatteringAmplitudes& amps) {
    const std::complex<double> bunched = M_SQRT2 * amps.r * amps.t;
    return {bunched, bunched, amps.r * amps.r + amps.t * amps.t};
}

void OverlapModel::validate() const {
    if (!(coherence_length_um > 0.0)) {
        throw ValidationError("coherence_length_um must be > 0, got " +
                              std::to_string(coherence_length_um));
    }
    if (!std::isfinite(center_offset_um)) {
        throw ValidationError("center_offset_um must be finite");
    }
}

double overlap(const OverlapModel& model, double stage_position_um) {
    model.validate();
    const double u = (stage_position_um - model.center_offset_um) / model.coherence_length_um;
    return std::exp(-u * u);
}

double hom_coincidence_probability(const ScatteringAmplitudes& amps, double overlap_x) {
    check_overlap_range(overlap_x);
    const double pr = std::norm(amps.r);
    const double pt = std::norm(amps.t);
    const double cross = (amps.r * amps.r * std::conj(amps.t * amps.t)).real();
    return pr * pr + pt * pt + 2.0 * overlap_x * cross;
}

double modified_coincidence_probability(const ScatteringAmplitudes& amps, double overlap_x) {
    check_overlap_range(overlap_x);
    // Both photons in the tapped port, then a 50/50 split: they part ways with
    // probability 1/2.
    return 0.5 * std::norm(amps.r) * std::norm(amps.t) * (1.0 + overlap_x);
}

BunchedProbabilities bunched_output_probabilities(const ScatteringAmplitudes& amps,
                                                  double overlap_x) {
    check_overlap_range(overlap_x);
    const double p = std::norm(amps.r) * std::norm(amps.t) * (1.0 + overlap_x);
    return {p, p};
}

} // namespace homsim
