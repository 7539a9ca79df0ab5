#pragma once

#include <array>
#include <span>

#include "homsim/errors.hpp"
#include "homsim/experiment_sim.hpp"

namespace homsim {

enum class Polarity { dip, peak };

// Gaussian interference feature on a flat baseline:
//   f(z) = baseline * (1 -/+ visibility * exp(-((z - center) / L_c)^2)).
struct DipModel {
    double baseline = 0.0;
    double visibility = 0.0;
    double coherence_length_um = 0.0;
    double center_um = 0.0;
    Polarity polarity = Polarity::dip;

    double evaluate(double stage_position_um) const;
    void validate() const;
};

// Fit input decoupled from the integer-count record type so synthetic and
// rescaled data fit without quantization.
struct FitPoint {
    double stage_position_um = 0.0;
    double counts = 0.0;
};

struct FitOptions {
    int max_iterations = 200;
    // Stop once an accepted step improves the weighted cost by less than this
    // relative amount, or once steps shrink to machine scale.
    double cost_tolerance = 1e-10;
    double step_tolerance = 1e-12;
    double initial_damping = 1e-3;
};

// Parameter order everywhere: baseline, visibility, coherence length, center.
struct FitResult {
    DipModel params;
    std::array<double, 4> std_errors{};
    double weighted_rss = 0.0;
    double gradient_inf_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Weighted Levenberg-Marquardt fit with weights 1 / max(counts, 1).
// Requires at least 5 points; throws DegenerateInputError on flat data.
// Non-convergence is reported via converged = false, not an exception.
FitResult fit_dip(std::span<const FitPoint> points, Polarity polarity,
                  const FitOptions& options = {});
FitResult fit_dip(std::span<const CoincidenceRecord> records, Polarity polarity,
                  const FitOptions& options = {});

// d f / d (baseline, visibility, coherence length, center) at one position,
// central differences. This is exactly what the solver uses; exposed so it
// can be checked against an independent differentiation.
std::array<double, 4> dip_model_gradient(const DipModel& model, double stage_position_um);

// Dip depth relative to the baseline: (Cmax - Cmin) / Cmax.
double visibility_v1(double c_max, double c_min);

// Peak height relative to the floor: (Cmax - Cmin) / Cmin.
double visibility_v2(double c_max, double c_min);

struct ValueWithError {
    double value = 0.0;
    double std_error = 0.0;
};

ValueWithError coherence_length_from_fit(const FitResult& fit);

} // namespace homsim
