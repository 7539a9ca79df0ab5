#include "homsim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace homsim {

double DipModel::evaluate(double stage_position_um) const {
    const double u = (stage_position_um - center_um) / coherence_length_um;
    const double sign = polarity == Polarity::peak ? 1.0 : -1.0;
    return baseline * (1.0 + sign * visibility * std::exp(-u * u));
}

void DipModel::validate() const {
    if (!(baseline > 0.0)) {
        throw ValidationError("baseline must be > 0, got " + std::to_string(baseline));
    }
    // 1.2 leaves the same slack the fitter's bound does.
    if (!(visibility >= 0.0 && visibility <= 1.2)) {
        throw ValidationError("visibility must be in [0, 1.2], got " +
                              std::to_string(visibility));
    }
    if (!(coherence_length_um > 0.0)) {
        throw ValidationError("coherence_length_um must be > 0, got " +
                              std::to_string(coherence_length_um));
    }
    if (!std::isfinite(center_um)) {
        throw ValidationError("center_um must be finite");
    }
}

namespace {

// Parameter order: baseline, visibility, coherence length, center.
using Params = std::array<double, 4>;
using Matrix4 = std::array<std::array<double, 4>, 4>;

DipModel model_from(const Params& p, Polarity polarity) {
    return DipModel{p[0], p[1], p[2], p[3], polarity};
}

Params clamp_params(Params p) {
    p[0] = std::max(p[0], 1e-12);
    p[1] = std::clamp(p[1], 0.0, 1.2);
    p[2] = std::max(p[2], 1e-12);
    return p;
}

double weighted_cost(std::span<const FitPoint> points, std::span<const double> weights,
                     const Params& p, Polarity polarity) {
    const DipModel model = model_from(p, polarity);
    double cost = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double res = points[i].counts - model.evaluate(points[i].stage_position_um);
        cost += weights[i] * res * res;
    }
    return cost;
}

// Accumulates J^T W J and J^T W r at p.
void normal_equations(std::span<const FitPoint> points, std::span<const double> weights,
                      const Params& p, Polarity polarity, Matrix4& a, Params& g) {
    a = {};
    g = {};
    const DipModel model = model_from(p, polarity);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double pos = points[i].stage_position_um;
        const auto row = dip_model_gradient(model, pos);
        const double res = points[i].counts - model.evaluate(pos);
        const double w = weights[i];
        for (int j = 0; j < 4; ++j) {
            g[j] += w * row[j] * res;
            for (int k = j; k < 4; ++k) {
                a[j][k] += w * row[j] * row[k];
            }
        }
    }
    for (int j = 1; j < 4; ++j) {
        for (int k = 0; k < j; ++k) {
            a[j][k] = a[k][j];
        }
    }
}

// Solves (A + lambda * D) delta = g with D_jj = A_jj (unit scale for an
// identically zero column, which happens when visibility is pinned at 0).
bool solve_damped(const Matrix4& a, const Params& g, double lambda, Params& delta) {
    double m[4][5];
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
            m[j][k] = a[j][k];
        }
        m[j][j] += lambda * (a[j][j] > 0.0 ? a[j][j] : 1.0);
        m[j][4] = g[j];
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) {
                pivot = row;
            }
        }
        if (!(std::abs(m[pivot][col]) > 1e-300)) {
            return false;
        }
        if (pivot != col) {
            std::swap_ranges(m[pivot], m[pivot] + 5, m[col]);
        }
        for (int row = col + 1; row < 4; ++row) {
            const double factor = m[row][col] / m[col][col];
            for (int k = col; k < 5; ++k) {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    for (int j = 3; j >= 0; --j) {
        double sum = m[j][4];
        for (int k = j + 1; k < 4; ++k) {
            sum -= m[j][k] * delta[k];
        }
        delta[j] = sum / m[j][j];
    }
    for (double d : delta) {
        if (!std::isfinite(d)) {
            return false;
        }
    }
    return true;
}

// Gauss-Jordan inverse; false when singular.
bool invert4(const Matrix4& a, Matrix4& inv) {
    double m[4][8] = {};
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
            m[j][k] = a[j][k];
        }
        m[j][4 + j] = 1.0;
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) {
                pivot = row;
            }
        }
        if (!(std::abs(m[pivot][col]) > 1e-300)) {
            return false;
        }
        if (pivot != col) {
            std::swap_ranges(m[pivot], m[pivot] + 8, m[col]);
        }
        const double inv_pivot = 1.0 / m[col][col];
        for (int k = 0; k < 8; ++k) {
            m[col][k] *= inv_pivot;
        }
        for (int row = 0; row < 4; ++row) {
            if (row == col) {
                continue;
            }
            const double factor = m[row][col];
            for (int k = 0; k < 8; ++k) {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
            inv[j][k] = m[j][4 + k];
        }
    }
    return true;
}

std::size_t extremum_index(std::span<const FitPoint> points, Polarity polarity) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const bool better = polarity == Polarity::dip ? points[i].counts < points[best].counts
                                                      : points[i].counts > points[best].counts;
        if (better) {
            best = i;
        }
    }
    return best;
}

Params initial_guess(std::span<const FitPoint> points, Polarity polarity) {
    const std::size_t n = points.size();
    // Baseline from the outer 20% of points, assumed off-feature.
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                       std::llround(0.1 * static_cast<double>(n))));
    double baseline = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        baseline += points[i].counts + points[n - 1 - i].counts;
    }
    baseline /= static_cast<double>(2 * k);

    const std::size_t idx = extremum_index(points, polarity);
    const double center = points[idx].stage_position_um;
    const double depth = std::abs(points[idx].counts - baseline);
    const double visibility =
        std::clamp(depth / std::max(baseline, 1e-12), 0.0, 1.0);

    // Half width at half depth, scanning outward from the extremum.
    const double half_level = 0.5 * depth;
    double width_sum = 0.0;
    int width_sides = 0;
    for (std::size_t i = idx + 1; i < n; ++i) {
        if (std::abs(points[i].counts - baseline) <= half_level) {
            width_sum += points[i].stage_position_um - center;
            ++width_sides;
            break;
        }
    }
    for (std::size_t i = idx; i-- > 0;) {
        if (std::abs(points[i].counts - baseline) <= half_level) {
            width_sum += center - points[i].stage_position_um;
            ++width_sides;
            break;
        }
    }
    double span = points.back().stage_position_um - points.front().stage_position_um;
    double hwhm = width_sides > 0 ? width_sum / width_sides : span / 4.0;
    if (!(hwhm > 0.0)) {
        hwhm = span / 4.0;
    }
    const double coherence_length = hwhm / std::sqrt(std::log(2.0));

    return clamp_params({baseline, visibility, coherence_length, center});
}

} // namespace

std::array<double, 4> dip_model_gradient(const DipModel& model, double stage_position_um) {
    const Params p{model.baseline, model.visibility, model.coherence_length_um,
                   model.center_um};
    // cbrt(eps) balances truncation and rounding for central differences.
    const double step_scale = std::cbrt(std::numeric_limits<double>::epsilon());
    std::array<double, 4> grad{};
    for (int j = 0; j < 4; ++j) {
        const double h = step_scale * std::max(std::abs(p[j]), 1.0);
        Params lo = p;
        Params hi = p;
        lo[j] -= h;
        hi[j] += h;
        grad[j] = (model_from(hi, model.polarity).evaluate(stage_position_um) -
                   model_from(lo, model.polarity).evaluate(stage_position_um)) /
                  (2.0 * h);
    }
    return grad;
}

FitResult fit_dip(std::span<const FitPoint> points, Polarity polarity,
                  const FitOptions& options) {
    if (points.size() < 5) {
        throw ValidationError("fit needs at least 5 points, got " +
                              std::to_string(points.size()));
    }
    if (options.max_iterations < 1) {
        throw ValidationError("max_iterations must be >= 1");
    }
    if (!(options.cost_tolerance > 0.0) || !(options.step_tolerance > 0.0) ||
        !(options.initial_damping > 0.0)) {
        throw ValidationError("fit tolerances and damping must be > 0");
    }
    bool all_equal = true;
    for (const auto& point : points) {
        if (!std::isfinite(point.stage_position_um) || !std::isfinite(point.counts)) {
            throw ValidationError("fit input contains non-finite values");
        }
        if (point.counts < 0.0) {
            throw ValidationError("counts must be >= 0");
        }
        all_equal = all_equal && point.counts == points.front().counts;
    }
    if (all_equal) {
        throw DegenerateInputError("no interference feature detected");
    }
    if (!(points.back().stage_position_um > points.front().stage_position_um)) {
        throw ValidationError("stage positions must span a nonzero range");
    }

    std::vector<double> weights(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        weights[i] = 1.0 / std::max(points[i].counts, 1.0);
    }

    Params p = initial_guess(points, polarity);
    double cost = weighted_cost(points, weights, p, polarity);
    double lambda = options.initial_damping;
    bool converged = false;
    int iterations = 0;

    Matrix4 a{};
    Params g{};
    while (iterations < options.max_iterations && !converged) {
        ++iterations;
        normal_equations(points, weights, p, polarity, a, g);
        Params delta{};
        if (!solve_damped(a, g, lambda, delta)) {
            lambda *= 10.0;
            if (lambda > 1e12) {
                break;
            }
            continue;
        }

        bool step_tiny = true;
        for (int j = 0; j < 4; ++j) {
            step_tiny = step_tiny && std::abs(delta[j]) <=
                                         options.step_tolerance * (std::abs(p[j]) + options.step_tolerance);
        }
        if (step_tiny) {
            converged = true;
            break;
        }

        Params candidate = clamp_params({p[0] + delta[0], p[1] + delta[1], p[2] + delta[2],
                                         p[3] + delta[3]});
        const double candidate_cost = weighted_cost(points, weights, candidate, polarity);
        if (candidate_cost < cost || (candidate_cost == cost && cost == 0.0)) {
            const double improvement =
                (cost - candidate_cost) / std::max(cost, std::numeric_limits<double>::min());
            p = candidate;
            cost = candidate_cost;
            lambda = std::max(lambda / 10.0, 1e-12);
            if (improvement < options.cost_tolerance) {
                converged = true;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                break;
            }
        }
    }

    FitResult result;
    result.params = model_from(p, polarity);
    result.weighted_rss = cost;
    result.iterations = iterations;
    result.converged = converged;

    normal_equations(points, weights, p, polarity, a, g);
    result.gradient_inf_norm = 0.0;
    for (double gj : g) {
        result.gradient_inf_norm = std::max(result.gradient_inf_norm, std::abs(gj));
    }

    // Covariance = s^2 (J^T W J)^-1 with s^2 the reduced weighted RSS.
    const double s2 = cost / static_cast<double>(points.size() - 4);
    Matrix4 inv{};
    if (invert4(a, inv)) {
        for (int j = 0; j < 4; ++j) {
            const double var = s2 * inv[j][j];
            result.std_errors[j] = var >= 0.0 ? std::sqrt(var)
                                              : std::numeric_limits<double>::quiet_NaN();
        }
    } else {
        result.std_errors.fill(std::numeric_limits<double>::quiet_NaN());
    }
    return result;
}

FitResult fit_dip(std::span<const CoincidenceRecord> records, Polarity polarity,
                  const FitOptions& options) {
    std::vector<FitPoint> points(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!(records[i].integration_time_s > 0.0)) {
            throw ValidationError("integration_time_s must be > 0 in every record");
        }
        points[i] = {records[i].stage_position_um, static_cast<double>(records[i].counts)};
    }
    return fit_dip(std::span<const FitPoint>(points), polarity, options);
}

double visibility_v1(double c_max, double c_min) {
    if (!(c_max > 0.0)) {
        throw ValidationError("visibility_v1 needs c_max > 0");
    }
    if (!(c_min >= 0.0) || c_min > c_max) {
        throw ValidationError("visibility_v1 needs 0 <= c_min <= c_max");
    }
    return (c_max - c_min) / c_max;
}

double visibility_v2(double c_max, double c_min) {
    if (!(c_min > 0.0)) {
        throw ValidationError("visibility_v2 needs c_min > 0");
    }
    if (c_max < c_min) {
        throw ValidationError("visibility_v2 needs c_max >= c_min");
    }
    return (c_max - c_min) / c_min;
}

ValueWithError coherence_length_from_fit(const FitResult& fit) {
    if (!fit.converged) {
        throw ValidationError("coherence length requested from a non-converged fit");
    }
    return {fit.params.coherence_length_um, fit.std_errors[2]};
}

} // namespace homsim
