#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "homsim/coupled_mode.hpp"
#include "oracles.hpp"

using homsim::bunching_probability;
using homsim::ComplexIndex;
using homsim::coupler_coefficients;
using homsim::CouplerSpec;
using homsim::DegenerateInputError;
using homsim::find_5050_lengths;
using homsim::ScatteringAmplitudes;
using homsim::splitting_ratio;
using homsim::sweep_bunching_vs_length;
using homsim::sweep_bunching_vs_length_serial;
using homsim::ValidationError;

namespace {

// The two coupler families exercised throughout: a dielectric-loaded guide
// with nearly equal supermode losses, and a metal strip with a 2:1 loss ratio.
const ComplexIndex kDielectricSym{1.318, 0.00426};
const ComplexIndex kDielectricAnti{1.150, 0.00437};
const ComplexIndex kMetalSym{2.036, 0.02};
const ComplexIndex kMetalAnti{1.841, 0.01};
constexpr double kWavelength = 1.55;

ScatteringAmplitudes amps_at(const ComplexIndex& n1, const ComplexIndex& n2, double length) {
    return coupler_coefficients(CouplerSpec{n1, n2, kWavelength, length});
}

} // namespace

TEST_CASE("validation rejects nonphysical inputs") {
    CHECK_THROWS_AS((ComplexIndex{0.0, 0.0}.validate()), ValidationError);
    CHECK_THROWS_AS((ComplexIndex{-1.2, 0.0}.validate()), ValidationError);
    CHECK_THROWS_AS((ComplexIndex{1.2, -0.1}.validate()), ValidationError);
    CHECK_THROWS_AS((CouplerSpec{kDielectricSym, kDielectricAnti, 0.0, 1.0}.validate()),
                    ValidationError);
    CHECK_THROWS_AS((CouplerSpec{kDielectricSym, kDielectricAnti, -1.55, 1.0}.validate()),
                    ValidationError);
    CHECK_THROWS_AS((CouplerSpec{kDielectricSym, kDielectricAnti, 1.55, -2.0}.validate()),
                    ValidationError);
}

TEST_CASE("from_effective_index folds negative imaginary parts") {
    bool flipped = false;
    const auto index = ComplexIndex::from_effective_index(1.318, -0.00426, &flipped);
    CHECK(flipped);
    CHECK(index.real_part == 1.318);
    CHECK(index.loss_part == 0.00426);
    const auto positive = ComplexIndex::from_effective_index(1.318, 0.00426, &flipped);
    CHECK_FALSE(flipped);
    CHECK(positive.loss_part == 0.00426);
    CHECK_THROWS_AS(ComplexIndex::from_effective_index(-1.0, 0.0), ValidationError);
}

TEST_CASE("zero length is the identity coupler, exactly") {
    const auto amps = amps_at(kDielectricSym, kDielectricAnti, 0.0);
    CHECK(amps.r == std::complex<double>(1.0, 0.0));
    CHECK(amps.t == std::complex<double>(0.0, 0.0));
}

TEST_CASE("lossless quarter-beat length splits 50/50") {
    const ComplexIndex n1{1.318, 0.0};
    const ComplexIndex n2{1.150, 0.0};
    const double branch = kWavelength / (4.0 * 0.168);
    const auto ratio = splitting_ratio(amps_at(n1, n2, branch));
    CHECK(ratio.reflectance == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ratio.transmittance == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ratio.throughput == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("amplitudes match the long double supermode-propagator oracle") {
    const struct {
        ComplexIndex n1, n2;
        double length;
    } cases[] = {
        {kDielectricSym, kDielectricAnti, 2.306547619047619},
        {kDielectricSym, kDielectricAnti, 77.7},
        {kMetalSym, kMetalAnti, 1.9871794871794872},
        {kMetalSym, kMetalAnti, 150.0},
        {{1.5, 0.0}, {1.4, 0.0}, 12.0},
    };
    for (const auto& c : cases) {
        const auto amps = amps_at(c.n1, c.n2, c.length);
        const auto ref = oracle::coupler_amplitudes(c.n1.real_part, c.n1.loss_part,
                                                    c.n2.real_part, c.n2.loss_part,
                                                    kWavelength, c.length);
        // rounding the accumulated phase n k0 L rotates the phasor by ~eps * phase
        const double phase = c.n1.real_part * 2.0 * std::numbers::pi / kWavelength * c.length;
        const double tolerance = 8.0 * 2.22e-16 * std::max(1.0, phase);
        CHECK(std::abs(amps.r - std::complex<double>(ref.r)) < tolerance);
        CHECK(std::abs(amps.t - std::complex<double>(ref.t)) < tolerance);
    }
}

TEST_CASE("lossless couplers are unitary at random lengths") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> index_dist(1.0, 3.0);
    std::uniform_real_distribution<double> length_dist(0.0, 300.0);
    for (int i = 0; i < 200; ++i) {
        const ComplexIndex n1{index_dist(rng), 0.0};
        const ComplexIndex n2{index_dist(rng), 0.0};
        const auto ratio = splitting_ratio(amps_at(n1, n2, length_dist(rng)));
        CHECK(ratio.throughput == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("lossy couplers never exceed unit throughput") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> index_dist(1.0, 3.0);
    std::uniform_real_distribution<double> loss_dist(0.0, 0.05);
    std::uniform_real_distribution<double> length_dist(0.0, 300.0);
    for (int i = 0; i < 200; ++i) {
        const ComplexIndex n1{index_dist(rng), loss_dist(rng)};
        const ComplexIndex n2{index_dist(rng), loss_dist(rng)};
        const auto ratio = splitting_ratio(amps_at(n1, n2, length_dist(rng)));
        CHECK(ratio.throughput <= 1.0 + 1e-12);
    }
}

TEST_CASE("bunching probability trivia") {
    // balanced lossless splitter: r^2 + t^2 = 0 exactly for this pair
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(bunching_probability({{s, 0.0}, {0.0, s}}) == 1.0);
    // bar-only coupler never bunches
    CHECK(bunching_probability({{1.0, 0.0}, {0.0, 0.0}}) == 0.0);
    CHECK_THROWS_AS(bunching_probability({{0.0, 0.0}, {0.0, 0.0}}), DegenerateInputError);
}

TEST_CASE("bunching at branch points matches the closed-form loss-ratio formula") {
    for (int m = 0; m < 10; ++m) {
        const double branch_d =
            (2 * m + 1) * kWavelength / (4.0 * std::abs(1.318 - 1.150));
        const double got_d = bunching_probability(amps_at(kDielectricSym, kDielectricAnti,
                                                          branch_d));
        const double want_d = static_cast<double>(
            oracle::branch_bunching(0.00426L - 0.00437L, kWavelength, branch_d));
        CHECK(got_d == doctest::Approx(want_d).epsilon(1e-9));

        const double branch_m =
            (2 * m + 1) * kWavelength / (4.0 * std::abs(2.036 - 1.841));
        const double got_m = bunching_probability(amps_at(kMetalSym, kMetalAnti, branch_m));
        const double want_m = static_cast<double>(
            oracle::branch_bunching(0.02L - 0.01L, kWavelength, branch_m));
        CHECK(got_m == doctest::Approx(want_m).epsilon(1e-9));
    }
}

TEST_CASE("bunching matches the oracle away from branch points too") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> length_dist(0.1, 250.0);
    for (int i = 0; i < 300; ++i) {
        const double length = length_dist(rng);
        const auto amps = amps_at(kMetalSym, kMetalAnti, length);
        const double want = static_cast<double>(oracle::bunching_from_amplitudes(
            oracle::coupler_amplitudes(2.036L, 0.02L, 1.841L, 0.01L, kWavelength, length)));
        CHECK(bunching_probability(amps) == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("common loss added to both supermodes leaves bunching invariant") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> length_dist(0.1, 100.0);
    std::uniform_real_distribution<double> extra_dist(0.0, 0.05);
    for (int i = 0; i < 100; ++i) {
        const double length = length_dist(rng);
        const double extra = extra_dist(rng);
        const double base = bunching_probability(amps_at(kMetalSym, kMetalAnti, length));
        const ComplexIndex shifted1{kMetalSym.real_part, kMetalSym.loss_part + extra};
        const ComplexIndex shifted2{kMetalAnti.real_part, kMetalAnti.loss_part + extra};
        const double shifted = bunching_probability(amps_at(shifted1, shifted2, length));
        CHECK(shifted == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("bunching at successive branches decreases monotonically for lossy couplers") {
    for (const auto& pair : {std::pair{kDielectricSym, kDielectricAnti},
                             std::pair{kMetalSym, kMetalAnti}}) {
        double previous = 1.1;
        for (int m = 0; m < 10; ++m) {
            const double branch = (2 * m + 1) * kWavelength /
                                  (4.0 * std::abs(pair.first.real_part -
                                                  pair.second.real_part));
            const double p = bunching_probability(amps_at(pair.first, pair.second, branch));
            CHECK(p < previous);
            CHECK(p > 0.5);
            previous = p;
        }
    }
}

TEST_CASE("decoherence bound: |P - 1/2| <= a^2 at branch points") {
    for (int m = 0; m < 40; ++m) {
        const double branch =
            (2 * m + 1) * kWavelength / (4.0 * std::abs(2.036 - 1.841));
        const double k0 = 2.0 * M_PI / kWavelength;
        const double a = std::exp(-std::abs(0.02 - 0.01) * k0 * branch);
        const double p = bunching_probability(amps_at(kMetalSym, kMetalAnti, branch));
        CHECK(std::abs(p - 0.5) <= a * a + 1e-9);
    }
    // large-length asymptote
    const double p200 = bunching_probability(amps_at(kMetalSym, kMetalAnti, 200.0));
    CHECK(std::abs(p200 - 0.5) < 1e-3);
}

TEST_CASE("find_5050_lengths returns the odd quarter-beat lengths") {
    const auto lengths = find_5050_lengths(kDielectricSym, kDielectricAnti, kWavelength, 25.0);
    REQUIRE(lengths.size() == 5);
    for (std::size_t m = 0; m < lengths.size(); ++m) {
        const double want = (2.0 * m + 1.0) * kWavelength / (4.0 * 0.168);
        CHECK(lengths[m] == doctest::Approx(want).epsilon(1e-12));
        // the defining property, not just the formula
        const auto ratio = splitting_ratio(amps_at(kDielectricSym, kDielectricAnti,
                                                   lengths[m]));
        CHECK(std::abs(ratio.reflectance - ratio.transmittance) < 1e-9);
    }
}

TEST_CASE("find_5050_lengths agrees with a dense scan plus bisection") {
    const auto closed = find_5050_lengths(kMetalSym, kMetalAnti, kWavelength, 30.0);
    const auto scanned = oracle::scan_5050_lengths(2.036, 0.02, 1.841, 0.01, kWavelength, 30.0);
    REQUIRE(closed.size() == scanned.size());
    for (std::size_t i = 0; i < closed.size(); ++i) {
        CHECK(closed[i] == doctest::Approx(scanned[i]).epsilon(1e-6));
    }
}

TEST_CASE("50/50 lengths do not depend on the loss parts") {
    const auto lossy = find_5050_lengths(kMetalSym, kMetalAnti, kWavelength, 40.0);
    const auto lossless = find_5050_lengths({2.036, 0.0}, {1.841, 0.0}, kWavelength, 40.0);
    const auto heavier = find_5050_lengths({2.036, 0.09}, {1.841, 0.002}, kWavelength, 40.0);
    REQUIRE(lossy.size() == lossless.size());
    REQUIRE(lossy.size() == heavier.size());
    for (std::size_t i = 0; i < lossy.size(); ++i) {
        CHECK(lossy[i] == lossless[i]);
        CHECK(lossy[i] == heavier[i]);
    }
}

TEST_CASE("find_5050_lengths rejects degenerate and invalid input") {
    CHECK_THROWS_AS(find_5050_lengths({1.5, 0.01}, {1.5, 0.02}, kWavelength, 10.0),
                    DegenerateInputError);
    CHECK_THROWS_AS(find_5050_lengths(kMetalSym, kMetalAnti, 0.0, 10.0), ValidationError);
    CHECK_THROWS_AS(find_5050_lengths(kMetalSym, kMetalAnti, kWavelength, -5.0),
                    ValidationError);
}

TEST_CASE("sweep preserves order, flags bad points, and matches serial exactly") {
    std::vector<double> lengths{0.0, 2.3, -1.0, 50.0, 7.5, 200.0};
    const auto parallel = sweep_bunching_vs_length(kMetalSym, kMetalAnti, kWavelength,
                                                   lengths);
    const auto serial = sweep_bunching_vs_length_serial(kMetalSym, kMetalAnti, kWavelength,
                                                        lengths);
    REQUIRE(parallel.size() == lengths.size());
    REQUIRE(serial.size() == lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        CHECK(parallel[i].length_um == lengths[i]);
        CHECK(parallel[i].length_um == serial[i].length_um);
        CHECK(parallel[i].ok == serial[i].ok);
        CHECK(parallel[i].reflectance == serial[i].reflectance);
        CHECK(parallel[i].transmittance == serial[i].transmittance);
        CHECK(parallel[i].throughput == serial[i].throughput);
        CHECK(parallel[i].bunching == serial[i].bunching);
        CHECK(parallel[i].error == serial[i].error);
    }
    CHECK_FALSE(parallel[2].ok);
    CHECK(parallel[2].error.find("length_um") != std::string::npos);
    CHECK(parallel[3].ok);
    // L = 0 has r = 1, t = 0: all photons stay put, never bunch
    CHECK(parallel[0].ok);
    CHECK(parallel[0].bunching == 0.0);
}

TEST_CASE("parallel sweep is bit-identical to serial on a dense grid") {
    std::vector<double> lengths(20001);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        lengths[i] = 0.01 * static_cast<double>(i);
    }
    const auto parallel = sweep_bunching_vs_length(kDielectricSym, kDielectricAnti,
                                                   kWavelength, lengths);
    const auto serial = sweep_bunching_vs_length_serial(kDielectricSym, kDielectricAnti,
                                                        kWavelength, lengths);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < parallel.size(); ++i) {
        CHECK(parallel[i].bunching == serial[i].bunching);
        CHECK(parallel[i].throughput == serial[i].throughput);
    }
}

TEST_CASE("sweep validates its scalar inputs") {
    std::vector<double> lengths{1.0};
    CHECK_THROWS_AS(sweep_bunching_vs_length(kMetalSym, kMetalAnti, 0.0, lengths),
                    ValidationError);
    CHECK_THROWS_AS(sweep_bunching_vs_length(kMetalSym, kMetalAnti, kWavelength, {}),
                    ValidationError);
}
