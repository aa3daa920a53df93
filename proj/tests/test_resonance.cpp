#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dirac_spectra/resonance.hpp"

using namespace dirac_spectra;

namespace {

SolitonProfile wave(double w, double extra = 1.0) {
    const double kappa = std::sqrt(1.0 - w * w);
    return closed_form_profile(w, Grid::make(std::max(20.0, 9.0 / kappa) + extra, 0.01));
}

double phase(ThresholdTag tag, double w, double R = 0.0) {
    ThresholdPhaseOptions o;
    o.R = R;
    return exact_threshold_phase(tag, wave(w, R > 0.0 ? R : 1.0), o);
}

const std::vector<ThresholdTag> all_tags{ThresholdTag::HplusMminus, ThresholdTag::HplusMplus, ThresholdTag::LImplus};

}  // namespace

TEST(ThresholdTag, NamesRoundTrip) {
    for (auto t : all_tags) EXPECT_EQ(threshold_tag_from_string(to_string(t)), t);
    EXPECT_THROW(threshold_tag_from_string("h-plus"), DomainError);
}

TEST(ThresholdSystem, GrossNeveuMatrices) {
    // [-N'; M'] = B (M, N) written as (M, N)' = A (M, N)
    const auto s = wave(0.45);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> X(-8.0, 8.0);
    for (int k = 0; k < 20; ++k) {
        const double x = X(rng);
        const auto p = s.point(x);
        const double v = p.v, u = p.u;
        const double bm[2][2] = {{-3 * v * v + u * u, 2 * u * v}, {2 * u * v, -2 + v * v - 3 * u * u}};
        const double bp[2][2] = {{2 - 3 * v * v + u * u, 2 * u * v}, {2 * u * v, v * v - 3 * u * u}};
        for (auto [tag, B] : {std::pair{ThresholdTag::HplusMminus, bm}, std::pair{ThresholdTag::HplusMplus, bp}}) {
            const auto A = threshold_system(tag, s, x);
            EXPECT_NEAR(A[0][0], B[1][0], 1e-13);
            EXPECT_NEAR(A[0][1], B[1][1], 1e-13);
            EXPECT_NEAR(A[1][0], -B[0][0], 1e-13);
            EXPECT_NEAR(A[1][1], -B[0][1], 1e-13);
        }
        const auto L = threshold_system(ThresholdTag::LImplus, s, x);
        EXPECT_EQ(L[0][1], 1.0);
        EXPECT_NEAR(L[1][0], -2.0 * p.X(), 1e-14);
    }
}

TEST(WkbPhase, SmallAmplitudeForms) {
    const auto s = wave(0.95);
    // closed form: sqrt X -> sqrt(2(1-w)) sech(kappa x), so sqrt6 int sqrt X -> sqrt12 pi / sqrt(1+w)
    const double lead = std::sqrt(12.0) * pi / std::sqrt(1.95);
    EXPECT_NEAR(small_amplitude_wkb(ThresholdTag::HplusMminus, s), 7.844023101998, 1e-6);
    EXPECT_NEAR(small_amplitude_wkb(ThresholdTag::HplusMminus, wave(0.999)) / (std::sqrt(12.0) * pi / std::sqrt(1.999)),
                1.0, 1e-3);
    EXPECT_GT(lead, 7.7);
    // L at i m_+ and H+ at -m_+ share sqrt2 int sqrt X
    EXPECT_NEAR(small_amplitude_wkb(ThresholdTag::HplusMplus, s), wkb_phase(ThresholdTag::LImplus, s).phase, 1e-8);
    EXPECT_NEAR(small_amplitude_estimate(1.0), 4.0 * std::sqrt(1.5), 1e-15);
}

TEST(WkbPhase, FiniteNonzeroLimitsNearEdge) {
    for (auto t : all_tags)
        for (double w : {0.99, 0.995}) {
            const auto p = wkb_phase(t, wave(w));
            EXPECT_TRUE(std::isfinite(p.phase));
            EXPECT_GT(p.phase, 1.0);
            EXPECT_LT(p.phase, 10.0);
        }
}

TEST(WkbPhase, ClampingOnlyForLargeAmplitude) {
    EXPECT_GT(wkb_phase(ThresholdTag::HplusMminus, wave(0.15)).clamped_length, 0.5);
    EXPECT_EQ(wkb_phase(ThresholdTag::HplusMminus, wave(0.9)).clamped_length, 0.0);
    EXPECT_EQ(wkb_phase(ThresholdTag::LImplus, wave(0.2)).clamped_length, 0.0);
}

TEST(WkbPhase, MonotoneDecreasingInOmega) {
    for (auto t : all_tags) {
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 1; k < 20; ++k) {
            const double w = 0.05 * k;
            const double p = wkb_phase(t, wave(w)).phase;
            EXPECT_GE(p, 0.0);
            EXPECT_LT(p, prev) << to_string(t) << " omega=" << w;
            prev = p;
        }
    }
}

TEST(ExactPhase, ThreeAndFourPiFrequencies) {
    EXPECT_NEAR(phase(ThresholdTag::HplusMminus, 0.367), 3 * pi, 2e-3);
    EXPECT_NEAR(phase(ThresholdTag::HplusMminus, 0.205), 4 * pi, 2e-3);
}

TEST(ExactPhase, IndependentOfWindowAtResonance) {
    for (double w : {0.36673, 0.20503}) {
        const double a = phase(ThresholdTag::HplusMminus, w, 20.0), b = phase(ThresholdTag::HplusMminus, w, 40.0);
        EXPECT_LT(std::abs(a - b), 1e-3) << w;
    }
}

TEST(ExactPhase, OffResonanceDriftIsOneOverTwoR) {
    // (M, N) approaches the free linear solution, whose angle decays like 1/(2x)
    const double a = phase(ThresholdTag::HplusMminus, 0.6, 40.0), b = phase(ThresholdTag::HplusMminus, 0.6, 50.0);
    const double c = (b - a) / (1.0 / 40.0 - 1.0 / 50.0);
    EXPECT_GT(c, 0.5);
    EXPECT_LT(c, 0.65);
}

TEST(ExactPhase, IndependentOfWindowBeyondTwenty) {
    for (double w : {0.3, 0.6, 0.9}) {
        const double R0 = threshold_window(wave(w));
        const double a = phase(ThresholdTag::HplusMminus, w, R0), b = phase(ThresholdTag::HplusMminus, w, R0 + 10.0);
        EXPECT_LT(std::abs(a - b), 1e-3) << w;
    }
}

TEST(ExactPhase, MonotoneDecreasingSweep) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 3; k <= 19; ++k) {
        const double w = 0.05 * k, p = phase(ThresholdTag::HplusMminus, w);
        EXPECT_LT(p, prev) << w;
        prev = p;
    }
}

TEST(ExactPhase, QuadratureProfileGivesSamePhase) {
    const auto nl = Nonlinearity::from_G_coeffs({0.0, 1.0, -0.5});
    const auto make = default_profile_factory(nl, 0.01);
    EXPECT_NEAR(exact_threshold_phase(ThresholdTag::HplusMminus, make(0.5)),
                phase(ThresholdTag::HplusMminus, 0.5), 1e-6);
    EXPECT_FALSE(make(0.5).analytic());
}

TEST(ExactPhase, WindowBeyondGridRejected) {
    const auto q = quadrature_profile(gross_neveu(), 0.5, Grid::make(20.0, 0.05));
    ThresholdPhaseOptions o;
    o.R = 30.0;
    EXPECT_THROW(exact_threshold_phase(ThresholdTag::HplusMminus, q, o), DomainError);
}

TEST(ResonancePhase, AgreementTrendTowardsEdge) {
    auto gap = [](double w) {
        const auto r = resonance_phase(ThresholdTag::HplusMminus, wave(w));
        EXPECT_GE(r.exact_phase, 0.0);
        EXPECT_GE(r.wkb_phase, 0.0);
        return std::abs(r.wkb_phase - r.exact_phase) / r.exact_phase;
    };
    EXPECT_LT(gap(0.95), gap(0.4));
}

TEST(ResonancePhase, NearestMultiple) {
    const auto r = resonance_phase(ThresholdTag::HplusMminus, wave(0.3));
    EXPECT_EQ(r.n_nearest, 4);
}

TEST(Crossing, StandardBrackets) {
    const auto make = default_profile_factory(gross_neveu());
    const auto c3 = resonance_crossing(ThresholdTag::HplusMminus, 3, 0.25, 0.5, make);
    EXPECT_FALSE(c3.boundary);
    EXPECT_NEAR(c3.omega, 0.367, 1e-3);
    EXPECT_NEAR(c3.phase_at_omega, 3 * pi, 1e-3);
    const auto c4 = resonance_crossing(ThresholdTag::HplusMminus, 4, 0.1, 0.3, make);
    EXPECT_NEAR(c4.omega, 0.205, 1e-3);
    const auto c2 = resonance_crossing(ThresholdTag::HplusMminus, 2, 0.9, 0.99, make);
    EXPECT_TRUE(c2.boundary);
    EXPECT_EQ(c2.omega, 1.0);
    EXPECT_NEAR(c2.phase_at_omega, 2 * pi, 0.1);
}

TEST(Crossing, CrossingIndependentOfWindow) {
    const auto make = default_profile_factory(gross_neveu(), 0.01);
    CrossingOptions far;
    far.phase.R = 35.0;
    auto wide = [](double w) { return closed_form_profile(w, Grid::make(36.0, 0.01)); };
    const auto a = resonance_crossing(ThresholdTag::HplusMminus, 3, 0.25, 0.5, make);
    const auto b = resonance_crossing(ThresholdTag::HplusMminus, 3, 0.25, 0.5, wide, 1.0, far);
    EXPECT_LT(std::abs(a.omega - b.omega), 2e-4);
}

TEST(Crossing, NoCrossingAndBadBracket) {
    const auto make = default_profile_factory(gross_neveu());
    EXPECT_THROW(resonance_crossing(ThresholdTag::HplusMminus, 3, 0.5, 0.6, make), NoCrossing);
    EXPECT_THROW(resonance_crossing(ThresholdTag::HplusMminus, 3, 0.6, 0.5, make), DomainError);
}

TEST(Crossing, PhaseLimitAtEdge) {
    const auto make = default_profile_factory(gross_neveu());
    EXPECT_NEAR(phase_limit(ThresholdTag::HplusMminus, make, 0.98, 0.99), 2 * pi, 0.01);
}

TEST(WkbToy, ExactAndWkbValues) {
    const auto r = wkb_toy_check();
    EXPECT_NEAR(r.exact_phase, pi, 1e-3);
    EXPECT_NEAR(r.wkb_phase, std::sqrt(2.0) * pi, 1e-8);
    EXPECT_NEAR(r.relative_error, std::sqrt(2.0) - 1.0, 1e-3);
    // Z = -tanh x = 1 - 2e^{2x} + ...; cos(int sqrt2 sech) = 1 - 4e^{2x} + ...
    EXPECT_NEAR(r.exact_tail, 2.0, 1e-6);
    EXPECT_NEAR(r.wkb_tail, 4.0, 1e-4);
}
