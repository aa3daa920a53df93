#include <gtest/gtest.h>

#include <cmath>

#include "dirac_spectra/evans.hpp"
#include "dirac_spectra/resonance.hpp"

using namespace dirac_spectra;

namespace {

const cplx I{0.0, 1.0};

// Gross-Neveu built by quadrature, so nothing uses the closed form
SolitonProfile numeric_wave(double w, double R = 25.0) {
    return quadrature_profile(Nonlinearity::from_G_coeffs({0.0, 1.0, -0.5}), w, Grid::make(R, 0.01));
}

}  // namespace

TEST(Pipeline, QuadratureWaveToEvansZeros) {
    const double w = 0.4;
    const auto s = numeric_wave(w);
    const auto z = refine_zero(s, cplx(0.01, 2 * w + 0.01));
    EXPECT_LT(std::abs(z.lambda - 2.0 * w * I), 1e-6);
    const auto c = closed_form_profile(w, Grid::make(25.0, 0.01));
    const auto a = evans_pair(cplx(0.2, 0.3), s), b = evans_pair(cplx(0.2, 0.3), c);
    for (auto p : {Parity::Xminus, Parity::Xplus}) {
        const cplx x = a.E(p) * std::exp(a.scale), y = b.E(p) * std::exp(b.scale);
        EXPECT_LT(std::abs(x - y), 1e-6 * std::abs(y));
    }
}

TEST(Pipeline, QuadratureWaveToGapSpectra) {
    const double w = 0.6;
    const auto s = numeric_wave(w);
    const auto c = closed_form_profile(w, Grid::make(25.0, 0.01));
    for (auto kind : {OperatorKind::Hminus, OperatorKind::Hplus}) {
        const auto a = h_spectrum_scan(kind, s, -1.6, 0.4, 0.01), b = h_spectrum_scan(kind, c, -1.6, 0.4, 0.01);
        ASSERT_EQ(a.size(), b.size()) << to_string(kind);
        for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k].value, b[k].value, 1e-7);
    }
}

TEST(Pipeline, CubicModelRunsEndToEnd) {
    const auto nl = Nonlinearity::from_G_coeffs({0.0, 1.0, 0.0, -1.0 / 3.0});
    const auto s = quadrature_profile(nl, 0.6, Grid::make(25.0, 0.01));
    const auto op = assemble(OperatorKind::L, s);
    for (const auto& e : known_eigenpairs(OperatorKind::L, s)) EXPECT_LT(eigen_residual(op, e), 1e-5) << e.label;
    const auto z = refine_zero(s, cplx(0.01, 1.21));
    EXPECT_LT(std::abs(z.lambda - 1.2 * I), 1e-6);
    const auto hm = h_spectrum_scan(OperatorKind::Hminus, s, -1.6, 0.4, 0.01);
    ASSERT_EQ(hm.size(), 2u);
    EXPECT_NEAR(hm[0].value, -1.2, 1e-8);
    const auto r = resonance_phase(ThresholdTag::LImplus, quadrature_profile(nl, 0.6, Grid::make(21.0, 0.01)));
    EXPECT_GT(r.exact_phase, 0.0);
    EXPECT_GT(r.wkb_phase, 0.0);
}

TEST(Pipeline, CrossingFromQuadratureProfiles) {
    const auto make = default_profile_factory(Nonlinearity::from_G_coeffs({0.0, 1.0, -0.5}), 0.01);
    const auto c = resonance_crossing(ThresholdTag::HplusMminus, 3, 0.3, 0.45, make);
    EXPECT_NEAR(c.omega, 0.36673, 2e-4);
}
