#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dirac_spectra/linops.hpp"
#include "dirac_spectra/odeint.hpp"
#include "dirac_spectra/soliton.hpp"

using namespace dirac_spectra;

namespace {

const cplx I{0.0, 1.0};

std::vector<cplx> random_lambdas(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> re(0.0, 2.0), im(-3.0, 3.0);
    std::vector<cplx> out;
    for (int k = 0; k < n; ++k) out.emplace_back(re(rng), im(rng));
    return out;
}

}  // namespace

TEST(KnownEigenpairs, ResidualsAndFourthOrderConvergence) {
    for (double w : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto fine = closed_form_profile(w, Grid::make(20.0, 0.01));
        const auto coarse = closed_form_profile(w, Grid::make(20.0, 0.02));
        for (auto kind : {OperatorKind::Hminus, OperatorKind::Hplus, OperatorKind::L}) {
            const auto ef = known_eigenpairs(kind, fine), ec = known_eigenpairs(kind, coarse);
            const auto of = assemble(kind, fine), oc = assemble(kind, coarse);
            for (std::size_t k = 0; k < ef.size(); ++k) {
                const double rf = eigen_residual(of, ef[k]), rc = eigen_residual(oc, ec[k]);
                EXPECT_LT(rf, 1e-6) << to_string(kind) << " " << ef[k].label << " w=" << w;
                EXPECT_GT(std::log2(rc / rf), 3.0) << to_string(kind) << " " << ef[k].label << " w=" << w;
            }
        }
    }
}

TEST(KnownEigenpairs, ExpectedValues) {
    const auto s = closed_form_profile(0.4, Grid::make(10.0, 0.05));
    const auto l = known_eigenpairs(OperatorKind::L, s);
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[2].value, -0.8 * I);
    EXPECT_EQ(l[3].value, 0.8 * I);
    EXPECT_EQ(known_eigenpairs(OperatorKind::Hminus, s)[1].value, cplx(-0.8));
}

TEST(FirstOrderForm, MatchesOperatorOnSolutions) {
    // If psi' = A(lambda) psi then the finite-difference operator gives lambda psi.
    const auto s = closed_form_profile(0.5, Grid::make(20.0, 0.01));
    const auto op = assemble(OperatorKind::L, s);
    const cplx lambda{0.3, 0.4};
    const auto n = s.grid.size(), c = s.grid.center();
    std::vector<std::vector<cplx>> f(4, std::vector<cplx>(n));
    IntegrateOptions o;
    o.tol = 1e-13;
    const std::vector<double> xs(s.grid.x.begin(), s.grid.x.end());
    std::vector<double> right(xs.begin() + c, xs.begin() + c + 301);
    const auto tr = integrate<cplx, 4>([&](double x) { return op.l_matrix(x, lambda); },
                                       Vec<cplx, 4>{1.0, 0.5, -0.25, I}, 0.0, 3.0, o, right);
    ASSERT_EQ(tr.x.size(), 301u);
    for (std::size_t k = 0; k < tr.x.size(); ++k)
        for (int q = 0; q < 4; ++q) f[q][c + k] = tr.psi[k][q] * std::exp(tr.log_scale[k]);
    const auto r = op.apply(f);
    for (std::size_t k = 5; k < 295; k += 29)
        for (int q = 0; q < 4; ++q) EXPECT_LT(std::abs(r[q][c + k] - lambda * f[q][c + k]), 1e-7);
}

TEST(ParityClasses, OperatorPreservesClasses) {
    // X-: rho_1, sigma_1 even and rho_2, sigma_2 odd; X+: the reverse.
    const auto s = closed_form_profile(0.6, Grid::make(10.0, 0.01));
    const auto op = assemble(OperatorKind::L, s);
    const auto n = s.grid.size();
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<std::vector<cplx>> f(4, std::vector<cplx>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double x = s.grid.x[i], gauss = std::exp(-x * x);
            const double even = gauss * (1 + x * x), odd = gauss * x;
            f[0][i] = cls ? odd : even;
            f[1][i] = cplx(0, 1) * (cls ? even : odd);
            f[2][i] = 2.0 * (cls ? odd * x * x : even * 0.5);
            f[3][i] = cls ? even * 3.0 : odd * (x * x - 1);
        }
        const auto r = op.apply(f);
        double worst = 0.0;
        for (std::size_t i = 2; i + 2 < n; ++i) {
            const std::size_t j = n - 1 - i;
            for (int q = 0; q < 4; ++q) {
                const double sign = (q % 2 == 0) == (cls == 0) ? 1.0 : -1.0;
                worst = std::max(worst, std::abs(r[q][i] - sign * r[q][j]));
            }
        }
        EXPECT_LT(worst, 1e-12) << cls;
    }
}

TEST(ContinuousSpectrum, Membership) {
    const auto h = continuous_spectrum(OperatorKind::Hplus, 1.0, 0.3);
    EXPECT_TRUE(h.contains(0.7));
    EXPECT_TRUE(h.contains(-1.3));
    EXPECT_FALSE(h.contains(0.69));
    EXPECT_FALSE(h.contains(cplx(0.8, 0.1)));
    const auto l = continuous_spectrum(OperatorKind::L, 1.0, 0.3);
    EXPECT_TRUE(l.contains(cplx(0.0, -0.7)));
    EXPECT_TRUE(l.contains(cplx(0.0, 5.0)));
    EXPECT_FALSE(l.contains(cplx(0.0, 0.5)));
    EXPECT_FALSE(l.contains(cplx(0.01, 1.0)));
    EXPECT_NE(l.describe().find("0.69999999999999996"), std::string::npos);
}

TEST(Dispersion, AllBranchesSatisfyRelation) {
    for (double w : {0.2, 0.5, 0.8})
        for (cplx lambda : random_lambdas(100, 11)) {
            const auto b = xi_branches(lambda, w);
            for (int o = 0; o < 2; ++o)
                for (int i = 0; i < 2; ++i) {
                    const double scale = std::pow(1.0 + std::abs(b.xi[o][i]) + std::abs(lambda), 4);
                    EXPECT_LT(std::abs(dispersion(lambda, b.xi[o][i], w)), 1e-12 * scale);
                }
        }
}

TEST(Dispersion, DecayClassificationFollowsImaginaryPart) {
    const auto b = xi_branches(0.0, 0.6);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(b.xi[0][i].imag(), 0.8, 1e-15);
        EXPECT_EQ(b.decay[0][i], Decay::Right);
        EXPECT_EQ(b.decay[1][i], Decay::Left);
    }
    const auto c = xi_branches(cplx(0.0, 2.0), 0.6);
    EXPECT_EQ(c.decay[0][0], Decay::Oscillatory);
}

TEST(AsymptoticEigenvectors, AreEigenvectorsOfLimitSystem) {
    const auto s = closed_form_profile(0.5, Grid::make(5.0, 0.1));
    const auto op = assemble(OperatorKind::L, s);
    for (cplx lambda : random_lambdas(100, 5)) {
        const auto A = op.l_asymptotic(lambda);
        const auto basis = asymptotic_eigenvectors(lambda, 0.5);
        for (int o = 0; o < 2; ++o)
            for (int i = 0; i < 2; ++i) {
                const auto& v = basis.vec[o][i];
                const cplx xi = basis.branches.xi[o][i];
                EXPECT_LT(norm2(A * v - scaled(v, I * xi)), 1e-11 * (1 + std::abs(xi) + std::abs(lambda)) * norm2(v));
                EXPECT_EQ(basis.construction[o][i], XiConstruction::Reduced);
            }
        for (int i = 0; i < 2; ++i) {
            const cplx xi = basis.branches.xi[0][i];
            const auto r1 = xi_vector_r1(lambda, xi, 0.5), red = xi_vector_reduced(lambda, xi, i, 0.5);
            EXPECT_LT(norm2(r1 - scaled(red, 2.0 * 0.5 * lambda)), 1e-12 * norm2(r1));
            const auto r2 = xi_vector_r2(lambda, xi, 0.5);
            EXPECT_LT(norm2(A * r2 - scaled(r2, I * xi)), 1e-10 * (1 + norm2(r2)) * (1 + std::abs(xi)));
        }
    }
}

TEST(AsymptoticEigenvectors, ReducedVectorAtZeroAndFallbackAtThreshold) {
    const double w = 0.5;
    const auto at0 = asymptotic_eigenvectors(0.0, w);
    EXPECT_GT(norm2(at0.vec[0][0]), 0.1);
    // the reduced vector for the '-' inner sign vanishes at lambda = i m_-
    const auto thr = asymptotic_eigenvectors(cplx(0.0, 0.5), w);
    EXPECT_EQ(thr.construction[0][1], XiConstruction::AlternateR2);
    EXPECT_GT(norm2(thr.vec[0][1]), 0.1);
}

TEST(DecayingPair, DecaysToTheRightAndIsContinuousOntoTheCut) {
    for (cplx lambda : random_lambdas(100, 3)) {
        const auto d = decaying_pair(lambda, 0.4);
        for (int i = 0; i < 2; ++i) {
            EXPECT_GT(d.xi[i].imag(), 0.0);
            EXPECT_LT(std::abs(dispersion(lambda, d.xi[i], 0.4)), 1e-10 * std::pow(1 + std::abs(lambda), 4));
        }
    }
    for (double y : {0.7, 1.3, 2.5, -0.9, -2.0})
        for (int i = 0; i < 2; ++i) {
            const cplx on = decaying_xi(cplx(0.0, y), i, 0.4), near = decaying_xi(cplx(1e-10, y), i, 0.4);
            EXPECT_LT(std::abs(on - near), 1e-6) << y;
        }
}
