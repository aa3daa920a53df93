#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "core.hpp"
#include "model.hpp"
#include "soliton.hpp"

namespace dirac_spectra {

enum class OperatorKind { Hminus, Hplus, L };

inline const char* to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::Hminus: return "h-";
        case OperatorKind::Hplus: return "h+";
        case OperatorKind::L: return "L";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// First-order forms of the spectral problems. Each returns the matrix A with
// psi' = A psi equivalent to (Op - lambda) psi = 0 at a point of the wave.

/// (H_- - lambda) psi = 0:
///   psi_1' = -(g + omega + lambda) psi_2,  psi_2' = -(g - omega - lambda) psi_1.
template <typename T>
Mat<T, 2> hminus_system(const ProfilePoint& p, const Nonlinearity& nl, double omega, T lambda) {
    const double g = nl.g(p.X());
    return {{{T{0}, -(g + omega + lambda)}, {-(g - omega - lambda), T{0}}}};
}

/// (H_+ - lambda) psi = 0.
template <typename T>
Mat<T, 2> hplus_system(const ProfilePoint& p, const Nonlinearity& nl, double omega, T lambda) {
    const double X = p.X(), g = nl.g(X), gp = nl.gprime(X);
    const double vu = 2.0 * gp * p.v * p.u;
    return {{{T{-vu}, 2.0 * gp * p.u * p.u - g - omega - lambda},
             {-(2.0 * gp * p.v * p.v + g - omega - lambda), T{vu}}}};
}

/// (L - lambda) Psi = 0 with Psi = (rho_1, rho_2, varsigma_1, varsigma_2) and
/// L = [[0, H_-], [-H_+, 0]].
inline Mat<cplx, 4> l_system(const ProfilePoint& p, const Nonlinearity& nl, double omega, cplx lambda) {
    const double X = p.X(), g = nl.g(X), gp = nl.gprime(X);
    const double vu = 2.0 * gp * p.v * p.u;
    Mat<cplx, 4> a{};
    a[0][0] = -vu;
    a[0][1] = 2.0 * gp * p.u * p.u - g - omega;
    a[0][3] = lambda;
    a[1][0] = -(2.0 * gp * p.v * p.v + g - omega);
    a[1][1] = vu;
    a[1][2] = -lambda;
    a[2][1] = -lambda;
    a[2][3] = -(g + omega);
    a[3][0] = lambda;
    a[3][2] = -(g - omega);
    return a;
}

/// Coefficient field of one linearized operator about a fixed wave.
class LinearOperatorField {
public:
    LinearOperatorField(OperatorKind kind, const SolitonProfile& profile) : kind_(kind), profile_(&profile) {}

    OperatorKind kind() const { return kind_; }
    const SolitonProfile& profile() const { return *profile_; }
    std::size_t dimension() const { return kind_ == OperatorKind::L ? 4 : 2; }

    Mat<double, 2> h_matrix(double x, double lambda) const {
        const auto p = profile_->point(x);
        return kind_ == OperatorKind::Hminus ? hminus_system(p, profile_->nl, profile_->omega(), lambda)
                                             : hplus_system(p, profile_->nl, profile_->omega(), lambda);
    }
    Mat<cplx, 4> l_matrix(double x, cplx lambda) const {
        return l_system(profile_->point(x), profile_->nl, profile_->omega(), lambda);
    }

    /// Limit of the coefficients as |x| -> infinity (v = u = 0, g = m).
    Mat<cplx, 4> l_asymptotic(cplx lambda) const {
        return l_system(ProfilePoint{}, profile_->nl, profile_->omega(), lambda);
    }
    Mat<double, 2> h_asymptotic(double lambda) const {
        return kind_ == OperatorKind::Hminus ? hminus_system(ProfilePoint{}, profile_->nl, profile_->omega(), lambda)
                                             : hplus_system(ProfilePoint{}, profile_->nl, profile_->omega(), lambda);
    }

    /// Applies the operator to grid samples (component-major) using
    /// fourth-order central differences. The two nodes at each end are left
    /// at zero.
    std::vector<std::vector<cplx>> apply(const std::vector<std::vector<cplx>>& f) const {
        const auto& s = *profile_;
        const std::size_t n = s.grid.size();
        const double h = s.grid.h, w = s.omega();
        std::vector<std::vector<cplx>> out(f.size(), std::vector<cplx>(n));
        auto d1 = [&](const std::vector<cplx>& c, std::size_t i) {
            return (c[i - 2] - 8.0 * c[i - 1] + 8.0 * c[i + 1] - c[i + 2]) / (12.0 * h);
        };
        for (std::size_t i = 2; i + 2 < n; ++i) {
            const double X = s.X(i), g = s.nl.g(X), gp = s.nl.gprime(X);
            const double v = s.v[i], u = s.u[i];
            auto hminus = [&](const std::vector<cplx>& a, const std::vector<cplx>& b, cplx& r1, cplx& r2) {
                r1 = (g - w) * a[i] + d1(b, i);
                r2 = -d1(a, i) - (g + w) * b[i];
            };
            auto hplus = [&](const std::vector<cplx>& a, const std::vector<cplx>& b, cplx& r1, cplx& r2) {
                r1 = (2 * gp * v * v + g - w) * a[i] + d1(b, i) - 2 * gp * v * u * b[i];
                r2 = -d1(a, i) - 2 * gp * v * u * a[i] + (2 * gp * u * u - g - w) * b[i];
            };
            switch (kind_) {
                case OperatorKind::Hminus: hminus(f[0], f[1], out[0][i], out[1][i]); break;
                case OperatorKind::Hplus: hplus(f[0], f[1], out[0][i], out[1][i]); break;
                case OperatorKind::L: {
                    hminus(f[2], f[3], out[0][i], out[1][i]);
                    cplx r1, r2;
                    hplus(f[0], f[1], r1, r2);
                    out[2][i] = -r1;
                    out[3][i] = -r2;
                    break;
                }
            }
        }
        return out;
    }

private:
    OperatorKind kind_;
    const SolitonProfile* profile_;
};

inline LinearOperatorField assemble(OperatorKind kind, const SolitonProfile& profile) {
    return LinearOperatorField(kind, profile);
}

struct EigenPair {
    cplx value;
    std::vector<std::vector<cplx>> f;  ///< component-major grid samples
    std::string label;
};

/// Eigenpairs known in closed form from the stationary equations.
inline std::vector<EigenPair> known_eigenpairs(OperatorKind kind, const SolitonProfile& s) {
    const std::size_t n = s.grid.size();
    const double w = s.omega();
    auto col = [&](const std::vector<double>& a) { return std::vector<cplx>(a.begin(), a.end()); };
    auto times = [&](const std::vector<double>& a, cplx c) {
        std::vector<cplx> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = c * a[i];
        return r;
    };
    const std::vector<cplx> zero(n);
    const cplx I{0.0, 1.0};
    switch (kind) {
        case OperatorKind::Hminus:
            return {{0.0, {col(s.v), col(s.u)}, "(v,u)"}, {-2.0 * w, {col(s.u), col(s.v)}, "(u,v)"}};
        case OperatorKind::Hplus:
            return {{0.0, {col(s.vprime), col(s.uprime)}, "(v',u')"}, {-2.0 * w, {col(s.u), col(s.v)}, "(u,v)"}};
        case OperatorKind::L:
            return {{0.0, {col(s.vprime), col(s.uprime), zero, zero}, "(v',u',0,0)"},
                    {0.0, {zero, zero, col(s.v), col(s.u)}, "(0,0,v,u)"},
                    {-2.0 * I * w, {col(s.u), col(s.v), times(s.u, I), times(s.v, I)}, "(u,v,iu,iv)"},
                    {2.0 * I * w, {col(s.u), col(s.v), times(s.u, -I), times(s.v, -I)}, "(u,v,-iu,-iv)"}};
    }
    return {};
}

/// max |(Op - lambda) f| / max |f| over interior grid nodes.
inline double eigen_residual(const LinearOperatorField& op, const EigenPair& e) {
    const auto r = op.apply(e.f);
    const std::size_t n = e.f[0].size();
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < e.f.size(); ++c)
        for (std::size_t i = 0; i < n; ++i) {
            den = std::max(den, std::abs(e.f[c][i]));
            if (i >= 2 && i + 2 < n) num = std::max(num, std::abs(r[c][i] - e.value * e.f[c][i]));
        }
    return den > 0.0 ? num / den : 0.0;
}

// ---------------------------------------------------------------------------
// Continuous spectrum

struct ContinuousSpectrum {
    OperatorKind kind;
    double m_minus, m_plus;

    /// H_+-: real axis minus (-m_+, m_-). L: imaginary axis with |Im| >= m_-.
    bool contains(cplx lambda, double tol = 1e-12) const {
        if (kind == OperatorKind::L)
            return std::abs(lambda.real()) <= tol && std::abs(lambda.imag()) >= m_minus - tol;
        return std::abs(lambda.imag()) <= tol && (lambda.real() <= -m_plus + tol || lambda.real() >= m_minus - tol);
    }
    std::string describe() const {
        char buf[160];
        if (kind == OperatorKind::L)
            std::snprintf(buf, sizeof buf, "{i t : |t| >= %.17g}", m_minus);
        else
            std::snprintf(buf, sizeof buf, "R \\ (%.17g, %.17g)", -m_plus, m_minus);
        return buf;
    }
};

inline ContinuousSpectrum continuous_spectrum(OperatorKind kind, double m, double omega) {
    const auto p = ModelParams::make(m, omega);
    return {kind, p.m_minus, p.m_plus};
}

// ---------------------------------------------------------------------------
// Spatial branches xi with (L_inf - lambda) Xi e^{i xi x} = 0

/// Principal square root with Re >= 0; on the cut sqrt(-a) = +i sqrt(a).
inline cplx branch_sqrt(cplx z) {
    if (z.imag() == 0.0 && z.real() < 0.0) return {0.0, std::sqrt(-z.real())};
    return std::sqrt(z);
}

enum class Decay { Right, Left, Oscillatory };

inline const char* to_string(Decay d) {
    switch (d) {
        case Decay::Right: return "decays as x -> +inf";
        case Decay::Left: return "decays as x -> -inf";
        case Decay::Oscillatory: return "oscillatory";
    }
    return "?";
}

/// Indices: [outer][inner], 0 for '+', 1 for '-';
/// xi[o][i] = (+-)_o sqrt((omega (+-)_i i lambda)^2 - m^2).
struct XiBranches {
    cplx lambda;
    std::array<std::array<cplx, 2>, 2> xi{};
    std::array<std::array<Decay, 2>, 2> decay{};
    std::array<std::array<bool, 2>, 2> on_cut{};
};

inline constexpr double sign_of(int index) { return index == 0 ? 1.0 : -1.0; }

inline XiBranches xi_branches(cplx lambda, double omega, double m = 1.0) {
    XiBranches b;
    b.lambda = lambda;
    const cplx I{0.0, 1.0};
    for (int in = 0; in < 2; ++in) {
        const cplx z = omega + sign_of(in) * I * lambda;
        const cplx rad = z * z - m * m;
        const cplx root = branch_sqrt(rad);
        for (int out = 0; out < 2; ++out) {
            const cplx xi = sign_of(out) * root;
            b.xi[out][in] = xi;
            b.on_cut[out][in] = rad.imag() == 0.0 && rad.real() < 0.0;
            const double tol = 1e-14 * (1.0 + std::abs(xi));
            b.decay[out][in] = xi.imag() > tol ? Decay::Right : (xi.imag() < -tol ? Decay::Left : Decay::Oscillatory);
        }
    }
    return b;
}

/// Residual of the dispersion relation (m_-^2 + xi^2 + l^2)(m_+^2 + xi^2 + l^2) - 4 omega^2 xi^2.
inline cplx dispersion(cplx lambda, cplx xi, double omega, double m = 1.0) {
    const double mm = m - omega, mp = m + omega;
    const cplx x2 = xi * xi, l2 = lambda * lambda;
    return (mm * mm + x2 + l2) * (mp * mp + x2 + l2) - 4.0 * omega * omega * x2;
}

// ---------------------------------------------------------------------------
// Asymptotic eigenvectors Xi with A_inf Xi = i xi Xi.

enum class XiConstruction { Reduced, AlternateR2 };

namespace detail {

/// (lambda r, -H r) with H = [[m_-, i xi], [-i xi, -m_+]].
inline Vec<cplx, 4> from_r(cplx lambda, cplx xi, double mm, double mp, cplx r1, cplx r2) {
    const cplx I{0.0, 1.0};
    return {lambda * r1, lambda * r2, -(mm * r1 + I * xi * r2), -(-I * xi * r1 - mp * r2)};
}

}  // namespace detail

/// The eigenvector built from r = lambda (2 i omega xi, m_-^2 + xi^2 + lambda^2).
/// It vanishes at lambda = 0 and where xi = 0 with lambda = +-i m_-.
inline Vec<cplx, 4> xi_vector_r1(cplx lambda, cplx xi, double omega, double m = 1.0) {
    const double mm = m - omega, mp = m + omega;
    const cplx I{0.0, 1.0};
    return detail::from_r(lambda, xi, mm, mp, 2.0 * I * omega * xi, mm * mm + xi * xi + lambda * lambda);
}

/// Alternative with r = lambda (m_+^2 + xi^2 + lambda^2, -2 i omega xi),
/// vanishing where xi = 0 with lambda = +-i m_+.
inline Vec<cplx, 4> xi_vector_r2(cplx lambda, cplx xi, double omega, double m = 1.0) {
    const double mm = m - omega, mp = m + omega;
    const cplx I{0.0, 1.0};
    return detail::from_r(lambda, xi, mm, mp, mp * mp + xi * xi + lambda * lambda, -2.0 * I * omega * xi);
}

/// xi_vector_r1 divided by 2 omega lambda, using
/// m_-^2 + xi^2 + lambda^2 = 2 omega (-m_- + s i lambda) for the root with
/// inner sign s:  (i xi, s i lambda - m_-, s xi, lambda + s i m_-).
/// Analytic through lambda = 0; vanishes only at lambda = -s i m_-.
inline Vec<cplx, 4> xi_vector_reduced(cplx lambda, cplx xi, int inner, double omega, double m = 1.0) {
    const double mm = m - omega, s = sign_of(inner);
    const cplx I{0.0, 1.0};
    return {I * xi, s * I * lambda - mm, s * xi, lambda + s * I * mm};
}

struct AsymptoticBasis {
    XiBranches branches;
    std::array<std::array<Vec<cplx, 4>, 2>, 2> vec{};
    std::array<std::array<XiConstruction, 2>, 2> construction{};
};

namespace detail {

inline Vec<cplx, 4> choose_xi_vector(cplx lambda, cplx xi, int inner, double omega, double m,
                                     XiConstruction& used) {
    const double scale = 1.0 + std::abs(lambda) + std::abs(xi) + m;
    auto v = xi_vector_reduced(lambda, xi, inner, omega, m);
    used = XiConstruction::Reduced;
    if (norm2(v) > 1e-8 * scale) return v;
    v = scaled(xi_vector_r2(lambda, xi, omega, m), 1.0 / (2.0 * omega));
    used = XiConstruction::AlternateR2;
    if (norm2(v) > 1e-8 * scale * scale * scale) return v;
    throw DegenerateDirection("both asymptotic eigenvector constructions vanish; perturb lambda");
}

}  // namespace detail

/// All four asymptotic eigenvectors, one per branch xi[outer][inner].
inline AsymptoticBasis asymptotic_eigenvectors(cplx lambda, double omega, double m = 1.0) {
    AsymptoticBasis b;
    b.branches = xi_branches(lambda, omega, m);
    for (int out = 0; out < 2; ++out)
        for (int in = 0; in < 2; ++in)
            b.vec[out][in] = detail::choose_xi_vector(lambda, b.branches.xi[out][in], in, omega, m,
                                                      b.construction[out][in]);
    return b;
}

/// The two solutions of the asymptotic system that decay as x -> +infinity,
/// one per inner sign, xi_s = i sqrt(m^2 - (omega + s i lambda)^2).
///
/// This is analytic off the continuous spectrum. On the continuous spectrum
/// itself (lambda on the imaginary axis, |Im lambda| >= m_-) the limit from
/// Re lambda > 0 is taken.
struct DecayingPair {
    std::array<cplx, 2> xi{};
    std::array<Vec<cplx, 4>, 2> vec{};
};

inline cplx decaying_xi(cplx lambda, int inner, double omega, double m = 1.0) {
    const cplx I{0.0, 1.0};
    const double s = sign_of(inner);
    const cplx z = omega + s * I * lambda;
    const cplx w = m * m - z * z;
    cplx root;
    if (w.imag() == 0.0 && w.real() < 0.0) {
        // Im w for lambda = a + ib with small a > 0 is -2 s a (omega - s b).
        const double side = -s * (omega - s * lambda.imag());
        root = {0.0, side >= 0.0 ? std::sqrt(-w.real()) : -std::sqrt(-w.real())};
    } else {
        root = std::sqrt(w);
    }
    return I * root;
}

inline DecayingPair decaying_pair(cplx lambda, double omega, double m = 1.0) {
    DecayingPair d;
    for (int in = 0; in < 2; ++in) {
        d.xi[in] = decaying_xi(lambda, in, omega, m);
        XiConstruction used;
        d.vec[in] = detail::choose_xi_vector(lambda, d.xi[in], in, omega, m, used);
    }
    return d;
}

}  // namespace dirac_spectra
