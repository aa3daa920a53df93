#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "core.hpp"
#include "linops.hpp"
#include "odeint.hpp"
#include "soliton.hpp"

namespace dirac_spectra {

/// Threshold points where a resonance can appear:
///   HplusMminus  H_+ at lambda = m_-,
///   HplusMplus   H_+ at lambda = -m_+,
///   LImplus      L at lambda = +-i m_+ (reduced scalar channel).
enum class ThresholdTag { HplusMminus, HplusMplus, LImplus };

inline const char* to_string(ThresholdTag t) {
    switch (t) {
        case ThresholdTag::HplusMminus: return "hp-mminus";
        case ThresholdTag::HplusMplus: return "hp-mplus";
        case ThresholdTag::LImplus: return "l-implus";
    }
    return "?";
}

inline ThresholdTag threshold_tag_from_string(const std::string& s) {
    if (s == "hp-mminus") return ThresholdTag::HplusMminus;
    if (s == "hp-mplus") return ThresholdTag::HplusMplus;
    if (s == "l-implus") return ThresholdTag::LImplus;
    throw DomainError("unknown threshold tag: " + s);
}

/// Half-width of the integration window used for threshold phases: the wave
/// has decayed by exp(-9) at its edge.
inline double threshold_window(const SolitonProfile& s) { return std::max(20.0, 9.0 / s.kappa()); }

// ---------------------------------------------------------------------------
// WKB phase integrals

struct WkbPhase {
    double phase = 0.0;
    double clamped_length = 0.0;  ///< measure of the set where the radicand was negative
};

namespace detail {

inline double wkb_radicand(ThresholdTag tag, const ProfilePoint& p, double m) {
    const double v2 = p.v * p.v;
    switch (tag) {
        case ThresholdTag::HplusMminus: return (2.0 * m - v2) * 3.0 * v2;
        case ThresholdTag::HplusMplus: return (2.0 * m - 3.0 * v2) * v2;
        case ThresholdTag::LImplus: return 2.0 * m * p.X();
    }
    return 0.0;
}

/// Length of {x in [a, b] : r(x) < 0}, from sign changes on a fine grid.
template <typename F>
double negative_length(F&& r, double a, double b, std::size_t n = 20000) {
    double len = 0.0, x0 = a, r0 = r(a);
    for (std::size_t k = 1; k <= n; ++k) {
        const double x1 = a + (b - a) * static_cast<double>(k) / static_cast<double>(n), r1 = r(x1);
        if (r0 < 0.0 && r1 < 0.0)
            len += x1 - x0;
        else if ((r0 < 0.0) != (r1 < 0.0))
            len += (x1 - x0) * (r0 < 0.0 ? r0 / (r0 - r1) : r1 / (r1 - r0));
        x0 = x1, r0 = r1;
    }
    return len;
}

}  // namespace detail

/// WKB phase integral over the real line, with the radicand clamped at zero:
///   HplusMminus: int sqrt((2m - v^2) 3 v^2),
///   HplusMplus:  int sqrt((2m - 3 v^2) v^2),
///   LImplus:     int sqrt(2 m X).
/// Beyond the profile grid the wave is a pure exponential, and those tails
/// are integrated in closed form (both integrands tend to c e^{-kappa |x|}).
inline WkbPhase wkb_phase(ThresholdTag tag, const SolitonProfile& s) {
    const double m = s.nl.m();
    auto r = [&](double x) { return detail::wkb_radicand(tag, s.point(x), m); };
    auto f = [&](double x) { return std::sqrt(std::max(0.0, r(x))); };
    QuadOptions q;
    q.tol = 1e-12;
    WkbPhase out;
    if (s.analytic()) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        out.phase = 2.0 * quad(f, 0.0, inf, q);  // integrands are even
        const double reach = std::max(s.grid.R, 60.0 / s.kappa());
        out.clamped_length = 2.0 * detail::negative_length(r, 0.0, std::min(reach, 10.0 / s.kappa() + 10.0));
        return out;
    }
    const double R = s.grid.R;
    out.phase = 2.0 * quad(f, 0.0, R, q) + 2.0 * f(R) / s.kappa();
    out.clamped_length = 2.0 * detail::negative_length(r, 0.0, R);
    return out;
}

/// Leading small-amplitude forms: sqrt(6) int sqrt(X) and sqrt(2) int sqrt(X).
inline double small_amplitude_wkb(ThresholdTag tag, const SolitonProfile& s) {
    auto f = [&](double x) { return std::sqrt(std::max(0.0, s.point(x).X())); };
    QuadOptions q;
    q.tol = 1e-12;
    const double integral = s.analytic()
                                ? 2.0 * quad(f, 0.0, std::numeric_limits<double>::infinity(), q)
                                : 2.0 * quad(f, 0.0, s.grid.R, q) + 2.0 * f(s.grid.R) / s.kappa();
    return (tag == ThresholdTag::HplusMminus ? std::sqrt(6.0) : std::sqrt(2.0)) * integral;
}

/// Closed-form leading term 4 sqrt(3) / sqrt(1 + omega) of sqrt(6) int sqrt(X)
/// for the Gross-Neveu wave, from X ~ 2(1 - omega) e^{-2 kappa |x|}.
inline double small_amplitude_estimate(double omega) { return 4.0 * std::sqrt(3.0) / std::sqrt(1.0 + omega); }

// ---------------------------------------------------------------------------
// Exact threshold phases

/// Coefficient matrix of the threshold system at x, state (M, N) for the H_+
/// tags and (Gamma, Gamma') for the L channel.
inline Mat<double, 2> threshold_system(ThresholdTag tag, const SolitonProfile& s, double x) {
    const auto p = s.point(x);
    switch (tag) {
        case ThresholdTag::HplusMminus: return hplus_system(p, s.nl, s.omega(), s.params.m_minus);
        case ThresholdTag::HplusMplus: return hplus_system(p, s.nl, s.omega(), -s.params.m_plus);
        case ThresholdTag::LImplus: return {{{0.0, 1.0}, {-2.0 * s.nl.m() * p.X(), 0.0}}};
    }
    return {};
}

/// Limit of the solution at x = -infinity: (1, 0) for H_+ at m_- and for the
/// L channel, (0, 1) for H_+ at -m_+.
inline Vec<double, 2> threshold_initial(ThresholdTag tag) {
    return tag == ThresholdTag::HplusMplus ? Vec<double, 2>{0.0, 1.0} : Vec<double, 2>{1.0, 0.0};
}

struct ThresholdPhaseOptions {
    double R = 0.0;            ///< 0 selects threshold_window(profile)
    double sample_step = 0.01;
    IntegrateOptions ode{};
};

/// Total continuous rotation of the plane vector of the threshold solution
/// over [-R, R], started at -R from its limit at -infinity. Returned as |dtheta|.
inline double exact_threshold_phase(ThresholdTag tag, const SolitonProfile& s, const ThresholdPhaseOptions& opt = {}) {
    const double R = opt.R > 0.0 ? opt.R : threshold_window(s);
    if (!s.analytic() && R > s.grid.R + 1e-12) throw DomainError("R exceeds the profile grid");
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * R / opt.sample_step));
    std::vector<double> xs(n - 1);
    for (std::size_t k = 1; k < n; ++k) xs[k - 1] = -R + 2.0 * R * static_cast<double>(k) / static_cast<double>(n);
    auto A = [&](double x) { return threshold_system(tag, s, x); };
    const auto tr = integrate<double, 2>(A, threshold_initial(tag), -R, R, opt.ode, xs);
    double theta = std::atan2(tr.psi[0][1], tr.psi[0][0]);
    const double theta0 = theta;
    for (std::size_t k = 1; k < tr.psi.size(); ++k) {
        const double a = std::atan2(tr.psi[k][1], tr.psi[k][0]);
        theta += std::remainder(a - theta, 2.0 * pi);
    }
    return std::abs(theta - theta0);
}

using ProfileFactory = std::function<SolitonProfile(double omega)>;

/// Profile with a grid wide enough for threshold_window.
inline ProfileFactory default_profile_factory(const Nonlinearity& nl, double h = 0.01) {
    return [nl, h](double omega) {
        const auto p = ModelParams::make(nl.m(), omega);
        const Grid grid = Grid::make(std::max(20.0, 9.0 / p.kappa) + 1.0, h);
        return nl.is_gross_neveu() ? closed_form_profile(omega, grid) : quadrature_profile(nl, omega, grid);
    };
}

struct ResonancePhase {
    double omega = 0.0;
    double exact_phase = 0.0;
    double wkb_phase = 0.0;
    int n_nearest = 0;
    double clamped_length = 0.0;
};

inline ResonancePhase resonance_phase(ThresholdTag tag, const SolitonProfile& s, const ThresholdPhaseOptions& opt = {}) {
    ResonancePhase r;
    r.omega = s.omega();
    r.exact_phase = exact_threshold_phase(tag, s, opt);
    const auto w = wkb_phase(tag, s);
    r.wkb_phase = w.phase;
    r.clamped_length = w.clamped_length;
    r.n_nearest = static_cast<int>(std::lround(r.exact_phase / pi));
    return r;
}

struct Crossing {
    double omega = 0.0;
    int n = 0;
    bool boundary = false;      ///< reached only in the limit omega -> m
    double phase_at_omega = 0.0;  ///< exact phase at omega (extrapolated when boundary)
};

struct CrossingOptions {
    double omega_tol = 1e-4;
    double boundary_tol = 0.1;   ///< |extrapolated phase - n pi| accepted at omega = m
    double boundary_gap = 0.02;  ///< the bracket must reach within this of m to try the limit
    ThresholdPhaseOptions phase{};
};

/// omega in [a, b] where the exact phase equals n pi, by bisection.
///
/// When the phase does not straddle n pi inside the bracket but the bracket
/// reaches up to the edge omega = m, the phase is extrapolated linearly from
/// the two frequencies b - 0.01 and b; an extrapolated value within
/// boundary_tol of n pi is reported as a crossing in the limit omega -> m.
inline Crossing resonance_crossing(ThresholdTag tag, int n, double a, double b, const ProfileFactory& make,
                                   double m = 1.0, const CrossingOptions& opt = {}) {
    if (!(a < b)) throw DomainError("bracket must satisfy a < b");
    const double target = n * pi;
    auto phase = [&](double w) { return exact_threshold_phase(tag, make(w), opt.phase); };
    double fa = phase(a) - target;
    const double pb = phase(b);
    double fb = pb - target;
    if (fa == 0.0) return {a, n, false, target};
    if (fb == 0.0) return {b, n, false, target};
    if ((fa < 0.0) == (fb < 0.0)) {
        if (m - b <= opt.boundary_gap) {
            const double w0 = b - 0.01, p0 = phase(w0);
            const double limit = pb + (pb - p0) / (b - w0) * (m - b);
            if (std::abs(limit - target) < opt.boundary_tol) return {m, n, true, limit};
        }
        throw NoCrossing("exact phase does not cross n pi in the bracket");
    }
    while (b - a > opt.omega_tol) {
        const double c = 0.5 * (a + b), fc = phase(c) - target;
        if ((fc < 0.0) == (fa < 0.0))
            a = c, fa = fc;
        else
            b = c, fb = fc;
    }
    const double w = 0.5 * (a + b);
    return {w, n, false, phase(w)};
}

/// Phase extrapolated to omega -> m from the two frequencies w1 < w2.
inline double phase_limit(ThresholdTag tag, const ProfileFactory& make, double w1, double w2, double m = 1.0,
                          const ThresholdPhaseOptions& opt = {}) {
    const double p1 = exact_threshold_phase(tag, make(w1), opt), p2 = exact_threshold_phase(tag, make(w2), opt);
    return p2 + (p2 - p1) / (w2 - w1) * (m - w2);
}

// ---------------------------------------------------------------------------
// WKB toy problem: -Z'' - 2 sech^2(x) Z = 0 with exact solution Z = -tanh x.

struct WkbToyReport {
    double exact_phase = 0.0;      ///< rotation of (Z, Z') over the line
    double wkb_phase = 0.0;        ///< int sqrt(2) sech
    double relative_error = 0.0;   ///< wkb / exact - 1
    double exact_tail = 0.0;       ///< c in Z ~ 1 - c e^{2x}, x -> -inf
    double wkb_tail = 0.0;         ///< the same for cos(int_{-inf}^x sqrt(2) sech)
};

inline WkbToyReport wkb_toy_check(double R = 20.0) {
    WkbToyReport rep;
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * R / 0.01));
    std::vector<double> xs(n - 1);
    for (std::size_t k = 1; k < n; ++k) xs[k - 1] = -R + 2.0 * R * static_cast<double>(k) / static_cast<double>(n);
    auto A = [](double x) {
        const double sech = 1.0 / std::cosh(x);
        return Mat<double, 2>{{{0.0, 1.0}, {-2.0 * sech * sech, 0.0}}};
    };
    IntegrateOptions o;
    o.tol = 1e-12;
    const auto tr = integrate<double, 2>(A, Vec<double, 2>{1.0, 0.0}, -R, R, o, xs);
    double theta = 0.0;
    for (std::size_t k = 1; k < tr.psi.size(); ++k)
        theta += std::remainder(std::atan2(tr.psi[k][1], tr.psi[k][0]) - theta, 2.0 * pi);
    rep.exact_phase = std::abs(theta);

    QuadOptions q;
    q.tol = 1e-13;
    auto f = [](double y) { return std::sqrt(2.0) / std::cosh(y); };
    rep.wkb_phase = quad(f, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), q);
    rep.relative_error = rep.wkb_phase / rep.exact_phase - 1.0;

    // Tail coefficients read off at x = -12 where e^{2x} ~ 4e-11.
    const double x = -12.0, e2 = std::exp(2.0 * x);
    rep.exact_tail = (1.0 + std::tanh(x)) / e2;
    const double phase_x = quad(f, -std::numeric_limits<double>::infinity(), x, q);
    rep.wkb_tail = 2.0 * std::pow(std::sin(0.5 * phase_x), 2) / e2;  // 1 - cos
    return rep;
}

}  // namespace dirac_spectra
