#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "core.hpp"

namespace dirac_spectra {

struct IntegrateOptions {
    double tol = 1e-10;           ///< local relative error per step
    double renorm = 1e6;          ///< keep the stored norm within [1/renorm, renorm]
    double min_step = 1e-14;
    double initial_step = 1e-2;
    double max_step = 0.5;
};

/// Solution of a linear ODE sampled at requested points. The true state at
/// sample i is psi[i] * exp(log_scale[i]).
template <typename T, std::size_t N>
struct Trajectory {
    std::vector<double> x;
    std::vector<Vec<T, N>> psi;
    std::vector<double> log_scale;
    std::size_t steps = 0;

    const Vec<T, N>& back() const { return psi.back(); }
    double back_scale() const { return log_scale.back(); }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_b[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr double dp_e[7] = {71.0 / 57600,      0.0, -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace detail

/// Integrates psi' = A(x) psi from x0 to x1 (either direction) with an
/// adaptive Dormand-Prince pair. `A` is any callable x -> Mat<T, N>.
///
/// The stored state is rescaled to unit norm whenever its norm leaves
/// [1/renorm, renorm]; the removed exponent accumulates in log_scale so that
/// exponentially growing solutions never overflow.
template <typename T, std::size_t N, typename Coeff>
Trajectory<T, N> integrate(Coeff&& A, Vec<T, N> psi0, double x0, double x1, const IntegrateOptions& opt = {},
                           std::span<const double> samples = {}) {
    using detail::dp_a, detail::dp_b, detail::dp_c, detail::dp_e;
    if (!(opt.tol > 0.0)) throw DomainError("integration tolerance must be positive");

    Trajectory<T, N> tr;
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    double x = x0;
    Vec<T, N> y = psi0;
    double scale = 0.0;

    auto renormalize = [&] {
        const double nrm = norm2(y);
        if (nrm > opt.renorm || (nrm > 0.0 && nrm < 1.0 / opt.renorm)) {
            y = scaled(y, 1.0 / nrm);
            scale += std::log(nrm);
        }
    };
    auto record = [&] {
        tr.x.push_back(x);
        tr.psi.push_back(y);
        tr.log_scale.push_back(scale);
    };

    // targets: requested samples strictly inside (x0, x1), then x1
    std::vector<double> targets;
    for (double s : samples)
        if ((s - x0) * dir > 0.0 && (x1 - s) * dir > 0.0) targets.push_back(s);
    std::sort(targets.begin(), targets.end(), [dir](double a, double b) { return a * dir < b * dir; });
    targets.push_back(x1);

    renormalize();
    record();
    if (x0 == x1) return tr;

    double h = std::min(opt.initial_step, std::abs(x1 - x0));
    std::array<Vec<T, N>, 7> k;
    k[0] = A(x) * y;
    for (double target : targets) {
        while ((target - x) * dir > 0.0) {
            bool last = false;
            double step = h;
            if (step >= std::abs(target - x)) {
                step = std::abs(target - x);
                last = true;
            }
            const double hs = dir * step;
            for (int s = 1; s < 7; ++s) {
                Vec<T, N> ys = y;
                for (int j = 0; j < s; ++j)
                    if (dp_a[s][j] != 0.0)
                        for (std::size_t i = 0; i < N; ++i) ys[i] += hs * dp_a[s][j] * k[j][i];
                k[s] = A(x + dp_c[s] * hs) * ys;
            }
            Vec<T, N> ynew = y, err{};
            for (int s = 0; s < 7; ++s)
                for (std::size_t i = 0; i < N; ++i) {
                    ynew[i] += hs * dp_b[s] * k[s][i];
                    err[i] += hs * dp_e[s] * k[s][i];
                }
            const double sc = opt.tol * std::max({norm_inf(y), norm_inf(ynew), std::numeric_limits<double>::min()});
            const double e = norm_inf(err) / sc;
            if (!std::isfinite(e) || !std::isfinite(norm2(ynew))) throw StepUnderflow("non-finite error estimate in ODE step");
            if (e <= 1.0) {
                x = last ? target : x + hs;
                y = ynew;
                k[0] = k[6];
                ++tr.steps;
                const double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
                if (!last) h = std::min(step * fac, opt.max_step);
                const double nrm = norm2(y);
                if (nrm > opt.renorm || (nrm > 0.0 && nrm < 1.0 / opt.renorm)) {
                    renormalize();
                    k[0] = A(x) * y;
                }
            } else {
                h = step * std::max(0.2, 0.9 * std::pow(e, -0.2));
                if (h < opt.min_step) throw StepUnderflow("required ODE step below minimum");
            }
        }
        record();
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Adaptive quadrature

struct QuadOptions {
    double tol = 1e-10;
    int max_subdivisions = 2000;
};

namespace detail {

inline constexpr double gk_x[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double gk_wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
};

template <typename F>
Segment gauss_kronrod(F& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * gk_wk[7];
    double g = fc * gk_wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = hw * gk_x[j];
        const double s = f(c - dx) + f(c + dx);
        k += gk_wk[j] * s;
        if (j % 2 == 1) g += gk_wg[j / 2] * s;
    }
    return {a, b, k * hw, std::abs((k - g) * hw)};
}

template <typename F>
double adaptive(F&& f, double a, double b, const QuadOptions& opt) {
    std::vector<Segment> segs{gauss_kronrod(f, a, b)};
    for (int it = 0; it < opt.max_subdivisions; ++it) {
        double total_err = 0.0, total = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total_err += segs[i].error;
            total += segs[i].value;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        if (total_err <= opt.tol) return total;
        const Segment s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        segs[worst] = gauss_kronrod(f, s.a, mid);
        segs.push_back(gauss_kronrod(f, mid, s.b));
    }
    throw NonConvergence("adaptive quadrature exceeded the subdivision limit");
}

}  // namespace detail

namespace detail {

/// [a, inf): x = a + exp(t) for t in (t_lo, t_hi), plus the short finite
/// piece [a, a + exp(t_lo)].
template <typename F>
double upper_tail(F& f, double a, const QuadOptions& opt) {
    auto g = [&](double t) {
        const double et = std::exp(t);
        const double val = f(a + et) * et;
        return std::isfinite(val) ? val : 0.0;
    };
    const double t_lo = -30.0, t_hi = 7.0;  // x up to a + 1100
    return adaptive(g, t_lo, t_hi, opt) + adaptive(f, a, a + std::exp(t_lo), opt);
}

template <typename F>
double lower_tail(F& f, double b, const QuadOptions& opt) {
    auto r = [&](double x) { return f(-x); };
    return upper_tail(r, -b, opt);
}

}  // namespace detail

/// Integral of f over [a, b], where either end may be infinite. Infinite
/// ends are mapped by x = a + exp(t) style substitutions onto finite
/// t-ranges and integrated with adaptive 15-point Gauss-Kronrod.
template <typename F>
double quad(F&& f, double a, double b, const QuadOptions& opt = {}) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (a == b) return 0.0;
    if (a > b) return -quad(f, b, a, opt);
    const bool lo_inf = a == -inf, hi_inf = b == inf;
    if (lo_inf && hi_inf) {
        QuadOptions half = opt;
        half.tol = 0.5 * opt.tol;
        return detail::lower_tail(f, 0.0, half) + detail::upper_tail(f, 0.0, half);
    }
    if (hi_inf) return detail::upper_tail(f, a, opt);
    if (lo_inf) return detail::lower_tail(f, b, opt);
    return detail::adaptive(f, a, b, opt);
}

}  // namespace dirac_spectra
