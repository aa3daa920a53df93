#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "core.hpp"
#include "model.hpp"

namespace dirac_spectra {

/// Profile values at one point: the spinor (v, u) and its derivative.
struct ProfilePoint {
    double v = 0.0;
    double u = 0.0;
    double vprime = 0.0;
    double uprime = 0.0;

    double X() const { return v * v - u * u; }
    double Y() const { return v * u; }
    double Z() const { return v * v + u * u; }
};

/// Uniform symmetric grid on [-R, R] with an odd number of points, so that
/// x = 0 is a node and x_{n-1-i} = -x_i exactly.
struct Grid {
    double R = 20.0;
    double h = 0.01;
    std::vector<double> x;

    static Grid make(double R, double h_max) {
        if (!(R > 0.0) || !(h_max > 0.0)) throw DomainError("grid needs R > 0 and h > 0");
        Grid g;
        const auto half = static_cast<std::size_t>(std::ceil(R / h_max - 1e-9));
        g.R = R;
        g.h = R / static_cast<double>(half);
        g.x.resize(2 * half + 1);
        for (std::size_t i = 0; i <= 2 * half; ++i) {
            const double k = static_cast<double>(i) - static_cast<double>(half);
            g.x[i] = k * g.h;
        }
        return g;
    }
    std::size_t size() const { return x.size(); }
    std::size_t center() const { return x.size() / 2; }
};

/// Sampled solitary-wave profile phi_omega = (v, u).
///
/// The Gross-Neveu closed form is evaluated exactly off the grid; profiles
/// built by quadrature are interpolated with cubic Hermite polynomials, which
/// is accurate to O(h^4) because the derivatives are sampled as well.
class SolitonProfile {
public:
    Nonlinearity nl;
    ModelParams params;
    double X_omega = 0.0;
    Grid grid;
    std::vector<double> v, u, vprime, uprime;

    double omega() const { return params.omega; }
    double kappa() const { return params.kappa; }
    double mu() const { return params.mu; }
    bool analytic() const { return analytic_; }

    double X(std::size_t i) const { return v[i] * v[i] - u[i] * u[i]; }
    double Y(std::size_t i) const { return v[i] * u[i]; }
    double Z(std::size_t i) const { return v[i] * v[i] + u[i] * u[i]; }

    ProfilePoint point(double x) const {
        if (analytic_) return closed_form_point(params, x);
        const auto& xs = grid.x;
        if (x < xs.front() - 1e-12 || x > xs.back() + 1e-12)
            throw DomainError("profile evaluated outside its grid");
        const double s = (x - xs.front()) / grid.h;
        auto i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(xs.size() - 2)));
        const double t = s - static_cast<double>(i);
        const double h = grid.h;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
        const double d01 = -d00, d11 = 3 * t * t - 2 * t;
        ProfilePoint p;
        p.v = h00 * v[i] + h10 * h * vprime[i] + h01 * v[i + 1] + h11 * h * vprime[i + 1];
        p.u = h00 * u[i] + h10 * h * uprime[i] + h01 * u[i + 1] + h11 * h * uprime[i + 1];
        p.vprime = (d00 * v[i] + d01 * v[i + 1]) / h + d10 * vprime[i] + d11 * vprime[i + 1];
        p.uprime = (d00 * u[i] + d01 * u[i + 1]) / h + d10 * uprime[i] + d11 * uprime[i + 1];
        return p;
    }

    /// Closed-form Gross-Neveu wave at a single point.
    ///
    /// With y = kappa x and e = exp(-2|y|) the chain tan(Theta) = -sqrt(mu)
    /// tanh(y), X = 2(1 - omega/cos 2Theta), Z = X/cos 2Theta,
    /// v = sqrt(Z) cos Theta, u = -sqrt(Z) sin Theta reduces to
    ///   v = sqrt(2 m_-) * 2 e^{-|y|} (1 + e) / ((1 + e)^2 - mu (1 - e)^2),
    ///   u = sqrt(mu) tanh(y) v,
    /// which is free of cancellation in the tails.
    static ProfilePoint closed_form_point(const ModelParams& p, double x) {
        const double y = p.kappa * x;
        const double e = std::exp(-2.0 * std::abs(y));
        const double tau = std::copysign((1.0 - e) / (1.0 + e), y);
        const double den = (1.0 + e) * (1.0 + e) - p.mu * (1.0 - e) * (1.0 - e);
        ProfilePoint q;
        q.v = std::sqrt(2.0 * p.m_minus) * 2.0 * std::exp(-std::abs(y)) * (1.0 + e) / den;
        q.u = std::sqrt(p.mu) * tau * q.v;
        const double g = 1.0 - q.X();
        q.vprime = -(p.omega + g) * q.u;
        q.uprime = (p.omega - g) * q.v;
        return q;
    }

    /// Set by closed_form_profile: point() then evaluates the exact formula.
    bool analytic_ = false;
};

/// Effective potential U_omega(X) = -2 G(X)^2 + 2 omega^2 X^2.
inline double effective_potential(const Nonlinearity& nl, double omega, double X) {
    const double G = nl.G(X);
    return -2.0 * G * G + 2.0 * omega * omega * X * X;
}

/// dU/dX
inline double effective_potential_slope(const Nonlinearity& nl, double omega, double X) {
    return -4.0 * nl.G(X) * nl.g(X) + 4.0 * omega * omega * X;
}

/// d^2U/dX^2
inline double effective_potential_curvature(const Nonlinearity& nl, double omega, double X) {
    const double g = nl.g(X);
    return -4.0 * g * g - 4.0 * nl.G(X) * nl.gprime(X) + 4.0 * omega * omega;
}

inline SolitonProfile closed_form_profile(double omega, const Grid& grid) {
    if (!(omega > 0.0 && omega < 1.0)) throw DomainError("omega outside (0, m)");
    SolitonProfile s;
    s.nl = gross_neveu();
    s.params = ModelParams::make(1.0, omega);
    s.X_omega = 2.0 * (1.0 - omega);
    s.grid = grid;
    s.analytic_ = true;
    const std::size_t n = grid.size();
    s.v.resize(n), s.u.resize(n), s.vprime.resize(n), s.uprime.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = SolitonProfile::closed_form_point(s.params, grid.x[i]);
        s.v[i] = p.v, s.u[i] = p.u, s.vprime[i] = p.vprime, s.uprime[i] = p.uprime;
    }
    return s;
}

/// Solitary wave for a general nonlinearity by quadrature of
/// X' = -2 sqrt(G(X)^2 - omega^2 X^2) on x > 0, mirrored to x < 0.
///
/// The radicand vanishes at X(0) = X_omega, where the square root is not
/// smooth. Near the center the equivalent smooth system X'' = 4 (G g - omega^2 X)
/// is stepped instead; once X has dropped below X_omega / 2 the first-order
/// form takes over, since it is attracted to the decaying branch while the
/// second-order one is not. Each grid interval gets four RK4 substeps.
inline SolitonProfile quadrature_profile(const Nonlinearity& nl, double omega, const Grid& grid) {
    const double Xw = amplitude(nl, omega);
    SolitonProfile s;
    s.nl = nl;
    s.params = ModelParams::make(nl.m(), omega);
    s.X_omega = Xw;
    s.grid = grid;
    s.analytic_ = false;

    const double tol = 1e-10 * std::max(1.0, Xw * Xw);
    auto radicand = [&](double X) {
        const double G = nl.G(X);
        return G * G - omega * omega * X * X;
    };
    auto rhs = [&](double X) {
        const double r = radicand(X);
        if (r < -tol) throw NegativeRadicand("G(X)^2 - omega^2 X^2 < 0 during soliton quadrature");
        return -2.0 * std::sqrt(std::max(r, 0.0));
    };
    auto accel = [&](double X) { return 4.0 * (nl.G(X) * nl.g(X) - omega * omega * X); };

    const std::size_t n = grid.size(), c = grid.center();
    const double h = grid.h, dx = 0.25 * h;
    std::vector<double> Xs(c + 1);
    Xs[0] = Xw;

    auto rk4 = [&](double X0) {
        const double k1 = rhs(X0);
        const double k2 = rhs(X0 + 0.5 * dx * k1);
        const double k3 = rhs(X0 + 0.5 * dx * k2);
        const double k4 = rhs(X0 + dx * k3);
        return X0 + dx * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    };
    auto rk4_smooth = [&](double& X, double& P) {
        const double x1 = P, p1 = accel(X);
        const double x2 = P + 0.5 * dx * p1, p2 = accel(X + 0.5 * dx * x1);
        const double x3 = P + 0.5 * dx * p2, p3 = accel(X + 0.5 * dx * x2);
        const double x4 = P + dx * p3, p4 = accel(X + dx * x3);
        X += dx * (x1 + 2 * x2 + 2 * x3 + x4) / 6.0;
        P += dx * (p1 + 2 * p2 + 2 * p3 + p4) / 6.0;
    };
    double X = Xw, P = 0.0;
    bool smooth = true;
    for (std::size_t i = 1; i <= c; ++i) {
        for (int k = 0; k < 4; ++k) {
            if (smooth)
                rk4_smooth(X, P);
            else
                X = rk4(X);
        }
        if (smooth && X < 0.5 * Xw) smooth = false;
        Xs[i] = X;
    }

    s.v.resize(n), s.u.resize(n), s.vprime.resize(n), s.uprime.resize(n);
    for (std::size_t k = 0; k <= c; ++k) {
        const double Xk = std::max(Xs[k], 0.0);
        const double Y = k == 0 ? 0.0 : std::sqrt(std::max(radicand(Xk), 0.0)) / (2.0 * omega);
        const double Zk = nl.G(Xk) / omega;
        double vk = std::sqrt(std::max(0.5 * (Zk + Xk), 0.0));
        double uk = 0.0;
        if (vk > 1e-150)
            uk = Y / vk;
        else
            uk = std::sqrt(std::max(0.5 * (Zk - Xk), 0.0));  // Y >= 0 on x > 0
        const double g = nl.g(Xk);
        for (const std::size_t i : {c + k, c - k}) {
            const double sgn = i >= c ? 1.0 : -1.0;
            s.v[i] = vk;
            s.u[i] = sgn * uk;
            s.vprime[i] = -(omega + g) * s.u[i];
            s.uprime[i] = (omega - g) * s.v[i];
        }
    }
    return s;
}

/// Charge Q = integral of v^2 + u^2, by the trapezoidal rule (spectrally
/// accurate for smooth decaying integrands) plus the exponential tails
/// beyond +-R, where Z decays like exp(-2 kappa |x|).
inline double charge(const SolitonProfile& s) {
    const std::size_t n = s.grid.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += (i == 0 || i + 1 == n ? 0.5 : 1.0) * s.Z(i);
    const double tail = (s.Z(0) + s.Z(n - 1)) / (2.0 * s.kappa());
    return sum * s.grid.h + tail;
}

/// Pointwise residuals of the invariants of a profile.
struct ProfileResiduals {
    double hamiltonian = 0.0;  ///< max |h(v, u)|
    double system = 0.0;       ///< max residual of the first-order stationary system
    double parity = 0.0;       ///< max |v(x) - v(-x)|, |u(x) + u(-x)|
    double y_relation = 0.0;   ///< max |Y + X'/(4 omega)|
    double charge_relation = 0.0;  ///< max |omega Z - G(X)|
};

/// Residuals, with the derivatives in the first-order system taken by
/// fourth-order finite differences when `use_fd` is set (otherwise the
/// sampled derivatives are used).
inline ProfileResiduals residuals(const SolitonProfile& s, double x_max, bool use_fd = true) {
    ProfileResiduals r;
    const double w = s.omega();
    const auto& x = s.grid.x;
    const std::size_t n = x.size();
    const double h = s.grid.h;
    auto d1 = [&](const std::vector<double>& f, std::size_t i) {
        return (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
    };
    std::vector<double> Xv(n);
    for (std::size_t i = 0; i < n; ++i) Xv[i] = s.X(i);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(x[i]) > x_max + 1e-12) continue;
        const double X = Xv[i], Z = s.Z(i), G = s.nl.G(X), g = s.nl.g(X);
        r.hamiltonian = std::max(r.hamiltonian, std::abs(-0.5 * w * Z + 0.5 * G));
        r.charge_relation = std::max(r.charge_relation, std::abs(w * Z - G));
        const std::size_t j = n - 1 - i;
        r.parity = std::max({r.parity, std::abs(s.v[i] - s.v[j]), std::abs(s.u[i] + s.u[j])});
        if (i < 2 || i + 2 >= n) continue;
        const double vp = use_fd ? d1(s.v, i) : s.vprime[i];
        const double up = use_fd ? d1(s.u, i) : s.uprime[i];
        r.system = std::max({r.system, std::abs(w * s.v[i] - up - g * s.v[i]),
                             std::abs(w * s.u[i] + vp + g * s.u[i])});
        const double Xp = use_fd ? d1(Xv, i) : 2 * (s.v[i] * s.vprime[i] - s.u[i] * s.uprime[i]);
        r.y_relation = std::max(r.y_relation, std::abs(s.Y(i) + Xp / (4 * w)));
    }
    return r;
}

}  // namespace dirac_spectra
