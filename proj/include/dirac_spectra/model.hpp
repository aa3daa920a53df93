#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace dirac_spectra {

/// Scalar self-interaction of the nonlinear Dirac equation.
///
/// The antiderivative G is stored as a polynomial with G(0) = 0; g = G' and
/// g' = G'' follow by differentiation, and m = g(0) is the mass.
class Nonlinearity {
public:
    /// Builds a nonlinearity from the coefficients of G (lowest degree
    /// first). The constant term is forced to zero.
    static Nonlinearity from_G_coeffs(std::vector<double> coeffs, std::string name = "polynomial") {
        if (coeffs.empty()) coeffs.push_back(0.0);
        coeffs[0] = 0.0;
        while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
        Nonlinearity nl;
        nl.G_ = std::move(coeffs);
        nl.g_ = derivative(nl.G_);
        nl.gp_ = derivative(nl.g_);
        nl.name_ = std::move(name);
        if (!(nl.m() > 0.0))
            throw DomainError("nonlinearity must satisfy m = g(0) > 0");
        return nl;
    }

    double G(double X) const { return horner(G_, X); }
    double g(double X) const { return horner(g_, X); }
    double gprime(double X) const { return horner(gp_, X); }
    double m() const { return g_.empty() ? 0.0 : g_[0]; }

    const std::vector<double>& G_coeffs() const { return G_; }
    const std::string& name() const { return name_; }
    bool is_gross_neveu() const { return name_ == "gross-neveu"; }

private:
    static double horner(const std::vector<double>& c, double x) {
        double r = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
        return r;
    }
    static std::vector<double> derivative(const std::vector<double>& c) {
        std::vector<double> d;
        for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
        if (d.empty()) d.push_back(0.0);
        return d;
    }

    std::vector<double> G_{0.0};
    std::vector<double> g_{0.0};
    std::vector<double> gp_{0.0};
    std::string name_;
};

/// Massive Gross-Neveu model: G(X) = X - X^2/2, g(X) = 1 - X, m = 1.
inline Nonlinearity gross_neveu() { return Nonlinearity::from_G_coeffs({0.0, 1.0, -0.5}, "gross-neveu"); }

/// Frequency-dependent constants of a solitary wave.
struct ModelParams {
    double m = 1.0;
    double omega = 0.0;
    double m_minus = 0.0;  ///< m - omega, right edge of the spectral gap
    double m_plus = 0.0;   ///< m + omega
    double kappa = 0.0;    ///< sqrt(m^2 - omega^2), spatial decay rate of the wave
    double mu = 0.0;       ///< (m - omega)/(m + omega)

    static ModelParams make(double m, double omega) {
        if (!(omega > 0.0 && omega < m)) throw DomainError("omega outside (0, m)");
        ModelParams p;
        p.m = m;
        p.omega = omega;
        p.m_minus = m - omega;
        p.m_plus = m + omega;
        p.kappa = std::sqrt(m * m - omega * omega);
        p.mu = p.m_minus / p.m_plus;
        return p;
    }
};

struct AmplitudeOptions {
    double x_min = 1e-12;
    double x_max = 10.0;   ///< upper end of the root search
    int scan_points = 20000;
};

/// Smallest positive root X_omega of omega*X = G(X), subject to
/// omega != g(X_omega) and omega*X < G(X) on (0, X_omega).
inline double amplitude(const Nonlinearity& nl, double omega, const AmplitudeOptions& opt = {}) {
    const double m = nl.m();
    if (!(omega > 0.0 && omega < m)) throw DomainError("omega outside (0, m)");
    if (nl.is_gross_neveu()) return 2.0 * (1.0 - omega);

    auto f = [&](double X) { return nl.G(X) - omega * X; };
    double a = opt.x_min;
    if (!(f(a) > 0.0)) throw NoSolitaryWave("G(X) - omega X is not positive near X = 0");
    const double dx = (opt.x_max - opt.x_min) / opt.scan_points;
    double b = a;
    bool found = false;
    for (int i = 1; i <= opt.scan_points; ++i) {
        b = opt.x_min + i * dx;
        if (f(b) <= 0.0) {
            found = true;
            break;
        }
        a = b;
    }
    if (!found) throw NoSolitaryWave("no root of omega X = G(X) in the search interval");
    for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double c = 0.5 * (a + b);
        (f(c) > 0.0 ? a : b) = c;
    }
    const double X = 0.5 * (a + b);
    if (std::abs(nl.g(X) - omega) < 1e-10)
        throw NoSolitaryWave("degenerate root: omega = g(X_omega)");
    for (int i = 1; i < 1000; ++i) {
        const double s = X * i / 1000.0;
        if (!(f(s) > 0.0)) throw NoSolitaryWave("omega X < G(X) fails inside (0, X_omega)");
    }
    return X;
}

}  // namespace dirac_spectra
