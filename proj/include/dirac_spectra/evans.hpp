#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <optional>
#include <thread>
#include <vector>

#include "core.hpp"
#include "linops.hpp"
#include "odeint.hpp"
#include "soliton.hpp"

namespace dirac_spectra {

/// X^- : (even, odd, even, odd) components; X^+ : (odd, even, odd, even).
enum class Parity { Xminus, Xplus };

inline const char* to_string(Parity p) { return p == Parity::Xminus ? "X-" : "X+"; }

/// Reflection x -> -x restricted to a parity class: the sign pattern that a
/// member satisfies, Psi(-x) = diag(signs) Psi(x).
inline Vec<double, 4> parity_signs(Parity p) {
    return p == Parity::Xminus ? Vec<double, 4>{1, -1, 1, -1} : Vec<double, 4>{-1, 1, -1, 1};
}

struct EvansOptions {
    double R = 20.0;
    IntegrateOptions ode{};
};

// ---------------------------------------------------------------------------
// Shooting from the center.

/// Solutions Psi_1..Psi_4 of (L - lambda) Psi = 0 with Psi_j(0) = e_j,
/// integrated from 0 to x_end. Psi_1, Psi_3 lie in X^-; Psi_2, Psi_4 in X^+.
inline std::array<Trajectory<cplx, 4>, 4> shoot(cplx lambda, const SolitonProfile& s, double x_end,
                                                const IntegrateOptions& opt = {},
                                                std::span<const double> samples = {}) {
    const auto op = assemble(OperatorKind::L, s);
    auto A = [&](double x) { return op.l_matrix(x, lambda); };
    std::array<Trajectory<cplx, 4>, 4> out;
    for (std::size_t j = 0; j < 4; ++j) {
        Vec<cplx, 4> e{};
        e[j] = 1.0;
        out[j] = integrate<cplx, 4>(A, e, 0.0, x_end, opt, samples);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exterior algebra on C^4: Plucker coordinates of 2-planes.

namespace detail {
inline constexpr std::array<std::array<int, 2>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline int pair_index(int i, int j) {
    for (int k = 0; k < 6; ++k)
        if (pairs[k][0] == i && pairs[k][1] == j) return k;
    return -1;
}
}  // namespace detail

/// a ^ b in the basis e_i ^ e_j, i < j.
inline Vec<cplx, 6> wedge(const Vec<cplx, 4>& a, const Vec<cplx, 4>& b) {
    Vec<cplx, 6> w{};
    for (int k = 0; k < 6; ++k) {
        const auto [i, j] = detail::pairs[k];
        w[k] = a[i] * b[j] - a[j] * b[i];
    }
    return w;
}

/// Additive second compound of A: (a ^ b)' = A^(2) (a ^ b) when a' = A a, b' = A b.
inline Mat<cplx, 6> second_compound(const Mat<cplx, 4>& A) {
    Mat<cplx, 6> c{};
    for (int col = 0; col < 6; ++col) {
        const auto [k, l] = detail::pairs[col];
        // A e_k ^ e_l + e_k ^ A e_l
        for (int p = 0; p < 4; ++p) {
            if (p != l) {
                const int lo = std::min(p, l), hi = std::max(p, l);
                const double sg = p < l ? 1.0 : -1.0;
                c[detail::pair_index(lo, hi)][col] += sg * A[p][k];
            }
            if (p != k) {
                const int lo = std::min(k, p), hi = std::max(k, p);
                const double sg = k < p ? 1.0 : -1.0;
                c[detail::pair_index(lo, hi)][col] += sg * A[p][l];
            }
        }
    }
    return c;
}

/// det[a, b, c, d] from the Plucker coordinates of a ^ b and c ^ d
/// (Laplace expansion along the first two columns).
inline cplx wedge_determinant(const Vec<cplx, 6>& ab, const Vec<cplx, 6>& cd) {
    cplx det{};
    for (int k = 0; k < 6; ++k) {
        const auto [i, j] = detail::pairs[k];
        int rest[2], r = 0;
        for (int q = 0; q < 4; ++q)
            if (q != i && q != j) rest[r++] = q;
        const double sg = ((i + j + 1) % 2 == 0) ? 1.0 : -1.0;
        det += sg * ab[k] * cd[detail::pair_index(rest[0], rest[1])];
    }
    return det;
}

// ---------------------------------------------------------------------------
// Evans functions

/// One evaluation of E^-(lambda, R) and E^+(lambda, R).
///
/// The raw determinants equal Eminus * exp(scale) and Eplus * exp(scale).
struct EvansSample {
    cplx lambda;
    double R = 0.0;
    cplx Eminus, Eplus;
    double scale = 0.0;

    cplx E(Parity p) const { return p == Parity::Xminus ? Eminus : Eplus; }
};

/// Shoots the 2-plane spanned by the two center solutions of one parity
/// class, as a single vector in the 6-dimensional exterior square. This keeps
/// the two solutions from collapsing onto the dominant growing mode.
inline Trajectory<cplx, 6> shoot_plane(cplx lambda, const SolitonProfile& s, Parity parity, double R,
                                       const IntegrateOptions& opt = {}) {
    const auto op = assemble(OperatorKind::L, s);
    auto A = [&](double x) { return second_compound(op.l_matrix(x, lambda)); };
    Vec<cplx, 6> w0{};
    w0[parity == Parity::Xminus ? detail::pair_index(0, 2) : detail::pair_index(1, 3)] = 1.0;
    return integrate<cplx, 6>(A, w0, 0.0, R, opt);
}

inline EvansSample evans_pair(cplx lambda, const SolitonProfile& s, const EvansOptions& opt = {}) {
    if (opt.R > s.grid.R + 1e-12 && !s.analytic()) throw DomainError("R exceeds the profile grid");
    const auto dec = decaying_pair(lambda, s.omega(), s.nl.m());
    const auto xi_plane = wedge(dec.vec[0], dec.vec[1]);
    const auto wm = shoot_plane(lambda, s, Parity::Xminus, opt.R, opt.ode);
    const auto wp = shoot_plane(lambda, s, Parity::Xplus, opt.R, opt.ode);
    const cplx em = wedge_determinant(wm.back(), xi_plane);
    const cplx ep = wedge_determinant(wp.back(), xi_plane);
    EvansSample e;
    e.lambda = lambda;
    e.R = opt.R;
    e.scale = std::max(wm.back_scale(), wp.back_scale());
    e.Eminus = em * std::exp(wm.back_scale() - e.scale);
    e.Eplus = ep * std::exp(wp.back_scale() - e.scale);
    return e;
}

/// E(lambda, R) exp(i (xi_+ + xi_-) R): removes the growth and rotation of the
/// two growing modes, leaving a finite limit as R -> infinity.
inline cplx limit_normalized(const EvansSample& e, Parity p, double omega, double m = 1.0) {
    const cplx xi = decaying_xi(e.lambda, 0, omega, m) + decaying_xi(e.lambda, 1, omega, m);
    return e.E(p) * std::exp(e.scale + cplx{0.0, 1.0} * xi * e.R);
}

/// The same determinants assembled directly from the four shot solutions.
/// Independent of the exterior-algebra route; used as a cross-check.
inline EvansSample evans_pair_direct(cplx lambda, const SolitonProfile& s, const EvansOptions& opt = {}) {
    const auto dec = decaying_pair(lambda, s.omega(), s.nl.m());
    const auto psi = shoot(lambda, s, opt.R, opt.ode);
    auto det_of = [&](int a, int b) {
        return determinant(from_columns<cplx, 4>({psi[a].back(), psi[b].back(), dec.vec[0], dec.vec[1]}));
    };
    EvansSample e;
    e.lambda = lambda;
    e.R = opt.R;
    const double sm = psi[0].back_scale() + psi[2].back_scale();
    const double sp = psi[1].back_scale() + psi[3].back_scale();
    e.scale = std::max(sm, sp);
    e.Eminus = det_of(0, 2) * std::exp(sm - e.scale);
    e.Eplus = det_of(1, 3) * std::exp(sp - e.scale);
    return e;
}

// ---------------------------------------------------------------------------
// Region scans

struct Rect {
    double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
};

struct CandidateCell {
    std::size_t i = 0, j = 0;  ///< lower-left node (re index, im index)
    Parity parity = Parity::Xminus;
    cplx center;
};

/// Node (i, j) sits at re_lo + i dre + i (im_lo + j dim); stored at j * nre + i.
struct RegionMap {
    Rect rect;
    std::size_t nre = 0, nim = 0;
    std::vector<EvansSample> nodes;
    std::vector<CandidateCell> candidates;

    const EvansSample& at(std::size_t i, std::size_t j) const { return nodes[j * nre + i]; }
    std::size_t count(Parity p) const {
        return static_cast<std::size_t>(
            std::count_if(candidates.begin(), candidates.end(), [p](const CandidateCell& c) { return c.parity == p; }));
    }
    /// Median of |E| over the nodes; the scale for "E is approximately zero".
    double median_abs(Parity p) const {
        std::vector<double> a;
        for (const auto& n : nodes) a.push_back(std::abs(n.E(p)) * std::exp(n.scale - nodes.front().scale));
        if (a.empty()) return 0.0;
        std::nth_element(a.begin(), a.begin() + a.size() / 2, a.end());
        return a[a.size() / 2];
    }
};

struct ScanOptions {
    EvansOptions evans{};
    unsigned threads = 1;
};

/// Runs f(k) for k in [0, n) over at most `threads` workers. Results are
/// written by index, so the outcome never depends on scheduling.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads == 1) {
        for (std::size_t k = 0; k < n; ++k) f(k);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t k = t; k < n; k += threads) f(k);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// True when the values are not all of one strict sign. An exact zero at a
/// node counts as the level curve passing through it, which matters on the
/// axes where E is purely imaginary.
inline bool straddles_zero(std::initializer_list<double> vals) {
    bool pos = false, neg = false;
    for (double v : vals) {
        pos |= v >= 0.0;
        neg |= v <= 0.0;
    }
    return pos && neg;
}

/// Evaluates E^+- on an nre x nim grid over the rectangle and flags every cell
/// across which both Re E and Im E change sign (both zero level curves pass
/// through the cell).
inline RegionMap scan_region(const SolitonProfile& s, const Rect& rect, std::size_t nre, std::size_t nim,
                             const ScanOptions& opt = {}) {
    RegionMap map;
    map.rect = rect;
    if (!(rect.re_hi > rect.re_lo) || !(rect.im_hi > rect.im_lo)) return map;
    if (nre < 2 || nim < 2) throw DomainError("scan grid must be at least 2 x 2");
    map.nre = nre;
    map.nim = nim;
    map.nodes.resize(nre * nim);
    const double dre = (rect.re_hi - rect.re_lo) / static_cast<double>(nre - 1);
    const double dim = (rect.im_hi - rect.im_lo) / static_cast<double>(nim - 1);
    parallel_for(nre * nim, opt.threads, [&](std::size_t k) {
        const std::size_t i = k % nre, j = k / nre;
        const double re = i + 1 == nre ? rect.re_hi : rect.re_lo + static_cast<double>(i) * dre;
        const double im = j + 1 == nim ? rect.im_hi : rect.im_lo + static_cast<double>(j) * dim;
        map.nodes[k] = evans_pair({re, im}, s, opt.evans);
    });
    for (Parity p : {Parity::Xminus, Parity::Xplus})
        for (std::size_t j = 0; j + 1 < nim; ++j)
            for (std::size_t i = 0; i + 1 < nre; ++i) {
                const cplx a = map.at(i, j).E(p), b = map.at(i + 1, j).E(p);
                const cplx c = map.at(i, j + 1).E(p), d = map.at(i + 1, j + 1).E(p);
                if (straddles_zero({a.real(), b.real(), c.real(), d.real()}) &&
                    straddles_zero({a.imag(), b.imag(), c.imag(), d.imag()})) {
                    const cplx center = 0.25 * (map.at(i, j).lambda + map.at(i + 1, j).lambda +
                                                map.at(i, j + 1).lambda + map.at(i + 1, j + 1).lambda);
                    map.candidates.push_back({i, j, p, center});
                }
            }
    return map;
}

// ---------------------------------------------------------------------------
// Zero refinement

struct RefineOptions {
    EvansOptions evans = tight_evans();
    int max_iterations = 100;
    double step_tol = 1e-12;
    double value_tol = 1e-10;     ///< on |E| relative to |E(lambda0)|
    bool keep_right_half = true;  ///< project iterates onto Re lambda >= 0

    /// Zeros of multiplicity two (lambda = 0) are only resolved to the square
    /// root of the integration error, so refinement integrates more tightly
    /// than a scan.
    static EvansOptions tight_evans() {
        EvansOptions e;
        e.ode.tol = 1e-12;
        return e;
    }
};

struct RefinedZero {
    cplx lambda;
    Parity parity = Parity::Xminus;
    int iterations = 0;
    double residual = 0.0;  ///< |E(lambda)| / |E(lambda0)|
};

/// Muller iteration (secant when the parabola degenerates) on whichever of
/// E^- and E^+ is smaller at lambda0.
///
/// Near a double zero the iterates settle into a noise-limited cloud instead
/// of meeting step_tol; once the step stops shrinking for several iterations
/// with |E| already at the noise floor, the best point seen is returned.
inline RefinedZero refine_zero(const SolitonProfile& s, cplx lambda0, const RefineOptions& opt = {},
                               std::optional<Parity> parity = std::nullopt) {
    const auto first = evans_pair(lambda0, s, opt.evans);
    const Parity p =
        parity ? *parity : (std::abs(first.Eminus) <= std::abs(first.Eplus) ? Parity::Xminus : Parity::Xplus);
    const double ref_scale = first.scale;
    auto f = [&](cplx l) {
        const auto e = evans_pair(l, s, opt.evans);
        return e.E(p) * std::exp(e.scale - ref_scale);
    };
    auto project = [&](cplx l) {
        if (opt.keep_right_half && lambda0.real() >= 0.0 && l.real() < 0.0) return cplx{0.0, l.imag()};
        return l;
    };
    const double d = 1e-3 * std::max(1.0, std::abs(lambda0));
    cplx x0 = project(lambda0 + cplx{d, 0.0}), x1 = project(lambda0 + cplx{0.0, d}), x2 = lambda0;
    cplx f0 = f(x0), f1 = f(x1), f2 = first.E(p);
    const double f_ref = std::abs(f2);
    if (f_ref == 0.0) return {lambda0, p, 0, 0.0};

    cplx best = x2;
    double best_f = f_ref;
    double min_step = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const cplx h1 = x1 - x0, h2 = x2 - x1;
        const cplx d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
        const cplx a = (d2 - d1) / (h2 + h1);
        const cplx b = a * h2 + d2;
        const cplx disc = std::sqrt(b * b - 4.0 * a * f2);
        const cplx den = std::abs(b + disc) > std::abs(b - disc) ? b + disc : b - disc;
        cplx step;
        if (std::abs(den) > 0.0 && std::isfinite(std::abs(den)))
            step = -2.0 * f2 / den;
        else if (std::abs(d2) > 0.0)
            step = -f2 / d2;
        else
            break;
        const cplx x3 = project(x2 + step);
        if (!std::isfinite(std::abs(x3))) break;
        const cplx f3 = f(x3);
        const double dx = std::abs(x3 - x2);
        x0 = x1, f0 = f1, x1 = x2, f1 = f2, x2 = x3, f2 = f3;
        if (std::abs(f3) < best_f) best = x3, best_f = std::abs(f3);
        if (std::abs(f3) < opt.value_tol * f_ref || dx < opt.step_tol) return {x3, p, it, std::abs(f3) / f_ref};
        if (dx < min_step) {
            min_step = dx;
            stalled = 0;
        } else if (++stalled >= 6 && best_f < 1e-6 * f_ref && min_step < 1e-6 * (1.0 + std::abs(best))) {
            return {best, p, it, best_f / f_ref};
        }
    }
    throw NoConvergence("Evans zero refinement did not converge");
}

// ---------------------------------------------------------------------------
// Real shooting for the gap spectra of H_- and H_+.

enum class HParity { Even, Odd };  ///< parity of the first component

struct HEigenvalue {
    double value;
    HParity parity;
};

struct HScanOptions {
    double R = 20.0;
    double guard = 1e-3;  ///< exclusion band at the gap edges
    double tol = 1e-12;   ///< bisection width
    IntegrateOptions ode{};
};

/// Coefficient of the growing mode at x = R for the solution of
/// (H - lambda) psi = 0 with even or odd first component. It vanishes
/// exactly when the solution matches the decaying mode, i.e. at eigenvalues.
inline double h_indicator(OperatorKind kind, const SolitonProfile& s, double lambda, HParity parity,
                          const HScanOptions& opt = {}) {
    const auto op = assemble(kind, s);
    auto A = [&](double x) { return op.h_matrix(x, lambda); };
    const Vec<double, 2> psi0 = parity == HParity::Even ? Vec<double, 2>{1.0, 0.0} : Vec<double, 2>{0.0, 1.0};
    const auto tr = integrate<double, 2>(A, psi0, 0.0, opt.R, opt.ode);
    const auto& psi = tr.back();
    const double mp = s.nl.m() + s.omega(), mm = s.nl.m() - s.omega();
    const double k = std::sqrt((mp + lambda) * (mm - lambda));
    // decaying mode of psi_1' = -(m_+ + l) psi_2, psi_2' = -(m_- - l) psi_1
    const double d1 = mp + lambda, d2 = k, dn = std::hypot(d1, d2);
    return (psi[0] * d2 - psi[1] * d1) / (dn * norm2(psi));
}

/// Eigenvalues of H_- or H_+ in [lo, hi] (clipped to the gap minus the guard
/// band), located as sign changes of h_indicator on a grid of spacing `step`
/// and refined by bisection.
inline std::vector<HEigenvalue> h_spectrum_scan(OperatorKind kind, const SolitonProfile& s, double lo, double hi,
                                                double step, const HScanOptions& opt = {}) {
    if (kind == OperatorKind::L) throw DomainError("h_spectrum_scan takes H- or H+");
    const double mp = s.nl.m() + s.omega(), mm = s.nl.m() - s.omega();
    lo = std::max(lo, -mp + opt.guard);
    hi = std::min(hi, mm - opt.guard);
    std::vector<HEigenvalue> out;
    if (!(hi > lo) || !(step > 0.0)) return out;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    for (HParity par : {HParity::Even, HParity::Odd}) {
        auto f = [&](double l) { return h_indicator(kind, s, l, par, opt); };
        double a = lo, fa = f(a);
        for (std::size_t k = 1; k <= n; ++k) {
            const double b = k == n ? hi : lo + static_cast<double>(k) * step;
            const double fb = f(b);
            if (fa == 0.0) {
                out.push_back({a, par});
            } else if (fa * fb < 0.0) {
                double x0 = a, x1 = b, f0 = fa;
                while (x1 - x0 > opt.tol) {
                    const double xm = 0.5 * (x0 + x1), fm = f(xm);
                    if ((fm < 0.0) == (f0 < 0.0))
                        x0 = xm, f0 = fm;
                    else
                        x1 = xm;
                }
                out.push_back({0.5 * (x0 + x1), par});
            }
            a = b, fa = fb;
        }
    }
    std::sort(out.begin(), out.end(), [](const HEigenvalue& x, const HEigenvalue& y) { return x.value < y.value; });
    return out;
}

}  // namespace dirac_spectra
