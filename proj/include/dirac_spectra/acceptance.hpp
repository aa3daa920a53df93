#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "evans.hpp"
#include "io.hpp"
#include "linops.hpp"
#include "model.hpp"
#include "resonance.hpp"
#include "soliton.hpp"

namespace dirac_spectra::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool accuracy_ok = false;
    double seconds = 0.0;
    double budget = 0.0;  ///< runtime limit in seconds
    std::string detail;

    bool passed() const { return accuracy_ok && seconds < budget; }
};

struct SuiteOptions {
    unsigned threads = 1;
    std::vector<int> only;  ///< empty runs every criterion
};

namespace detail {

inline std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}
inline std::string e3(double a) { return fmt("%.3e", a); }
inline std::string f6(double a) { return fmt("%.6f", a); }

inline const std::vector<double> omega_set{0.1, 0.3, 0.5, 0.7, 0.9};

}  // namespace detail

inline CriterionResult soliton_exactness() {
    CriterionResult r{1, "soliton exactness", true, 0, 1.0, {}};
    double sys = 0.0, ham = 0.0;
    for (double w : detail::omega_set) {
        const auto s = closed_form_profile(w, Grid::make(20.0, 0.005));
        const auto res = residuals(s, 20.0);
        sys = std::max(sys, res.system);
        ham = std::max(ham, res.hamiltonian);
    }
    r.accuracy_ok = sys < 1e-8 && ham < 1e-10;
    r.detail = "max system residual " + detail::e3(sys) + ", max |h| " + detail::e3(ham);
    return r;
}

inline CriterionResult quadrature_agreement() {
    CriterionResult r{2, "quadrature vs closed form", true, 0, 5.0, {}};
    double diff = 0.0;
    for (double w : detail::omega_set) {
        const Grid g = Grid::make(20.0, 0.01);
        const auto c = closed_form_profile(w, g);
        const auto q = quadrature_profile(gross_neveu(), w, g);
        for (std::size_t i = 0; i < g.size(); ++i)
            diff = std::max({diff, std::abs(c.v[i] - q.v[i]), std::abs(c.u[i] - q.u[i])});
    }
    r.accuracy_ok = diff < 1e-6;
    r.detail = "sup-norm difference " + detail::e3(diff);
    return r;
}

inline CriterionResult explicit_eigenpairs() {
    CriterionResult r{3, "explicit eigenpairs", true, 0, 5.0, {}};
    double worst = 0.0, min_order = 1e300;
    for (double w : detail::omega_set) {
        const auto fine = closed_form_profile(w, Grid::make(20.0, 0.01));
        const auto coarse = closed_form_profile(w, Grid::make(20.0, 0.02));
        for (auto kind : {OperatorKind::Hminus, OperatorKind::Hplus, OperatorKind::L}) {
            const auto op_f = assemble(kind, fine), op_c = assemble(kind, coarse);
            const auto ef = known_eigenpairs(kind, fine), ec = known_eigenpairs(kind, coarse);
            for (std::size_t k = 0; k < ef.size(); ++k) {
                const double rf = eigen_residual(op_f, ef[k]), rc = eigen_residual(op_c, ec[k]);
                worst = std::max(worst, rf);
                min_order = std::min(min_order, std::log2(rc / rf));
            }
        }
    }
    r.accuracy_ok = worst < 1e-6 && min_order >= 3.0;
    r.detail = "max residual at h=0.01 " + detail::e3(worst) + ", min observed order " + detail::fmt("%.2f", min_order);
    return r;
}

inline CriterionResult evans_exact_zeros() {
    CriterionResult r{4, "Evans exact zeros", true, 0, 30.0, {}};
    double worst = 0.0;
    int failures = 0;
    for (double w : {0.2, 0.5, 0.9}) {
        const auto s = closed_form_profile(w, Grid::make(20.0, 0.01));
        const cplx targets[3] = {0.0, {0.0, 2.0 * w}, {0.0, -2.0 * w}};
        const cplx starts[3] = {{0.01, 0.01}, {0.01, 2.0 * w + 0.01}, {0.01, -2.0 * w - 0.01}};
        for (int k = 0; k < 3; ++k) {
            try {
                const auto z = refine_zero(s, starts[k]);
                worst = std::max(worst, std::abs(z.lambda - targets[k]));
            } catch (const NoConvergence&) {
                ++failures;
            }
        }
    }
    r.accuracy_ok = failures == 0 && worst < 1e-6;
    r.detail = "max |lambda* - lambda_exact| " + detail::e3(worst) + ", non-converged " + std::to_string(failures);
    return r;
}

inline CriterionResult negative_result(unsigned threads) {
    CriterionResult r{5, "no zeros near 0.15+0.8i at omega=0.2", true, 0, 120.0, {}};
    const auto s = closed_form_profile(0.2, Grid::make(20.0, 0.01));
    ScanOptions o;
    o.threads = threads;
    const auto map = scan_region(s, {0.05, 0.25, 0.7, 0.9}, 50, 50, o);
    const auto nm = map.count(Parity::Xminus), np = map.count(Parity::Xplus);
    r.accuracy_ok = nm == 0 && np == 0;
    r.detail = "candidate cells E-: " + std::to_string(nm) + ", E+: " + std::to_string(np);
    return r;
}

/// Zeros found by scanning [0, 0.5] x [0, m_+] i and refining every
/// candidate cell; non-converging candidates are rejected.
struct SweepOutcome {
    std::vector<cplx> zeros;
    int candidates = 0;
    int rejected = 0;
};

inline SweepOutcome stability_scan(double omega, unsigned threads, double spacing = 0.02) {
    const auto s = closed_form_profile(omega, Grid::make(20.0, 0.01));
    const Rect rect{0.0, 0.5, 0.0, 1.0 + omega};
    const auto nre = static_cast<std::size_t>(std::ceil((rect.re_hi - rect.re_lo) / spacing)) + 1;
    const auto nim = static_cast<std::size_t>(std::ceil((rect.im_hi - rect.im_lo) / spacing)) + 1;
    ScanOptions o;
    o.threads = threads;
    const auto map = scan_region(s, rect, nre, nim, o);
    SweepOutcome out;
    out.candidates = static_cast<int>(map.candidates.size());
    for (const auto& c : map.candidates) {
        try {
            out.zeros.push_back(refine_zero(s, c.center, {}, c.parity).lambda);
        } catch (const NoConvergence&) {
            ++out.rejected;
        }
    }
    return out;
}

inline CriterionResult stability_sweep(unsigned threads) {
    CriterionResult r{6, "stability sweep omega 0.2..0.9", true, 0, 900.0, {}};
    int unstable = 0, candidates = 0, rejected = 0, on_axis = 0;
    double max_re = 0.0;
    for (int k = 2; k <= 9; ++k) {
        const auto o = stability_scan(0.1 * k, threads);
        candidates += o.candidates;
        rejected += o.rejected;
        for (const auto& z : o.zeros) {
            max_re = std::max(max_re, z.real());
            if (z.real() > 1e-4)
                ++unstable;
            else
                ++on_axis;
        }
    }
    r.accuracy_ok = unstable == 0;
    r.detail = "candidates " + std::to_string(candidates) + ", refined to Re<=1e-4: " + std::to_string(on_axis) +
               ", rejected " + std::to_string(rejected) + ", with Re>1e-4: " + std::to_string(unstable) +
               ", max Re " + detail::e3(max_re);
    return r;
}

inline CriterionResult gap_spectra() {
    CriterionResult r{7, "H- and H+ gap spectra", true, 0, 120.0, {}};
    double worst = 0.0;
    bool ok = true;
    int extra = 0;
    for (int k = 0; k <= 14; ++k) {
        const double w = 0.2 + 0.05 * k;
        const auto s = closed_form_profile(w, Grid::make(20.0, 0.01));
        auto has = [&](const std::vector<HEigenvalue>& ev, double target) {
            double best = 1e300;
            for (const auto& e : ev) best = std::min(best, std::abs(e.value - target));
            worst = std::max(worst, best);
            return best < 1e-6;
        };
        const auto hm = h_spectrum_scan(OperatorKind::Hminus, s, -1.0 - w, 1.0 - w, 0.01);
        const auto hp = h_spectrum_scan(OperatorKind::Hplus, s, -1.0 - w, 1.0 - w, 0.01);
        ok = ok && hm.size() == 2 && has(hm, -2.0 * w) && has(hm, 0.0) && has(hp, -2.0 * w) && has(hp, 0.0);
        extra += static_cast<int>(hp.size()) - 2;
    }
    r.accuracy_ok = ok;
    r.detail = "max distance to {-2w, 0} " + detail::e3(worst) + ", additional H+ eigenvalues " + std::to_string(extra);
    return r;
}

inline CriterionResult wkb_toy() {
    CriterionResult r{8, "WKB toy problem", true, 0, 1.0, {}};
    const auto t = wkb_toy_check();
    const double e1 = std::abs(t.exact_phase - pi), e2 = std::abs(t.wkb_phase - std::sqrt(2.0) * pi);
    r.accuracy_ok = e1 < 1e-3 && e2 < 1e-8;
    r.detail = "exact phase " + detail::f6(t.exact_phase) + ", WKB phase " + detail::fmt("%.10f", t.wkb_phase) +
               ", relative error " + detail::f6(t.relative_error);
    return r;
}

inline CriterionResult resonance_crossings() {
    CriterionResult r{9, "H+ threshold resonance crossings", true, 0, 60.0, {}};
    const auto make = default_profile_factory(gross_neveu());
    const auto c3 = resonance_crossing(ThresholdTag::HplusMminus, 3, 0.25, 0.5, make);
    const auto c4 = resonance_crossing(ThresholdTag::HplusMminus, 4, 0.1, 0.3, make);
    const double lim = phase_limit(ThresholdTag::HplusMminus, make, 0.98, 0.99);
    r.accuracy_ok =
        std::abs(c3.omega - 0.367) < 0.02 && std::abs(c4.omega - 0.205) < 0.02 && std::abs(lim - 2.0 * pi) < 0.1;
    r.detail = "3pi at " + detail::f6(c3.omega) + ", 4pi at " + detail::f6(c4.omega) + ", limit at omega=1 " +
               detail::f6(lim);
    return r;
}

inline CriterionResult small_amplitude() {
    CriterionResult r{10, "small-amplitude WKB formula", true, 0, 1.0, {}};
    const double w = 0.95;
    const auto s = default_profile_factory(gross_neveu())(w);
    const double integral = small_amplitude_wkb(ThresholdTag::HplusMminus, s);
    const double formula = small_amplitude_estimate(w);
    const double rel = std::abs(integral - formula) / formula;
    r.accuracy_ok = rel < 0.05;
    r.detail = "sqrt(6) int sqrt(X) = " + detail::f6(integral) + ", 4 sqrt(3)/sqrt(1+w) = " + detail::f6(formula) +
               ", relative difference " + detail::f6(rel);
    return r;
}

inline std::string report_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %s  ", r.id, r.passed() ? "PASS" : "FAIL");
    return head + r.name + ": " + r.detail + "\n";
}

/// The report holds no timings, so repeated runs are byte-identical unless a
/// result changes.
inline std::string report_text(const std::vector<CriterionResult>& results) {
    std::string s = std::string("# ") + tool_version + " acceptance report\n";
    for (const auto& r : results) s += report_line(r);
    return s;
}

inline bool selected(const SuiteOptions& o, int id) {
    return o.only.empty() || std::find(o.only.begin(), o.only.end(), id) != o.only.end();
}

using Progress = std::function<void(const CriterionResult&)>;

inline std::vector<CriterionResult> run_numeric(const SuiteOptions& o, const Progress& progress = {}) {
    const std::vector<std::pair<int, std::function<CriterionResult()>>> all{
        {1, soliton_exactness},
        {2, quadrature_agreement},
        {3, explicit_eigenpairs},
        {4, evans_exact_zeros},
        {5, [&] { return negative_result(o.threads); }},
        {6, [&] { return stability_sweep(o.threads); }},
        {7, gap_spectra},
        {8, wkb_toy},
        {9, resonance_crossings},
        {10, small_amplitude},
    };
    std::vector<CriterionResult> out;
    for (const auto& [id, fn] : all) {
        if (!selected(o, id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.accuracy_ok = false;
            r.budget = 0.0;
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (progress) progress(r);
        out.push_back(r);
    }
    return out;
}

/// Runs the selected numeric criteria; criterion 11 runs them a second time
/// and compares the two reports byte for byte.
inline std::vector<CriterionResult> run_suite(const SuiteOptions& o, const Progress& progress = {}) {
    auto results = run_numeric(o, progress);
    if (selected(o, 11)) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto again = run_numeric(o);
        CriterionResult r{11, "determinism", true, 0, 1e9, {}};
        const bool same = report_text(results) == report_text(again);
        r.accuracy_ok = same;
        r.detail = same ? "repeated run reproduced the report byte for byte" : "repeated run changed the report";
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (progress) progress(r);
        results.push_back(r);
    }
    return results;
}

}  // namespace dirac_spectra::acceptance
