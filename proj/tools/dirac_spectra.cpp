// Command-line front end for the solitary-wave spectral computations.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dirac_spectra/acceptance.hpp"
#include "dirac_spectra/evans.hpp"
#include "dirac_spectra/io.hpp"
#include "dirac_spectra/resonance.hpp"

namespace ds = dirac_spectra;
using json = nlohmann::ordered_json;

namespace {

struct Common {
    std::string model = "gross-neveu";
    std::string g_coeffs;
    std::string out;
    std::string cache_dir;
    unsigned threads = 1;
};

void add_model_options(CLI::App* app, Common& c) {
    app->add_option("--model", c.model, "named model (gross-neveu)");
    app->add_option("--G-coeffs", c.g_coeffs, "coefficients of G(X), lowest degree first, comma-separated");
}

ds::Nonlinearity make_nonlinearity(const Common& c) {
    if (!c.g_coeffs.empty()) return ds::Nonlinearity::from_G_coeffs(ds::parse_reals(c.g_coeffs));
    if (c.model == "gross-neveu") return ds::gross_neveu();
    throw ds::DomainError("unknown model: " + c.model);
}

void record_model(ds::RunConfig& cfg, const ds::Nonlinearity& nl) {
    cfg.set("model", nl.name());
    cfg.set("G_coeffs", nl.G_coeffs());
}

ds::SolitonProfile make_profile(const ds::Nonlinearity& nl, double omega, double R, double h) {
    const ds::Grid g = ds::Grid::make(R, h);
    return nl.is_gross_neveu() ? ds::closed_form_profile(omega, g) : ds::quadrature_profile(nl, omega, g);
}

std::vector<double> pair_arg(const std::string& s, const char* what) {
    const auto v = ds::parse_reals(s);
    if (v.size() != 2) throw CLI::ValidationError(what, "expected two comma-separated numbers");
    return v;
}

std::vector<double> omega_values(const std::string& range) {
    const auto r = ds::parse_reals(range);
    if (r.size() != 3 || !(r[2] > 0.0) || r[1] < r[0])
        throw CLI::ValidationError("--omega-range", "expected A,B,STEP with A <= B and STEP > 0");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((r[1] - r[0]) / r[2] + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(r[0] + static_cast<double>(k) * r[2]);
    return out;
}

/// Emits `content` to the output path (atomically) or to stdout.
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        ds::write_atomic(path, content);
}

ds::ResultCache cache_for(const Common& c) {
    return ds::ResultCache(c.cache_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(c.cache_dir));
}

// ---------------------------------------------------------------------------

int run_soliton(const Common& c, double omega, double R, double h, const std::string& method) {
    const auto nl = make_nonlinearity(c);
    ds::RunConfig cfg;
    record_model(cfg, nl);
    cfg.set("omega", omega);
    cfg.set("R", R);
    cfg.set("h", h);
    const bool closed = method == "closed" || (method == "auto" && nl.is_gross_neveu());
    if (closed && !nl.is_gross_neveu()) throw ds::DomainError("closed form exists only for gross-neveu");
    cfg.set("method", closed ? "closed" : "quadrature");
    const ds::Grid g = ds::Grid::make(R, h);
    const auto s = closed ? ds::closed_form_profile(omega, g) : ds::quadrature_profile(nl, omega, g);
    ds::CsvTable t({"x", "v", "u", "X", "Y", "Z"}, cfg);
    for (std::size_t i = 0; i < g.size(); ++i) t.add_row({g.x[i], s.v[i], s.u[i], s.X(i), s.Y(i), s.Z(i)});
    emit(c.out, t.text());
    return 0;
}

int run_spectrum_info(const Common& c, double omega, const std::string& lambda_arg) {
    const auto nl = make_nonlinearity(c);
    const auto p = ds::ModelParams::make(nl.m(), omega);
    const auto s = make_profile(nl, omega, 20.0, 0.01);
    json j;
    j["model"] = nl.name();
    j["G_coeffs"] = nl.G_coeffs();
    j["omega"] = omega;
    j["m"] = p.m;
    j["m_minus"] = p.m_minus;
    j["m_plus"] = p.m_plus;
    j["kappa"] = p.kappa;
    j["mu"] = p.mu;
    j["X_omega"] = s.X_omega;
    j["charge"] = ds::charge(s);
    for (auto k : {ds::OperatorKind::Hminus, ds::OperatorKind::Hplus, ds::OperatorKind::L}) {
        json op;
        op["continuous_spectrum"] = ds::continuous_spectrum(k, p.m, omega).describe();
        const auto field = ds::assemble(k, s);
        json known = json::array();
        for (const auto& e : ds::known_eigenpairs(k, s))
            known.push_back({{"eigenvector", e.label},
                             {"re_lambda", e.value.real()},
                             {"im_lambda", e.value.imag()},
                             {"fd_residual", ds::eigen_residual(field, e)}});
        op["known_eigenpairs"] = known;
        j["operators"][ds::to_string(k)] = op;
    }
    if (!lambda_arg.empty()) {
        const auto l = pair_arg(lambda_arg, "--lambda");
        const auto b = ds::xi_branches({l[0], l[1]}, omega, p.m);
        json xs = json::array();
        for (int o = 0; o < 2; ++o)
            for (int i = 0; i < 2; ++i)
                xs.push_back({{"outer", o == 0 ? "+" : "-"},
                              {"inner", i == 0 ? "+" : "-"},
                              {"re_xi", b.xi[o][i].real()},
                              {"im_xi", b.xi[o][i].imag()},
                              {"decay", ds::to_string(b.decay[o][i])}});
        j["xi_branches"] = xs;
    }
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

int run_evans_scan(const Common& c, double omega, const std::string& re, const std::string& im,
                   const std::string& grid, double R, double tol, bool refine) {
    const auto nl = make_nonlinearity(c);
    const auto rr = pair_arg(re, "--re"), ii = pair_arg(im, "--im");
    unsigned long nre = 0, nim = 0;
    if (std::sscanf(grid.c_str(), "%lux%lu", &nre, &nim) != 2)
        throw CLI::ValidationError("--grid", "expected NxM");
    ds::RunConfig cfg;
    record_model(cfg, nl);
    cfg.set("omega", omega);
    cfg.set("re", rr);
    cfg.set("im", ii);
    cfg.set("grid", grid);
    cfg.set("R", R);
    cfg.set("ode_tol", tol);
    cfg.set("refine", refine ? "yes" : "no");

    const auto cache = cache_for(c);
    const auto key = ds::ResultCache::key("evans-scan", cfg);
    auto csv = cache.load(key, ".csv");
    auto zeros = cache.load(key, ".zeros.json");
    if (!csv || !zeros) {
        const auto s = make_profile(nl, omega, R, 0.01);
        ds::ScanOptions so;
        so.threads = c.threads;
        so.evans.R = R;
        so.evans.ode.tol = tol;
        const auto map = ds::scan_region(s, {rr[0], rr[1], ii[0], ii[1]}, nre, nim, so);
        ds::CsvTable t({"re_lambda", "im_lambda", "reEm", "imEm", "reEp", "imEp", "scale"}, cfg);
        for (const auto& n : map.nodes)
            t.add_row({n.lambda.real(), n.lambda.imag(), n.Eminus.real(), n.Eminus.imag(), n.Eplus.real(),
                       n.Eplus.imag(), n.scale});
        json j;
        j["omega"] = omega;
        j["R"] = R;
        json list = json::array();
        ds::RefineOptions ro;
        ro.evans.R = R;
        for (const auto& cell : map.candidates) {
            json e{{"parity", ds::to_string(cell.parity)},
                   {"cell_re", cell.center.real()},
                   {"cell_im", cell.center.imag()}};
            if (refine) {
                try {
                    const auto z = ds::refine_zero(s, cell.center, ro, cell.parity);
                    e["status"] = "converged";
                    e["re_lambda"] = z.lambda.real();
                    e["im_lambda"] = z.lambda.imag();
                    e["iterations"] = z.iterations;
                    const double dre = (rr[1] - rr[0]) / static_cast<double>(nre - 1);
                    const double dim = (ii[1] - ii[0]) / static_cast<double>(nim - 1);
                    e["inside_cell"] = std::abs(z.lambda.real() - cell.center.real()) <= 0.5 * dre + 1e-12 &&
                                       std::abs(z.lambda.imag() - cell.center.imag()) <= 0.5 * dim + 1e-12;
                } catch (const ds::NoConvergence&) {
                    e["status"] = "rejected";
                }
            }
            list.push_back(e);
        }
        j["candidates"] = list;
        csv = t.text();
        zeros = j.dump(2) + "\n";
        cache.store(key, ".csv", *csv);
        cache.store(key, ".zeros.json", *zeros);
    }
    emit(c.out, *csv);
    if (!c.out.empty() && c.out != "-") ds::write_atomic(c.out + ".zeros.json", *zeros);
    return 0;
}

int run_h_spectrum(const Common& c, const std::string& kind, const std::string& range, double step, double R) {
    const auto nl = make_nonlinearity(c);
    ds::OperatorKind k;
    if (kind == "h+")
        k = ds::OperatorKind::Hplus;
    else if (kind == "h-")
        k = ds::OperatorKind::Hminus;
    else
        throw CLI::ValidationError("--kind", "expected h+ or h-");
    const auto omegas = omega_values(range);
    ds::RunConfig cfg;
    record_model(cfg, nl);
    cfg.set("kind", kind);
    cfg.set("omega_range", range);
    cfg.set("lambda_step", step);
    cfg.set("R", R);
    const auto cache = cache_for(c);
    const auto key = ds::ResultCache::key("h-spectrum", cfg);
    auto csv = cache.load(key, ".csv");
    if (!csv) {
        std::vector<std::vector<ds::HEigenvalue>> per(omegas.size());
        ds::parallel_for(omegas.size(), c.threads, [&](std::size_t i) {
            const auto s = make_profile(nl, omegas[i], R, 0.01);
            ds::HScanOptions ho;
            ho.R = R;
            per[i] = ds::h_spectrum_scan(k, s, -s.params.m_plus, s.params.m_minus, step, ho);
        });
        ds::CsvTable t({"omega", "eigenvalue"}, cfg);
        for (std::size_t i = 0; i < omegas.size(); ++i)
            for (const auto& e : per[i]) t.add_row({omegas[i], e.value});
        csv = t.text();
        cache.store(key, ".csv", *csv);
    }
    emit(c.out, *csv);
    return 0;
}

int run_resonance(const Common& c, const std::string& tag_name, const std::string& range, int find_n,
                  const std::string& bracket) {
    const auto nl = make_nonlinearity(c);
    const auto tag = ds::threshold_tag_from_string(tag_name);
    const auto make = ds::default_profile_factory(nl);
    if (find_n != 0) {
        const auto b = pair_arg(bracket, "--bracket");
        const auto cr = ds::resonance_crossing(tag, find_n, b[0], b[1], make, nl.m());
        json j{{"tag", tag_name},
               {"n", cr.n},
               {"omega", cr.omega},
               {"boundary", cr.boundary},
               {"phase", cr.phase_at_omega}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (range.empty()) throw CLI::ValidationError("--omega-range", "required unless --find-crossing is given");
    const auto omegas = omega_values(range);
    ds::RunConfig cfg;
    record_model(cfg, nl);
    cfg.set("tag", tag_name);
    cfg.set("omega_range", range);
    const auto cache = cache_for(c);
    const auto key = ds::ResultCache::key("resonance", cfg);
    auto csv = cache.load(key, ".csv");
    if (!csv) {
        std::vector<ds::ResonancePhase> rows(omegas.size());
        ds::parallel_for(omegas.size(), c.threads,
                         [&](std::size_t i) { rows[i] = ds::resonance_phase(tag, make(omegas[i])); });
        ds::CsvTable t({"omega", "exact_phase", "wkb_phase", "n_nearest"}, cfg);
        for (const auto& r : rows) t.add_row({r.omega, r.exact_phase, r.wkb_phase, static_cast<double>(r.n_nearest)});
        csv = t.text();
        cache.store(key, ".csv", *csv);
    }
    emit(c.out, *csv);
    return 0;
}

int run_verify(const Common& c, const std::string& report, const std::vector<int>& only) {
    ds::acceptance::SuiteOptions o;
    o.threads = c.threads;
    o.only = only;
    const auto results = ds::acceptance::run_suite(o, [](const ds::acceptance::CriterionResult& r) {
        std::cout << ds::acceptance::report_line(r) << std::flush;
    });
    const auto text = ds::acceptance::report_text(results);
    if (!report.empty()) ds::write_atomic(report, text);
    bool all = true;
    for (const auto& r : results) all = all && r.passed();
    std::cout << (all ? "all criteria passed\n" : "some criteria failed\n");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of linearizations about nonlinear Dirac solitary waves"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--threads", c.threads, "maximum worker threads")->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", c.cache_dir, "result cache directory (DIRAC_SPECTRA_CACHE overrides)");

    double omega = 0.0, R = 20.0, h = 0.01, tol = 1e-10, step = 0.01;
    std::string method = "auto", lambda_arg, re, im, grid, kind, range, tag = "hp-mminus", bracket, report;
    int find_n = 0;
    bool no_refine = false;
    std::vector<int> only;

    auto* sol = app.add_subcommand("soliton", "sample the solitary-wave profile");
    add_model_options(sol, c);
    sol->add_option("--omega", omega, "frequency")->required();
    sol->add_option("--R", R, "half-width of the grid");
    sol->add_option("--dx", h, "grid spacing");
    sol->add_option("--method", method, "closed, quadrature or auto");
    sol->add_option("--out", c.out, "output CSV (stdout if omitted)");

    auto* info = app.add_subcommand("spectrum-info", "continuous spectrum, known eigenpairs and xi branches");
    add_model_options(info, c);
    info->add_option("--omega", omega, "frequency")->required();
    info->add_option("--lambda", lambda_arg, "RE,IM: report xi branches at this spectral parameter");
    info->add_option("--out", c.out, "output JSON (stdout if omitted)");

    auto* ev = app.add_subcommand("evans-scan", "Evans functions on a rectangle of the spectral plane");
    add_model_options(ev, c);
    ev->add_option("--omega", omega, "frequency")->required();
    ev->add_option("--re", re, "A,B real range")->required();
    ev->add_option("--im", im, "C,D imaginary range")->required();
    ev->add_option("--grid", grid, "NxM nodes")->required();
    ev->add_option("--R", R, "matching point");
    ev->add_option("--tol", tol, "ODE tolerance");
    ev->add_flag("--no-refine", no_refine, "skip refinement of candidate cells");
    ev->add_option("--out", c.out, "output CSV; refined zeros go to OUT.zeros.json");

    auto* hs = app.add_subcommand("h-spectrum", "gap eigenvalues of H- or H+ by real shooting");
    add_model_options(hs, c);
    hs->add_option("--kind", kind, "h+ or h-")->required();
    hs->add_option("--omega-range", range, "A,B,STEP")->required();
    hs->add_option("--step", step, "eigenvalue search spacing");
    hs->add_option("--R", R, "matching point");
    hs->add_option("--out", c.out, "output CSV (stdout if omitted)");

    auto* res = app.add_subcommand("resonance", "threshold phases and their n pi crossings");
    add_model_options(res, c);
    res->add_option("--tag", tag, "hp-mminus, hp-mplus or l-implus");
    res->add_option("--omega-range", range, "A,B,STEP");
    res->add_option("--find-crossing", find_n, "locate the omega where the exact phase equals N pi");
    res->add_option("--bracket", bracket, "A,B bracket for --find-crossing");
    res->add_option("--out", c.out, "output CSV (stdout if omitted)");

    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("--report", report, "write the pass/fail report to this file");
    ver->add_option("--criteria", only, "run only these criteria")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sol) return run_soliton(c, omega, R, h, method);
        if (*info) return run_spectrum_info(c, omega, lambda_arg);
        if (*ev) return run_evans_scan(c, omega, re, im, grid, R, tol, !no_refine);
        if (*hs) return run_h_spectrum(c, kind, range, step, R);
        if (*res) {
            if (find_n != 0 && bracket.empty()) throw CLI::ValidationError("--bracket", "required with --find-crossing");
            return run_resonance(c, tag, range, find_n, bracket);
        }
        if (*ver) return run_verify(c, report, only);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    } catch (const ds::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
