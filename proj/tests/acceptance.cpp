// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstring>
#include <string>

#include "dirac_spectra/acceptance.hpp"

int main(int argc, char** argv) {
    namespace acc = dirac_spectra::acceptance;
    std::string report;
    acc::SuiteOptions o;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) report = argv[++i];
        else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) o.threads = static_cast<unsigned>(std::stoul(argv[++i]));
    }
    const auto results = acc::run_suite(o, [](const acc::CriterionResult& r) {
        std::printf("%s", acc::report_line(r).c_str());
        std::printf("             (%.2f s of %.0f s budget)\n", r.seconds, r.budget);
        std::fflush(stdout);
    });
    if (!report.empty()) dirac_spectra::write_atomic(report, acc::report_text(results));
    int failed = 0;
    for (const auto& r : results) failed += r.passed() ? 0 : 1;
    std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
}
