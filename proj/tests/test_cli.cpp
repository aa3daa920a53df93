#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + DIRAC_SPECTRA_EXE + std::string(" ") + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("dirac_spectra_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Cli, SolitonCsvHeaderAndRows) {
    const auto r = run("soliton --omega 0.5 --R 2 --dx 0.5");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.rfind("# dirac_spectra 1.0.0\n", 0), 0u);
    EXPECT_NE(r.out.find("# omega=0.5\n"), std::string::npos);
    EXPECT_NE(r.out.find("\nx,v,u,X,Y,Z\n"), std::string::npos);
    EXPECT_NE(r.out.find("\n0,1,0,1,0,1\n"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    const auto bad_omega = run("soliton --omega 1.5");
    EXPECT_EQ(bad_omega.code, 1);
    EXPECT_NE(bad_omega.out.find("omega outside (0, m)"), std::string::npos);
    EXPECT_EQ(run("no-such-command").code, 2);
    EXPECT_EQ(run("soliton").code, 2);
    EXPECT_EQ(run("evans-scan --omega 0.5 --re 0,0.1 --im 0,1 --grid 3by3").code, 2);
    EXPECT_EQ(run("soliton --omega 0.5 --model phi4").code, 1);
    EXPECT_EQ(run("soliton --omega 0.5 --G-coeffs 0,1,1 --method quadrature").code, 1);
}

TEST(Cli, SpectrumInfoJson) {
    const auto r = run("spectrum-info --omega 0.3 --lambda 0.1,0.2");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("\"continuous_spectrum\""), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("(u,v,iu,iv)"), std::string::npos);
}

TEST(Cli, EvansScanIsReproducibleAcrossThreadCounts) {
    const auto dir = scratch("evans");
    const std::string args = "evans-scan --omega 0.5 --re -0.05,0.05 --im 0.95,1.05 --grid 3x3 --out ";
    ASSERT_EQ(run(args + (dir / "a.csv").string()).code, 0);
    ASSERT_EQ(run("--threads 2 " + args + (dir / "b.csv").string()).code, 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_EQ(slurp(dir / "a.csv.zeros.json"), slurp(dir / "b.csv.zeros.json"));
    const auto zeros = slurp(dir / "a.csv.zeros.json");
    EXPECT_NE(zeros.find("\"converged\""), std::string::npos) << zeros;
    EXPECT_NE(slurp(dir / "a.csv").find("re_lambda,im_lambda,reEm,imEm,reEp,imEp,scale"), std::string::npos);
}

TEST(Cli, CacheDirectoryFromEnvironment) {
    const auto dir = scratch("cache");
    const std::string env = "DIRAC_SPECTRA_CACHE=" + dir.string();
    const auto a = run("h-spectrum --kind h- --omega-range 0.5,0.5,0.1", env);
    ASSERT_EQ(a.code, 0) << a.out;
    EXPECT_FALSE(fs::is_empty(dir));
    const auto b = run("h-spectrum --kind h- --omega-range 0.5,0.5,0.1", env);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("\n0.5,-0.99999999"), std::string::npos) << a.out;
}

TEST(Cli, ResonanceCrossing) {
    const auto r = run("resonance --tag hp-mminus --find-crossing 3 --bracket 0.3,0.45");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("\"omega\": 0.366"), std::string::npos) << r.out;
    EXPECT_EQ(run("resonance --tag hp-mminus --find-crossing 3 --bracket 0.5,0.6").code, 1);
    EXPECT_EQ(run("resonance --tag nope --omega-range 0.5,0.5,0.1").code, 1);
}

TEST(Cli, VerifyReportIsByteIdentical) {
    const auto dir = scratch("verify");
    const auto a = run("verify --criteria 1,8 --report " + (dir / "a.txt").string());
    const auto b = run("verify --criteria 1,8 --report " + (dir / "b.txt").string());
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(slurp(dir / "a.txt"), slurp(dir / "b.txt"));
    EXPECT_NE(slurp(dir / "a.txt").find("criterion  1 PASS"), std::string::npos);
    const auto c = run("verify --criteria 10");
    EXPECT_EQ(c.code, 1);
    EXPECT_NE(c.out.find("criterion 10 FAIL"), std::string::npos);
}
