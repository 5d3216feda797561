#include "cli/commands.hpp"

#include <chambereff/io.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <unistd.h>

using namespace chambereff;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// One small simulated data set shared by the tests in this file.
class CliTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = fs::temp_directory_path() / ("chambereff_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        io::write_file_atomic(dir_ / "scenario.cfg",
                              "freq_points = 5\nn_steps = 1000\neta_ch1 = 0.7\nseed = 3\n");
        const auto r = run({"simulate", "--config", (dir_ / "scenario.cfg").string(), "--out", (dir_ / "sim").string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    static void TearDownTestSuite() { fs::remove_all(dir_); }

    static std::string p(const std::string& name) { return (dir_ / "sim" / name).string(); }
    static std::string tmp(const std::string& name) { return (dir_ / name).string(); }

    static std::vector<EfficiencyResult> results(const std::string& text) { return io::parse_results(text); }

    static Outcome ac_ch1(std::vector<std::string> extra = {}) {
        std::vector<std::string> a{"ac-eff",      "--pattern",   p("pattern_ch1.csv"), "--aut-power",
                                   p("power_aut_ch1.csv"), "--ref-power", p("power_ref.csv"), "--reference",
                                   p("reference.csv")};
        a.insert(a.end(), extra.begin(), extra.end());
        return run(a);
    }

    static fs::path dir_;
};

fs::path CliTest::dir_;

}  // namespace

TEST_F(CliTest, SimulateWritesExpectedFiles) {
    for (const char* f : {"reference.csv", "pattern_ch1.csv", "pattern_ch2.csv", "pattern_total.csv", "power_ref.csv",
                          "power_aut_ch1.csv", "power_aut_ch2.csv", "power_aut_total.csv", "rc_ref.manifest",
                          "rc_aut.manifest", "truth.txt"})
        EXPECT_TRUE(fs::exists(p(f))) << f;
    const auto truth = io::Config::read(p("truth.txt"));
    EXPECT_DOUBLE_EQ(truth.get_double("eta_ch1", 0), 0.7);
    const auto pat = io::parse_pattern_csv(io::read_file(p("pattern_ch1.csv")));
    EXPECT_EQ(pat.grid().theta_samples(), 37u);
    EXPECT_EQ(pat.grid().phi_samples(), 72u);
    const auto ens = io::load_ensemble(io::read_manifest(p("rc_aut.manifest")));
    EXPECT_EQ(ens.n_steps(), 1000u);
    EXPECT_EQ(ens.n_ports(), 3u);
}

TEST_F(CliTest, AcEffRecoversInjectedEfficiency) {
    const auto r = ac_ch1();
    ASSERT_EQ(r.code, 0) << r.err;
    const auto res = results(r.out);
    ASSERT_EQ(res.size(), 1u);
    EXPECT_EQ(res[0].method(), Method::AC);
    for (double v : res[0].eta()) EXPECT_NEAR(v, 0.7, 0.005 * 0.7);
}

TEST_F(CliTest, DirectionOverrideMatchesPeak) {
    const auto peak = ac_ch1();
    const auto fixed = ac_ch1({"--direction", "90,0"});
    ASSERT_EQ(fixed.code, 0) << fixed.err;
    EXPECT_EQ(peak.out, fixed.out);
    io::write_file_atomic(tmp("dir.cfg"), "direction = 90,0\n");
    EXPECT_EQ(ac_ch1({"--config", tmp("dir.cfg")}).out, peak.out);
    const auto off = ac_ch1({"--direction", "45,0"});
    ASSERT_EQ(off.code, 0);
    EXPECT_NE(off.out, peak.out);
}

TEST_F(CliTest, AcEffAllPortsAndVerbose) {
    const auto r = run({"ac-eff", "--pattern", p("pattern_ch1.csv"), "--aut-power", p("power_aut_ch1.csv"), "--pattern",
                        p("pattern_ch2.csv"), "--aut-power", p("power_aut_ch2.csv"), "--pattern",
                        p("pattern_total.csv"), "--aut-power", p("power_aut_total.csv"), "--ref-power",
                        p("power_ref.csv"), "--reference", p("reference.csv"), "--verbose", "--out", tmp("ac.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("F_NorAv"), std::string::npos);
    const auto res = results(io::read_file(tmp("ac.csv")));
    ASSERT_EQ(res.size(), 3u);
    EXPECT_NEAR(res[0].eta()[0], 0.7, 0.0035);
    EXPECT_NEAR(res[1].eta()[0], 0.8, 0.004);
    const double total = std::pow(10.0, -0.32) * 1.5;
    EXPECT_NEAR(res[2].eta()[0], total, 0.005 * total);
}

TEST_F(CliTest, MissingReferenceNamesPath) {
    const auto r = run({"ac-eff", "--pattern", p("pattern_ch1.csv"), "--aut-power", p("power_aut_ch1.csv"),
                        "--ref-power", p("power_ref.csv"), "--reference", tmp("no_such_reference.csv")});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("no_such_reference.csv"), std::string::npos) << r.err;
}

TEST_F(CliTest, RcEffPerPortAndConventions) {
    const auto r = run({"rc-eff", "--aut", p("rc_aut.manifest"), "--ref", p("rc_ref.manifest"), "--reference",
                        p("reference.csv"), "--convention", "both"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto res = results(r.out);
    ASSERT_EQ(res.size(), 4u);
    int power = 0, coherent = 0;
    for (const auto& e : res) {
        EXPECT_EQ(e.method(), Method::RC);
        power += e.flags()[0].count("convention=power");
        coherent += e.flags()[0].count("convention=coherent");
        const double truth = e.port() == Port::Ch1 ? 0.7 : 0.8;
        for (double v : e.eta()) EXPECT_NEAR(10 * std::log10(v / truth), 0.0, 0.6);
    }
    EXPECT_EQ(power, 2);
    EXPECT_EQ(coherent, 2);
}

TEST_F(CliTest, RcEffAsPrintedDiffers) {
    const std::vector<std::string> base{"rc-eff",      "--aut", p("rc_aut.manifest"), "--ref", p("rc_ref.manifest"),
                                        "--reference", p("reference.csv")};
    auto printed_args = base;
    printed_args.push_back("--as-printed");
    const auto corrected = run(base), printed = run(printed_args);
    ASSERT_EQ(printed.code, 0) << printed.err;
    EXPECT_NE(corrected.out, printed.out);
    EXPECT_NE(printed.out.find("as_printed"), std::string::npos);
}

TEST_F(CliTest, RcEffCombinedTotal) {
    const auto r = run({"rc-eff", "--aut", p("rc_aut.manifest"), "--ref", p("rc_ref.manifest"), "--reference",
                        p("reference.csv"), "--combiner-loss-db", "3.2", "--out", tmp("rc.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto res = results(io::read_file(tmp("rc.csv")));
    ASSERT_EQ(res.size(), 3u);
    EXPECT_EQ(res[2].port(), Port::Total);
    const auto de = run({"rc-eff", "--aut", p("rc_aut.manifest"), "--ref", p("rc_ref.manifest"), "--reference",
                         p("reference.csv"), "--combiner-loss-db", "3.2", "--de-embed-combiner"});
    ASSERT_EQ(de.code, 0) << de.err;
    EXPECT_NE(de.out.find("de_embedded"), std::string::npos);
    EXPECT_EQ(run({"rc-eff", "--aut", p("rc_aut.manifest"), "--ref", p("rc_ref.manifest"), "--reference",
                   p("reference.csv"), "--combiner-loss-db", "2.0"})
                  .code,
              1);
}

TEST_F(CliTest, CompareWorkflow) {
    ASSERT_EQ(run({"ac-eff", "--pattern", p("pattern_ch1.csv"), "--aut-power", p("power_aut_ch1.csv"), "--pattern",
                   p("pattern_ch2.csv"), "--aut-power", p("power_aut_ch2.csv"), "--ref-power", p("power_ref.csv"),
                   "--reference", p("reference.csv"), "--out", tmp("ac2.csv")})
                  .code,
              0);
    ASSERT_EQ(run({"rc-eff", "--aut", p("rc_aut.manifest"), "--ref", p("rc_ref.manifest"), "--reference",
                   p("reference.csv"), "--out", tmp("rc2.csv")})
                  .code,
              0);
    const auto c = run({"compare", "--ac", tmp("ac2.csv"), "--rc", tmp("rc2.csv")});
    ASSERT_EQ(c.code, 0) << c.err;
    std::istringstream in(c.out);
    std::string line;
    int summaries = 0;
    while (std::getline(in, line))
        if (line.rfind("mean_abs,", 0) == 0) {
            ++summaries;
            EXPECT_LE(std::stod(line.substr(line.rfind(',') + 1)), 0.5) << line;
        }
    EXPECT_EQ(summaries, 2);

    // RC results against themselves relabelled as AC give zero everywhere.
    auto text = io::read_file(tmp("rc2.csv"));
    for (std::size_t pos; (pos = text.find(",RC,")) != std::string::npos;) text.replace(pos, 4, ",AC,");
    io::write_file_atomic(tmp("rc_as_ac.csv"), text);
    const auto self = run({"compare", "--ac", tmp("rc_as_ac.csv"), "--rc", tmp("rc2.csv")});
    ASSERT_EQ(self.code, 0) << self.err;
    std::istringstream in2(self.out);
    std::getline(in2, line);
    while (std::getline(in2, line)) EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
}

TEST_F(CliTest, CompareDisjointSweeps) {
    io::write_file_atomic(tmp("a.csv"), std::string(io::kResultsHeader) + "\n1e9,AC,ch1,0.5,-3.0103,\n");
    io::write_file_atomic(tmp("b.csv"), std::string(io::kResultsHeader) + "\n2e9,RC,ch1,0.5,-3.0103,\n");
    const auto r = run({"compare", "--ac", tmp("a.csv"), "--rc", tmp("b.csv")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("overlap"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateIsDeterministic) {
    const std::string cfg = tmp("scenario.cfg");
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", tmp("s1"), "--workers", "1"}).code, 0);
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", tmp("s2"), "--workers", "4"}).code, 0);
    for (const auto& entry : fs::directory_iterator(tmp("s1"))) {
        const auto name = entry.path().filename();
        EXPECT_EQ(io::read_file(entry.path()), io::read_file(fs::path(tmp("s2")) / name)) << name;
    }
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", tmp("s3"), "--seed", "4"}).code, 0);
    EXPECT_NE(io::read_file(tmp("s1") + "/rc_aut.sens"), io::read_file(tmp("s3") + "/rc_aut.sens"));
}

TEST_F(CliTest, SimulateSingleStep) {
    io::write_file_atomic(tmp("one.cfg"), "freq_points = 3\nn_steps = 1\nchannels = 1\nensemble_format = touchstone_set\n");
    const auto r = run({"simulate", "--config", tmp("one.cfg"), "--out", tmp("one")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto e = io::load_ensemble(io::read_manifest(tmp("one") + "/rc_aut.manifest"));
    EXPECT_EQ(e.n_steps(), 1u);
    EXPECT_EQ(e.n_ports(), 2u);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"bogus"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
    io::write_file_atomic(tmp("bad.cfg"), "n_steps = 10\nunknown_key = 1\n");
    const auto bad = run({"simulate", "--config", tmp("bad.cfg"), "--out", tmp("bad")});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("bad.cfg:2"), std::string::npos) << bad.err;

    // An all-zero pattern is a numerical degeneracy.
    auto text = io::read_file(p("pattern_ch1.csv"));
    std::string zeroed;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    zeroed = line + "\n";
    while (std::getline(in, line)) zeroed += line.substr(0, line.rfind(',') + 1) + "0\n";
    io::write_file_atomic(tmp("zero.csv"), zeroed);
    const auto z = run({"ac-eff", "--pattern", tmp("zero.csv"), "--aut-power", p("power_aut_ch1.csv"), "--ref-power",
                        p("power_ref.csv"), "--reference", p("reference.csv")});
    EXPECT_EQ(z.code, 2) << z.err;
}
