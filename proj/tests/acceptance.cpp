// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include "cli/commands.hpp"

#include <chambereff/ac.hpp>
#include <chambereff/combine.hpp>
#include <chambereff/compare.hpp>
#include <chambereff/io.hpp>
#include <chambereff/rc.hpp>
#include <chambereff/sim.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace chambereff;
namespace fs = std::filesystem;

#ifndef CHAMBEREFF_CORPUS_DIR
#define CHAMBEREFF_CORPUS_DIR "corpus"
#endif

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %-34s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RadiationPattern axial_pattern(const SphericalGrid& g, const FrequencySweep& s, const std::function<double(double)>& u) {
    const std::size_t n = s.size() * g.node_count();
    std::vector<double> vp(n), hp(n, 0.0);
    for (std::size_t f = 0; f < s.size(); ++f)
        for (std::size_t it = 0; it < g.theta_samples(); ++it)
            for (std::size_t ip = 0; ip < g.phi_samples(); ++ip)
                vp[(f * g.theta_samples() + it) * g.phi_samples() + ip] = u(g.theta_deg(it) * kDegToRad);
    return RadiationPattern({g, s, std::move(vp), std::move(hp)});
}

// Independent reference: midpoint rule in theta for an axially symmetric pattern, peak at 90 deg.
double oracle_directivity(const std::function<double(double)>& u, double step_deg) {
    const int n = static_cast<int>(std::lround(180.0 / step_deg));
    const double h = kPi / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += u((i + 0.5) * h) * std::sin((i + 0.5) * h) * h;
    return u(kPi / 2) / (0.5 * acc);
}

int run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) std::fprintf(stderr, "cli failed (%d): %s\n", code, err.str().c_str());
    return code;
}

// ------------------------------------------------------------------------------------------------

void criterion_1() {
    const auto t0 = Clock::now();
    const auto w = ac::build_weights(SphericalGrid::default_grid());
    const double sum = w.sum();
    const double t = ms_since(t0);
    const double rel = std::abs(sum - 4 * kPi) / (4 * kPi);
    report(1, "quadrature partition", rel <= 1e-9 && t < 10.0, fmt("rel err %.2e (<=1e-9), %.3f ms (<10)", rel, t));
}

void criterion_2() {
    const auto g = SphericalGrid::default_grid();
    const FrequencySweep one({1e9});
    struct Case {
        const char* name;
        sim::AntennaKind kind;
        double target, tol;
    };
    const Case cases[] = {
        {"isotropic", sim::AntennaKind::Isotropic, 1.0, 1e-9},
        {"hertzian", sim::AntennaKind::HertzianDipole, 1.5, 0.005 * 1.5},
        {"half-wave", sim::AntennaKind::HalfWaveDipole, 1.641, 0.01 * 1.641},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const auto pat = axial_pattern(g, one, [&](double th) { return sim::analytic_intensity(c.kind, th); });
        const auto t0 = Clock::now();
        const double d = ac::directivity(pat, ac::Direction(90, 0)).values[0];
        const double t = ms_since(t0);
        ok = ok && std::abs(d - c.target) <= c.tol && t < 50.0;
        detail += fmt("%s D=%.6f (%.2f ms) ", c.name, d, t);
    }
    const double oracle = oracle_directivity(
        [](double th) { return sim::analytic_intensity(sim::AntennaKind::HalfWaveDipole, th); }, 0.1);
    ok = ok && std::abs(oracle - 1.641) <= 0.01 * 1.641;
    report(2, "analytic directivities", ok, detail + fmt("| 0.1deg oracle %.6f", oracle));
}

void criterion_3() {
    const auto sweep = FrequencySweep::default_sweep();
    const ReferenceAntenna ref(sweep, std::vector<double>(sweep.size(), 10.0), std::nullopt);
    double worst = 0.0;
    for (auto kind : {sim::AntennaKind::HertzianDipole, sim::AntennaKind::HalfWaveDipole})
        for (double eta : {0.3, 0.7, 1.0}) {
            const sim::SyntheticAntenna a(kind, eta);
            const auto pat = sim::synth_pattern(a, SphericalGrid::default_grid(), sweep);
            const auto link = sim::synth_ac_link(a, ref, sweep);
            const auto rep = ac::run_ac(pat.pattern, link.p_aut_db, link.p_ref_db, ref, std::nullopt, Port::Ch1);
            for (double v : rep.result.eta()) worst = std::max(worst, std::abs(v / eta - 1.0));
        }
    report(3, "AC end-to-end identity", worst <= 0.005,
           fmt("worst rel err %.4f%% over eta {0.3,0.7,1.0}, both dipoles (<=0.5%%)", 100 * worst));
}

void criterion_4() {
    const auto t0 = Clock::now();
    const auto sweep = FrequencySweep::linear(1e9, 3e9, 21);
    const ReferenceAntenna ref(sweep, std::nullopt, std::vector<double>(sweep.size(), 0.9));
    int seeds_ok = 0, trials_ok = 0, trials = 0;
    const int n_seeds = 200;
    for (int s = 0; s < n_seeds; ++s) {
        sim::RcScenario sc;
        sc.n_steps = 1000;
        sc.seed = sim::derive_seed(static_cast<std::uint64_t>(s), 1);
        const auto aut = sim::synth_rc_ensemble(0.9, 0.7, sc, sweep);
        sc.seed = sim::derive_seed(static_cast<std::uint64_t>(s), 0);
        const auto refrun = sim::synth_rc_ensemble(0.9, 0.9, sc, sweep);
        const auto eta = rc::efficiency_rc(aut, refrun, ref, rc::MismatchConvention::PowerAverage).eta();
        for (std::size_t f = 0; f < eta.size(); ++f) {
            const bool in = std::abs(linear_power_to_db(eta[f] / 0.7)) <= 0.5;
            trials_ok += in;
            ++trials;
            if (f == 0) seeds_ok += in;
        }
    }
    const double t = ms_since(t0) / 1000.0;
    const double frac_seed = static_cast<double>(seeds_ok) / n_seeds;
    const double frac_all = static_cast<double>(trials_ok) / trials;
    report(4, "RC estimator", frac_seed >= 0.95 && frac_all >= 0.95 && t < 30.0,
           fmt("%d/%d seeds, %d/%d (seed,freq) trials within 0.5 dB (>=95%%), %.2f s (<30)", seeds_ok, n_seeds,
               trials_ok, trials, t));
}

void criterion_5() {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t nf = 1 + rng() % 5;
        std::vector<double> s21(nf), m11(nf), m22(nf), c11(nf), c22(nf);
        for (std::size_t f = 0; f < nf; ++f) {
            s21[f] = std::pow(10.0, -8.0 * u(rng));
            m11[f] = 0.99 * u(rng);
            m22[f] = 0.99 * u(rng);
            c11[f] = m11[f] * u(rng);
            c22[f] = m22[f] * u(rng);
        }
        const rc::StirredStats s(s21, m11, m22, c11, c22, 1 + rng() % 2000);
        for (auto c : {rc::MismatchConvention::PowerAverage, rc::MismatchConvention::CoherentAverage}) {
            const auto a = rc::transfer_factor_aut(s, c), r = rc::transfer_factor_ref(s, c);
            for (std::size_t f = 0; f < nf; ++f) worst = std::max(worst, std::abs(a[f] * r[f] - 1.0));
        }
    }
    report(5, "factor reciprocity", worst <= 1e-12, fmt("max |F_AUT F_REF - 1| = %.2e (<=1e-12)", worst));
}

SParamEnsemble scale_transmission(const SParamEnsemble& e, double c) {
    std::vector<cdouble> m(e.matrices().begin(), e.matrices().end());
    const std::size_t n = e.n_ports();
    for (std::size_t k = 0; k < m.size(); ++k)
        if ((k / n) % n != k % n) m[k] *= c;
    return SParamEnsemble(n, e.frequencies(), e.n_steps(), std::move(m));
}

void criterion_6() {
    const auto sweep = FrequencySweep::default_sweep();
    sim::RcScenario sc;
    sc.seed = 61;
    const auto aut = sim::synth_rc_ensemble(0.9, 0.7, sc, sweep);
    sc.seed = 62;
    const auto ref_run = sim::synth_rc_ensemble(0.9, 0.9, sc, sweep);
    const ReferenceAntenna ref(sweep, std::nullopt, std::vector<double>(sweep.size(), 0.9));
    const auto base = rc::efficiency_rc(aut, ref_run, ref, rc::MismatchConvention::PowerAverage).eta();
    bool ok = true;
    std::string detail;
    for (double c : {0.1, 1.0, 10.0}) {
        const auto eta =
            rc::efficiency_rc(scale_transmission(aut, c), scale_transmission(ref_run, c), ref,
                              rc::MismatchConvention::PowerAverage)
                .eta();
        std::size_t same = 0;
        double worst = 0.0;
        for (std::size_t f = 0; f < eta.size(); ++f) {
            same += eta[f] == base[f];
            worst = std::max(worst, std::abs(eta[f] / base[f] - 1.0));
        }
        ok = ok && same == eta.size();
        detail += fmt("c=%g: %zu/%zu bit-identical, max rel %.1e; ", c, same, eta.size(), worst);
    }
    report(6, "chamber-loss cancellation", ok, detail);
}

// Runs the CLI workflow on the default scenario; criteria 7, 8 and 10 share it.
struct Workflow {
    fs::path dir;
    compare::ComparisonReport cmp;
    std::vector<EfficiencyResult> ac, rc;
    io::Config truth;
    bool ok = false;
    double seconds = 0.0;
};

Workflow run_workflow(const fs::path& root) {
    Workflow w;
    w.dir = root / "default";
    const auto t0 = Clock::now();
    const auto d = [&](const char* f) { return (w.dir / f).string(); };
    if (run_cli({"simulate", "--seed", "2024", "--out", w.dir.string()}) != 0) return w;
    if (run_cli({"ac-eff", "--pattern", d("pattern_ch1.csv"), "--aut-power", d("power_aut_ch1.csv"), "--pattern",
                 d("pattern_ch2.csv"), "--aut-power", d("power_aut_ch2.csv"), "--pattern", d("pattern_total.csv"),
                 "--aut-power", d("power_aut_total.csv"), "--ref-power", d("power_ref.csv"), "--reference",
                 d("reference.csv"), "--out", d("ac.csv")}) != 0)
        return w;
    if (run_cli({"rc-eff", "--aut", d("rc_aut.manifest"), "--ref", d("rc_ref.manifest"), "--reference",
                 d("reference.csv"), "--combiner-loss-db", "3.2", "--out", d("rc.csv")}) != 0)
        return w;
    if (run_cli({"compare", "--ac", d("ac.csv"), "--rc", d("rc.csv"), "--out", d("compare.csv")}) != 0) return w;
    w.ac = io::parse_results(io::read_file(d("ac.csv")));
    w.rc = io::parse_results(io::read_file(d("rc.csv")));
    w.cmp = compare::compare_results(w.ac, w.rc);
    w.truth = io::Config::read(d("truth.txt"));
    w.seconds = ms_since(t0) / 1000.0;
    w.ok = true;
    return w;
}

void criterion_7(const Workflow& w) {
    if (!w.ok) return report(7, "cross-method agreement", false, "workflow failed");
    bool ok = w.cmp.summaries.size() == 3;
    std::string detail;
    for (const auto& s : w.cmp.summaries) {
        ok = ok && s.mean_abs_delta_db <= 0.5 && s.points == 201;
        detail += fmt("%s mean|d|=%.3f dB; ", to_string(s.port).c_str(), s.mean_abs_delta_db);
    }
    report(7, "cross-method agreement", ok, detail + fmt("201 pts (<=0.5 dB), workflow %.1f s", w.seconds));
}

double mean_db(const EfficiencyResult& r) {
    double acc = 0.0;
    for (double v : r.eta()) acc += linear_power_to_db(v);
    return acc / static_cast<double>(r.eta().size());
}

void criterion_8(const Workflow& w) {
    if (!w.ok) return report(8, "per-port vs combined", false, "workflow failed");
    // Distinct: every pair of port results differs in mean dB by more than 0.1 dB, in the order
    // implied by the injected truth, for both methods.
    bool ok = true;
    std::string detail;
    const double truth[] = {w.truth.get_double("eta_ch1", 0), w.truth.get_double("eta_ch2", 0),
                            w.truth.get_double("eta_total", 0)};
    for (const auto* set : {&w.ac, &w.rc}) {
        std::map<Port, double> m;
        for (const auto& r : *set) m[r.port()] = mean_db(r);
        ok = ok && m.size() == 3;
        const Port ports[] = {Port::Ch1, Port::Ch2, Port::Total};
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double d = m[ports[i]] - m[ports[j]];
                const double want = linear_power_to_db(truth[i] / truth[j]);
                ok = ok && std::abs(d) > 0.1 && (d > 0) == (want > 0);
            }
        detail += fmt("%s ch1/ch2/total %.2f/%.2f/%.2f dB; ", set == &w.ac ? "AC" : "RC", m[Port::Ch1], m[Port::Ch2],
                      m[Port::Total]);
    }

    // Equal in-phase channels through a lossless combiner.
    const FrequencySweep sweep = FrequencySweep::linear(1e9, 3e9, 11);
    sim::RcScenario sc;
    sc.seed = 88;
    sc.unstirred_reflection = {{0.1, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    sc.stirred_reflection_var = 0.0;
    const auto one = sim::synth_rc_ensemble(0.9, 0.8, [&] {
        auto s2 = sc;
        s2.unstirred_reflection.resize(2);
        return s2;
    }(), sweep);
    std::vector<cdouble> m3;
    for (std::size_t k = 0; k < one.n_steps(); ++k)
        for (std::size_t f = 0; f < sweep.size(); ++f) {
            const cdouble t = one.at(k, f, 1, 0);
            m3.insert(m3.end(), {one.at(k, f, 0, 0), t, t, t, 0.0, 0.0, t, 0.0, 0.0});
        }
    const SParamEnsemble three(3, sweep, one.n_steps(), std::move(m3));
    const auto total = combine::virtual_combine(three, combine::ideal_combiner(combine::kLosslessSplitDb, INFINITY, sweep));
    const ReferenceAntenna ref(sweep, std::nullopt, std::vector<double>(sweep.size(), 1.0));
    const auto e_one = rc::efficiency_rc(one, one, ref, rc::MismatchConvention::PowerAverage).eta();
    const auto e_tot = rc::efficiency_rc(total, one, ref, rc::MismatchConvention::PowerAverage).eta();
    double worst = 0.0;
    for (std::size_t f = 0; f < sweep.size(); ++f)
        worst = std::max(worst, std::abs(linear_power_to_db(e_tot[f] / e_one[f]) - 3.0103));
    ok = ok && worst <= 5e-5;
    report(8, "per-port vs combined", ok, detail + fmt("coherent gain 3.0103 dB +/- %.1e", worst));
}

// ------------------------------------------------------------------------------------------------

const std::map<std::string, ParseError::Kind>& kind_names() {
    using K = ParseError::Kind;
    static const std::map<std::string, K> m{
        {"MalformedOptionLine", K::MalformedOptionLine},
        {"DuplicateOptionLine", K::DuplicateOptionLine},
        {"UnsupportedPortCount", K::UnsupportedPortCount},
        {"UnsupportedVersion", K::UnsupportedVersion},
        {"NonNumeric", K::NonNumeric},
        {"NonFinite", K::NonFinite},
        {"TruncatedRow", K::TruncatedRow},
        {"ExtraValues", K::ExtraValues},
        {"NonMonotonicFrequency", K::NonMonotonicFrequency},
        {"NonPositiveFrequency", K::NonPositiveFrequency},
        {"EmptyData", K::EmptyData},
        {"BadHeader", K::BadHeader},
        {"MissingSample", K::MissingSample},
        {"DuplicateSample", K::DuplicateSample},
        {"IrregularGrid", K::IrregularGrid},
        {"BadValue", K::BadValue},
        {"UnknownKey", K::UnknownKey},
        {"MissingKey", K::MissingKey},
        {"BadManifest", K::BadManifest},
    };
    return m;
}

void parse_any(const fs::path& p) {
    const auto name = p.filename().string();
    const auto ext = p.extension().string();
    const auto src = p.string();
    if (ext.size() == 4 && (ext[1] == 's' || ext[1] == 'S') && ext != ".sens") {
        io::read_touchstone(p);
    } else if (ext == ".manifest") {
        io::read_manifest(p);
    } else if (ext == ".sens") {
        io::parse_ensemble_container(io::read_file(p), src);
    } else if (ext == ".cfg") {
        io::Config::read(p);
    } else if (name.rfind("pattern_", 0) == 0) {
        io::parse_pattern_csv(io::read_file(p), src);
    } else if (name.rfind("results_", 0) == 0) {
        io::parse_results(io::read_file(p), src);
    } else if (name.rfind("power_", 0) == 0) {
        io::parse_power_csv(io::read_file(p), src);
    } else if (name.rfind("reference_", 0) == 0) {
        io::parse_reference_csv(io::read_file(p), src);
    } else {
        throw std::logic_error("no parser for " + name);
    }
}

void criterion_9() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    double cross = 0.0, round = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t ports = 1 + static_cast<std::size_t>(trial % 4), nf = 1 + rng() % 20;
        io::TouchstoneData d{ports, FrequencySweep::linear(1e8 * (1 + rng() % 10), 6e9, nf), {}, 50.0};
        for (std::size_t k = 0; k < nf * ports * ports; ++k) d.matrices.emplace_back(u(rng), u(rng));
        std::vector<io::TouchstoneData> parsed;
        for (auto fmt_ : {io::TouchstoneFormat::RI, io::TouchstoneFormat::MA, io::TouchstoneFormat::DB})
            parsed.push_back(io::parse_touchstone(io::write_touchstone(d, fmt_), ports));
        for (std::size_t k = 0; k < d.matrices.size(); ++k) {
            const double mag = std::abs(d.matrices[k]);
            for (const auto& p : parsed) {
                round = std::max(round, std::abs(p.matrices[k] - d.matrices[k]) / mag);
                cross = std::max(cross, std::abs(p.matrices[k] - parsed[0].matrices[k]) / mag);
            }
        }
    }

    // Every corpus file must give the listed structured error class.
    const fs::path corpus = CHAMBEREFF_CORPUS_DIR;
    std::istringstream expected(io::read_file(corpus / "EXPECTED"));
    std::string line;
    std::size_t files = 0, matched = 0;
    std::set<std::string> classes;
    std::string bad;
    while (std::getline(expected, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string file, kind;
        ls >> file >> kind;
        ++files;
        classes.insert(kind);
        try {
            parse_any(corpus / file);
            bad += file + " accepted; ";
        } catch (const ParseError& e) {
            if (e.kind() == kind_names().at(kind)) ++matched;
            else bad += file + " wrong class; ";
        } catch (const std::exception& e) {
            bad += file + " unstructured (" + e.what() + "); ";
        }
    }

    // Random byte mutations of valid files: every failure must be a library error.
    std::size_t mutants = 0, unstructured = 0;
    sim::RcScenario sc;
    sc.n_steps = 2;
    const auto valid = io::write_touchstone(io::ensemble_step(
        sim::synth_rc_ensemble(0.9, 0.9, sc, FrequencySweep::linear(1e9, 2e9, 4)), 0), io::TouchstoneFormat::MA);
    const std::string alphabet = "0123456789.-+eE #!\n\tGHZSRIMADB[]x,";
    for (int trial = 0; trial < 5000; ++trial) {
        std::string s = valid;
        const int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits; ++e) {
            const std::size_t pos = rng() % s.size();
            switch (rng() % 3) {
                case 0: s[pos] = alphabet[rng() % alphabet.size()]; break;
                case 1: s.erase(pos, 1 + rng() % 8); break;
                default: s.insert(pos, 1, alphabet[rng() % alphabet.size()]);
            }
            if (s.empty()) s = "x";
        }
        ++mutants;
        try {
            io::parse_touchstone(s, 2, "mutant");
        } catch (const Error&) {
        } catch (...) {
            ++unstructured;
        }
    }

    const bool ok = cross <= 1e-5 && round <= 1e-9 && matched == files && classes.size() >= 12 && unstructured == 0;
    report(9, "parser robustness", ok,
           fmt("cross-format %.1e (<=1e-5), round-trip %.1e (<=1e-9), corpus %zu/%zu files in %zu classes, "
               "%zu mutants %zu unstructured",
               cross, round, matched, files, classes.size(), mutants, unstructured) +
               (bad.empty() ? "" : " | " + bad));
}

void criterion_10(const Workflow& w, const fs::path& root) {
    if (!w.ok) return report(10, "determinism", false, "workflow failed");
    const auto again = root / "again", threaded = root / "threaded";
    bool ok = run_cli({"simulate", "--seed", "2024", "--out", again.string()}) == 0 &&
              run_cli({"simulate", "--seed", "2024", "--workers", "7", "--out", threaded.string()}) == 0;
    std::size_t files = 0, identical = 0;
    if (ok)
        for (const auto& e : fs::directory_iterator(w.dir)) {
            const auto name = e.path().filename();
            if (name == "ac.csv" || name == "rc.csv" || name == "compare.csv") continue;
            ++files;
            const auto ref = io::read_file(e.path());
            identical += fs::exists(again / name) && fs::exists(threaded / name) &&
                         io::read_file(again / name) == ref && io::read_file(threaded / name) == ref;
        }
    ok = ok && files > 0 && identical == files;
    report(10, "determinism", ok, fmt("%zu/%zu output files byte-identical across runs and 1 vs 7 workers", identical, files));
}

}  // namespace

int main() {
    const fs::path root = fs::temp_directory_path() / "chambereff_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    const auto workflow = run_workflow(root);
    criterion_7(workflow);
    criterion_8(workflow);
    criterion_9();
    criterion_10(workflow, root);

    fs::remove_all(root);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
