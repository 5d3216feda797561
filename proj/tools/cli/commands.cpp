#include "commands.hpp"

#include <chambereff/ac.hpp>
#include <chambereff/combine.hpp>
#include <chambereff/compare.hpp>
#include <chambereff/io.hpp>
#include <chambereff/rc.hpp>
#include <chambereff/sim.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

namespace chambereff::cli {

namespace fs = std::filesystem;

namespace {

void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
    if (out_path.empty() || out_path == "-") {
        out << content;
    } else {
        io::write_file_atomic(out_path, content);
    }
}

ac::Direction parse_direction(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InvalidArgument("direction must be THETA,PHI in degrees");
    try {
        std::size_t used = 0;
        const double theta = std::stod(text.substr(0, comma), &used);
        const double phi = std::stod(text.substr(comma + 1));
        return ac::Direction(theta, phi);
    } catch (const std::logic_error&) {
        throw InvalidArgument("direction must be THETA,PHI in degrees, got '" + text + "'");
    }
}

std::string fmt(double x) { return io::format_number(x); }

// ------------------------------------------------------------------------------------------------

struct AcArgs {
    std::vector<std::string> patterns;
    std::vector<std::string> aut_powers;
    std::vector<std::string> ports;
    std::string ref_power;
    std::string reference;
    std::string direction;
    std::string config;
    std::string out;
    bool verbose = false;
};

int cmd_ac_eff(const AcArgs& a, std::ostream& out, std::ostream& err) {
    if (a.patterns.size() != a.aut_powers.size())
        throw InvalidArgument("--pattern and --aut-power must be given the same number of times");
    std::string direction = a.direction;
    if (!a.config.empty()) {
        const auto cfg = io::Config::read(a.config);
        cfg.require_known({"direction"});
        if (direction.empty()) direction = cfg.get_string("direction", "");
    }
    std::optional<ac::Direction> fixed;
    if (!direction.empty() && direction != "peak") fixed = parse_direction(direction);

    const auto ref = io::parse_reference_csv(io::read_file(a.reference), a.reference);
    const auto p_ref = io::parse_power_csv(io::read_file(a.ref_power), a.ref_power);
    static const Port defaults[] = {Port::Ch1, Port::Ch2, Port::Total};

    std::vector<EfficiencyResult> results;
    for (std::size_t i = 0; i < a.patterns.size(); ++i) {
        Port port = i < a.ports.size() ? parse_port(a.ports[i]) : (i < 3 ? defaults[i] : Port::Ch1);
        const auto pattern = io::parse_pattern_csv(io::read_file(a.patterns[i]), a.patterns[i]);
        const auto p_aut = io::parse_power_csv(io::read_file(a.aut_powers[i]), a.aut_powers[i]);
        auto report = ac::run_ac(pattern, p_aut, p_ref, ref, fixed, port);
        if (a.verbose) {
            err << "# ac-eff " << to_string(port) << ": freq_hz,theta_deg,phi_deg,F_NorAv,D,G\n";
            for (std::size_t f = 0; f < report.gain.values.size(); ++f)
                err << fmt(report.gain.sweep[f]) << "," << fmt(report.directions[f].theta_deg()) << ","
                    << fmt(report.directions[f].phi_deg()) << "," << fmt(report.average_intensity[f]) << ","
                    << fmt(report.directivity.values[f]) << "," << fmt(report.gain.values[f]) << "\n";
        }
        results.push_back(std::move(report.result));
    }
    emit(io::write_results(results), a.out, out);
    return kExitOk;
}

// ------------------------------------------------------------------------------------------------

struct RcArgs {
    std::string aut;
    std::string ref;
    std::string reference;
    std::string convention;
    bool as_printed = false;
    std::optional<double> combiner_loss_db;
    std::optional<double> combiner_isolation_db;
    std::string combiner_file;
    bool de_embed = false;
    std::string config;
    std::string out;
    bool verbose = false;
};

void print_rc_details(const rc::RcReport& r, const std::string& label, rc::MismatchConvention conv,
                      const FrequencySweep& sweep, std::ostream& err) {
    err << "# rc-eff " << label << " (" << rc::to_string(conv)
        << "): freq_hz,S21_aut,M_tx_aut,M_rx_aut,S21_ref,M_tx_ref,M_rx_ref,F_AUT,F_REF\n";
    for (std::size_t f = 0; f < sweep.size(); ++f)
        err << fmt(sweep[f]) << "," << fmt(r.aut_stats.mean_mag2_s21[f]) << "," << fmt(r.aut_stats.tx_mismatch(f, conv))
            << "," << fmt(r.aut_stats.rx_mismatch(f, conv)) << "," << fmt(r.ref_stats.mean_mag2_s21[f]) << ","
            << fmt(r.ref_stats.tx_mismatch(f, conv)) << "," << fmt(r.ref_stats.rx_mismatch(f, conv)) << ","
            << fmt(r.f_aut[f]) << "," << fmt(r.f_ref[f]) << "\n";
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
}

int cmd_rc_eff(RcArgs a, std::ostream& out, std::ostream& err) {
    if (!a.config.empty()) {
        const auto cfg = io::Config::read(a.config);
        cfg.require_known({"convention", "as_printed", "combiner_loss_db", "combiner_isolation_db", "de_embed_combiner",
                           "combiner_file"});
        if (a.convention.empty()) a.convention = cfg.get_string("convention", "");
        a.as_printed = a.as_printed || cfg.get_bool("as_printed", false);
        a.de_embed = a.de_embed || cfg.get_bool("de_embed_combiner", false);
        if (!a.combiner_loss_db && cfg.has("combiner_loss_db")) a.combiner_loss_db = cfg.get_double("combiner_loss_db", 0);
        if (!a.combiner_isolation_db && cfg.has("combiner_isolation_db"))
            a.combiner_isolation_db = cfg.get_double("combiner_isolation_db", 0);
        if (a.combiner_file.empty()) a.combiner_file = cfg.get_string("combiner_file", "");
    }
    if (a.convention.empty()) a.convention = "power";
    std::vector<rc::MismatchConvention> conventions;
    if (a.convention == "power") conventions = {rc::MismatchConvention::PowerAverage};
    else if (a.convention == "coherent") conventions = {rc::MismatchConvention::CoherentAverage};
    else if (a.convention == "both")
        conventions = {rc::MismatchConvention::PowerAverage, rc::MismatchConvention::CoherentAverage};
    else throw InvalidArgument("--convention must be power, coherent or both");

    const auto ref_ant = io::parse_reference_csv(io::read_file(a.reference), a.reference);
    const auto aut_manifest = io::read_manifest(a.aut);
    const auto ref_manifest = io::read_manifest(a.ref);
    const auto aut = io::load_ensemble(aut_manifest);
    const auto ref = io::load_ensemble(ref_manifest);
    if (ref.n_ports() != 2) throw InvalidArgument("reference manifest must select exactly tx and rx1");
    const auto sweep = align_sweeps(aut.frequencies(), ref.frequencies());

    const bool combine_requested = a.combiner_loss_db || a.combiner_isolation_db || !a.combiner_file.empty() || a.de_embed;
    if (combine_requested && aut.n_ports() != 3)
        throw InvalidArgument("combiner options need a 3-port {tx, rx1, rx2} AUT manifest");

    const auto ref_stats = rc::stirred_stats(ref, 0, 1);
    struct Channel {
        Port port;
        rc::StirredStats stats;
        std::optional<std::vector<double>> deembed;
    };
    std::vector<Channel> channels;
    if (aut.n_ports() == 3) {
        channels.push_back({Port::Ch1, rc::stirred_stats(aut, 0, 1), std::nullopt});
        channels.push_back({Port::Ch2, rc::stirred_stats(aut, 0, 2), std::nullopt});
        if (combine_requested) {
            auto combiner = a.combiner_file.empty()
                                ? combine::ideal_combiner(a.combiner_loss_db.value_or(combine::kDefaultInsertionLossDb),
                                                          a.combiner_isolation_db.value_or(combine::kDefaultIsolationDb),
                                                          sweep)
                                : [&] {
                                      const auto ts = io::read_touchstone(a.combiner_file);
                                      if (ts.n_ports != 3) throw InvalidArgument("combiner file must be a 3-port network");
                                      return combine::CombinerModel(ts.frequencies, ts.matrices);
                                  }();
            const auto total = combine::virtual_combine(aut, combiner);
            std::optional<std::vector<double>> factor;
            if (a.de_embed) factor = combine::de_embed_factor(combiner);
            channels.push_back({Port::Total, rc::stirred_stats(total, 0, 1), factor});
        }
    } else {
        channels.push_back({aut_manifest.label, rc::stirred_stats(aut, 0, 1), std::nullopt});
    }

    std::vector<EfficiencyResult> results;
    for (const auto conv : conventions) {
        for (const auto& ch : channels) {
            rc::RcOptions opt;
            opt.convention = conv;
            opt.form = a.as_printed ? rc::FactorForm::AsPrinted : rc::FactorForm::Corrected;
            opt.port = ch.port;
            auto report = rc::run_rc(ch.stats, ref_stats, sweep, ref_ant, opt);
            if (a.verbose) print_rc_details(report, to_string(ch.port), conv, sweep, err);
            EfficiencyResult r = report.result;
            if (ch.deembed) {
                auto eta = r.eta();
                auto flags = r.flags();
                for (std::size_t f = 0; f < eta.size(); ++f) {
                    eta[f] *= (*ch.deembed)[f];
                    flags[f].insert("de_embedded");
                    flags[f].erase(kFlagOverUnity);
                }
                r = EfficiencyResult(r.frequencies(), std::move(eta), r.method(), r.port(), std::move(flags));
            }
            r = r.with_flag("convention=" + rc::to_string(conv));
            if (a.as_printed) r = r.with_flag("as_printed");
            results.push_back(std::move(r));
        }
    }
    emit(io::write_results(results), a.out, out);
    return kExitOk;
}

// ------------------------------------------------------------------------------------------------

struct SimArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

const std::vector<std::string> kScenarioKeys = {
    "seed", "n_steps", "freq_start_hz", "freq_stop_hz", "freq_points", "theta_step_deg", "phi_step_deg",
    "antenna", "eta_ch1", "eta_ch2", "eta_ref", "tx_eff", "ref_gain_dbi", "link_constant_db", "chamber_gain",
    "tx_reflection", "rx1_reflection", "rx2_reflection", "ref_reflection", "stirred_reflection_var",
    "combiner_loss_db", "channels", "ensemble_format", "workers",
};

void write_ensemble(const SParamEnsemble& e, const fs::path& dir, const std::string& stem, bool as_set,
                    const io::PortRoles& roles, Port label) {
    io::EnsembleManifest m;
    m.roles = roles;
    m.label = label;
    if (as_set) {
        const fs::path sub = dir / stem;
        fs::create_directories(sub);
        const std::string ext = ".s" + std::to_string(e.n_ports()) + "p";
        for (std::size_t k = 0; k < e.n_steps(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "step_%04zu", k);
            const fs::path rel = fs::path(stem) / (std::string(name) + ext);
            io::write_file_atomic(dir / rel, io::write_touchstone(io::ensemble_step(e, k)));
            m.files.push_back(rel);
        }
    } else {
        const fs::path rel = stem + ".sens";
        io::write_file_atomic(dir / rel, io::write_ensemble_container(e));
        m.container = rel;
    }
    io::write_file_atomic(dir / (stem + ".manifest"), io::write_manifest(m));
}

int cmd_simulate(const SimArgs& a, std::ostream& out) {
    io::Config cfg;
    if (!a.config.empty()) cfg = io::Config::read(a.config);
    cfg.require_known(kScenarioKeys);

    const std::uint64_t seed = a.seed.value_or(cfg.get_uint("seed", 1));
    const unsigned workers = a.workers.value_or(static_cast<unsigned>(cfg.get_uint("workers", 1)));
    const auto sweep = FrequencySweep::linear(cfg.get_double("freq_start_hz", 1e9), cfg.get_double("freq_stop_hz", 3e9),
                                              cfg.get_uint("freq_points", 201));
    const SphericalGrid grid(cfg.get_double("theta_step_deg", 5.0), cfg.get_double("phi_step_deg", 5.0));
    const auto kind = sim::parse_antenna_kind(cfg.get_string("antenna", "hertzian_dipole"));
    const double eta1 = cfg.get_double("eta_ch1", 0.6);
    const double eta2 = cfg.get_double("eta_ch2", 0.8);
    const double eta_ref = cfg.get_double("eta_ref", 0.9);
    const double tx_eff = cfg.get_double("tx_eff", 0.9);
    const double ref_gain = cfg.get_double("ref_gain_dbi", 10.0);
    const double link_db = cfg.get_double("link_constant_db", -40.0);
    const double loss_db = cfg.get_double("combiner_loss_db", combine::kDefaultInsertionLossDb);
    const auto channels = cfg.get_uint("channels", 2);
    const auto format = cfg.get_string("ensemble_format", "container");
    if (channels != 1 && channels != 2) throw InvalidArgument("channels must be 1 or 2");
    if (format != "container" && format != "touchstone_set")
        throw InvalidArgument("ensemble_format must be container or touchstone_set");
    if (loss_db < combine::kLosslessSplitDb - 1e-12)
        throw PassivityViolation("combiner_loss_db is below the lossless 3.0103 dB split");

    sim::RcScenario sc;
    sc.chamber_gain = cfg.get_double("chamber_gain", sc.chamber_gain);
    sc.stirred_reflection_var = cfg.get_double("stirred_reflection_var", sc.stirred_reflection_var);
    sc.n_steps = cfg.get_uint("n_steps", sc.n_steps);
    const cdouble g_tx = cfg.get_complex("tx_reflection", {0.1, 0.0});
    const cdouble g_rx1 = cfg.get_complex("rx1_reflection", {0.15, 0.05});
    const cdouble g_rx2 = cfg.get_complex("rx2_reflection", {0.12, -0.04});
    const cdouble g_ref = cfg.get_complex("ref_reflection", {0.15, 0.05});

    const ReferenceAntenna ref(sweep, std::vector<double>(sweep.size(), ref_gain),
                               std::vector<double>(sweep.size(), eta_ref));
    const fs::path dir = a.out;
    fs::create_directories(dir);
    io::write_file_atomic(dir / "reference.csv", io::write_reference_csv(ref));

    // Anechoic chamber: ch1 radiates VP, ch2 HP; the combined port carries both through the combiner.
    const double t2 = std::pow(10.0, -loss_db / 10.0);
    io::Config truth;
    truth.set("seed", std::to_string(seed));
    truth.set("antenna", sim::to_string(kind));
    truth.set("true_peak_directivity", fmt(sim::analytic_peak_directivity(kind)));
    truth.set("eta_ref", fmt(eta_ref));
    truth.set("eta_ch1", fmt(eta1));
    truth.set("n_steps", std::to_string(sc.n_steps));

    const sim::SyntheticAntenna ant1(kind, eta1);
    auto pat1 = sim::synth_pattern(ant1, grid, sweep, sim::Polarization::VP, eta1);
    io::write_file_atomic(dir / "pattern_ch1.csv", io::write_pattern_csv(pat1.pattern));
    const auto link1 = sim::synth_ac_link(ant1, ref, sweep, link_db);
    io::write_file_atomic(dir / "power_ref.csv", io::write_power_csv(link1.p_ref_db));
    io::write_file_atomic(dir / "power_aut_ch1.csv", io::write_power_csv(link1.p_aut_db));

    if (channels == 2) {
        const sim::SyntheticAntenna ant2(kind, eta2);
        auto pat2 = sim::synth_pattern(ant2, grid, sweep, sim::Polarization::HP, eta2);
        io::write_file_atomic(dir / "pattern_ch2.csv", io::write_pattern_csv(pat2.pattern));
        io::write_file_atomic(dir / "power_aut_ch2.csv",
                              io::write_power_csv(sim::synth_ac_link(ant2, ref, sweep, link_db).p_aut_db));

        PatternData total{grid, sweep, pat1.pattern.data().intensity_vp, pat2.pattern.data().intensity_hp};
        io::write_file_atomic(dir / "pattern_total.csv", io::write_pattern_csv(RadiationPattern(std::move(total))));
        const double eta_total = t2 * (eta1 + eta2);
        const double gain_total = eta_total * sim::analytic_peak_directivity(kind);
        io::write_file_atomic(dir / "power_aut_total.csv",
                              io::write_power_csv(sim::synth_ac_link(gain_total, ref, sweep, link_db).p_aut_db));
        truth.set("eta_ch2", fmt(eta2));
        truth.set("eta_total", fmt(eta_total));
        truth.set("combiner_loss_db", fmt(loss_db));
    }

    // Reverberation chamber: independent seeds for the AUT and REF runs.
    const bool as_set = format == "touchstone_set";
    sim::RcScenario ref_sc = sc;
    ref_sc.seed = sim::derive_seed(seed, 0);
    ref_sc.unstirred_reflection = {g_tx, g_ref};
    const auto ref_run = sim::synth_rc_ensemble(tx_eff, eta_ref, ref_sc, sweep, workers);
    write_ensemble(ref_run, dir, "rc_ref", as_set, io::PortRoles{0, 1, std::nullopt}, Port::Ch1);

    sim::RcScenario aut_sc = sc;
    aut_sc.seed = sim::derive_seed(seed, 1);
    if (channels == 2) {
        aut_sc.unstirred_reflection = {g_tx, g_rx1, g_rx2};
        const auto aut_run = sim::synth_rc_ensemble_mimo(tx_eff, eta1, eta2, aut_sc, sweep, workers);
        write_ensemble(aut_run, dir, "rc_aut", as_set, io::PortRoles{0, 1, 2}, Port::Ch1);
    } else {
        aut_sc.unstirred_reflection = {g_tx, g_rx1};
        const auto aut_run = sim::synth_rc_ensemble(tx_eff, eta1, aut_sc, sweep, workers);
        write_ensemble(aut_run, dir, "rc_aut", as_set, io::PortRoles{0, 1, std::nullopt}, Port::Ch1);
    }

    io::write_file_atomic(dir / "truth.txt", truth.write());
    out << "wrote synthetic data set to " << dir.string() << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------------------------------------

struct CompareArgs {
    std::string ac;
    std::string rc;
    std::string out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    const auto ac = io::parse_results(io::read_file(a.ac), a.ac);
    const auto rc = io::parse_results(io::read_file(a.rc), a.rc);
    for (const auto& r : ac)
        if (r.method() != Method::AC) throw InvalidArgument(a.ac + " contains non-AC results");
    for (const auto& r : rc)
        if (r.method() != Method::RC) throw InvalidArgument(a.rc + " contains non-RC results");
    emit(compare::write_comparison(compare::compare_results(ac, rc)), a.out, out);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Antenna radiation efficiency from anechoic and reverberation chamber data", "chambereff"};
    app.require_subcommand(1);

    AcArgs ac_args;
    auto* ac_cmd = app.add_subcommand("ac-eff", "Efficiency from pattern scans and substitution gain");
    ac_cmd->add_option("--pattern", ac_args.patterns, "Pattern CSV (repeat per port)")->required()->check(CLI::ExistingFile);
    ac_cmd->add_option("--aut-power", ac_args.aut_powers, "AUT received power CSV (repeat per port)")->required();
    ac_cmd->add_option("--port", ac_args.ports, "Result label per pattern: ch1, ch2, total");
    ac_cmd->add_option("--ref-power", ac_args.ref_power, "Reference antenna received power CSV")->required();
    ac_cmd->add_option("--reference", ac_args.reference, "Reference antenna table")->required();
    ac_cmd->add_option("--direction", ac_args.direction, "Fixed direction THETA,PHI in degrees (default: peak)");
    ac_cmd->add_option("--config", ac_args.config, "key = value config file");
    ac_cmd->add_option("--out", ac_args.out, "Results CSV path (default stdout)");
    ac_cmd->add_flag("--verbose", ac_args.verbose, "Print intermediate quantities to stderr");

    RcArgs rc_args;
    double loss = 0.0, iso = 0.0;
    auto* rc_cmd = app.add_subcommand("rc-eff", "Efficiency from stirred S-parameter ensembles");
    rc_cmd->add_option("--aut", rc_args.aut, "AUT ensemble manifest")->required();
    rc_cmd->add_option("--ref", rc_args.ref, "Reference ensemble manifest")->required();
    rc_cmd->add_option("--reference", rc_args.reference, "Reference antenna table")->required();
    rc_cmd->add_option("--convention", rc_args.convention, "power | coherent | both");
    rc_cmd->add_flag("--as-printed", rc_args.as_printed, "Use the duplicated AUT-port mismatch factor");
    auto* loss_opt = rc_cmd->add_option("--combiner-loss-db", loss, "Ideal combiner insertion loss (dB)");
    auto* iso_opt = rc_cmd->add_option("--combiner-isolation-db", iso, "Ideal combiner isolation (dB)");
    rc_cmd->add_option("--combiner-file", rc_args.combiner_file, "Measured combiner Touchstone .s3p");
    rc_cmd->add_flag("--de-embed-combiner", rc_args.de_embed, "Remove combiner loss from the total result");
    rc_cmd->add_option("--config", rc_args.config, "key = value config file");
    rc_cmd->add_option("--out", rc_args.out, "Results CSV path (default stdout)");
    rc_cmd->add_flag("--verbose", rc_args.verbose, "Print intermediate quantities to stderr");

    SimArgs sim_args;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic data set with known ground truth");
    sim_cmd->add_option("--config", sim_args.config, "Scenario config file");
    auto* seed_opt = sim_cmd->add_option("--seed", seed, "Master seed (overrides config)");
    auto* workers_opt = sim_cmd->add_option("--workers", workers, "Generator threads")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--out", sim_args.out, "Output directory")->required();

    CompareArgs cmp_args;
    auto* cmp_cmd = app.add_subcommand("compare", "Compare AC and RC results per port");
    cmp_cmd->add_option("--ac", cmp_args.ac, "AC results CSV")->required();
    cmp_cmd->add_option("--rc", cmp_args.rc, "RC results CSV")->required();
    cmp_cmd->add_option("--out", cmp_args.out, "Comparison CSV path (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (*ac_cmd) return cmd_ac_eff(ac_args, out, err);
        if (*rc_cmd) {
            if (*loss_opt) rc_args.combiner_loss_db = loss;
            if (*iso_opt) rc_args.combiner_isolation_db = iso;
            return cmd_rc_eff(rc_args, out, err);
        }
        if (*sim_cmd) {
            if (*seed_opt) sim_args.seed = seed;
            if (*workers_opt) sim_args.workers = workers;
            return cmd_simulate(sim_args, out);
        }
        if (*cmp_cmd) return cmd_compare(cmp_args, out);
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace chambereff::cli
