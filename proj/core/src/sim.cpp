#include <chambereff/philox.hpp>
#include <chambereff/sim.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

namespace chambereff::sim {

std::string to_string(AntennaKind k) {
    switch (k) {
        case AntennaKind::Isotropic: return "isotropic";
        case AntennaKind::HertzianDipole: return "hertzian_dipole";
        case AntennaKind::HalfWaveDipole: return "half_wave_dipole";
    }
    return "?";
}

AntennaKind parse_antenna_kind(const std::string& s) {
    if (s == "isotropic") return AntennaKind::Isotropic;
    if (s == "hertzian_dipole") return AntennaKind::HertzianDipole;
    if (s == "half_wave_dipole") return AntennaKind::HalfWaveDipole;
    throw InvalidArgument("unknown antenna kind '" + s + "'");
}

double analytic_peak_directivity(AntennaKind k) {
    switch (k) {
        case AntennaKind::Isotropic: return 1.0;
        case AntennaKind::HertzianDipole: return 1.5;
        case AntennaKind::HalfWaveDipole: return 1.6409223769845853;  // 4 / Cin(2 pi)
    }
    return 1.0;
}

double analytic_intensity(AntennaKind k, double theta_rad) {
    switch (k) {
        case AntennaKind::Isotropic: return 1.0;
        case AntennaKind::HertzianDipole: {
            const double s = std::sin(theta_rad);
            return s * s;
        }
        case AntennaKind::HalfWaveDipole: {
            const double s = std::sin(theta_rad);
            if (std::abs(s) < 1e-12) return 0.0;
            const double c = std::cos(0.5 * kPi * std::cos(theta_rad));
            return c * c / (s * s);
        }
    }
    return 0.0;
}

SyntheticAntenna::SyntheticAntenna(AntennaKind kind, double true_efficiency) : kind_(kind), eta_(true_efficiency) {
    if (!(true_efficiency > 0.0 && true_efficiency <= 1.0))
        throw InvalidArgument("synthetic antenna efficiency must lie in (0, 1]");
}

SyntheticPattern synth_pattern(const SyntheticAntenna& a, const SphericalGrid& grid, const FrequencySweep& sweep,
                               Polarization pol, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("pattern scale must be positive");
    const std::size_t nt = grid.theta_samples(), np = grid.phi_samples(), nf = sweep.size();
    std::vector<double> ring(nt);
    for (std::size_t it = 0; it < nt; ++it)
        ring[it] = scale * analytic_intensity(a.kind(), grid.theta_deg(it) * kDegToRad);

    std::vector<double> active(nf * nt * np), zeros(nf * nt * np, 0.0);
    for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t it = 0; it < nt; ++it)
            std::fill_n(active.begin() + static_cast<std::ptrdiff_t>((f * nt + it) * np), np, ring[it]);

    PatternData data{grid, sweep, {}, {}};
    if (pol == Polarization::VP) {
        data.intensity_vp = std::move(active);
        data.intensity_hp = std::move(zeros);
    } else {
        data.intensity_vp = std::move(zeros);
        data.intensity_hp = std::move(active);
    }
    return {RadiationPattern(std::move(data)), Spectrum(sweep, std::vector<double>(nf, a.true_gain()))};
}

AcLink synth_ac_link(double true_gain_linear, const ReferenceAntenna& ref, const FrequencySweep& sweep,
                     double link_constant_db) {
    if (!(true_gain_linear > 0.0)) throw InvalidArgument("true gain must be positive");
    const auto shared = align_sweeps(sweep, ref.frequencies());
    const auto& g_ref = ref.gain_dbi();
    const double g_aut_db = linear_power_to_db(true_gain_linear);
    std::vector<double> p_aut(shared.size()), p_ref(shared.size());
    for (std::size_t i = 0; i < shared.size(); ++i) {
        p_ref[i] = link_constant_db + g_ref[i];
        p_aut[i] = link_constant_db + g_aut_db;
    }
    return {Spectrum(shared, std::move(p_aut)), Spectrum(shared, std::move(p_ref))};
}

AcLink synth_ac_link(const SyntheticAntenna& a, const ReferenceAntenna& ref, const FrequencySweep& sweep,
                     double link_constant_db) {
    return synth_ac_link(a.true_gain(), ref, sweep, link_constant_db);
}

// ------------------------------------------------------------------------------------------------

void RcScenario::validate() const {
    if (!(chamber_gain > 0.0) || !std::isfinite(chamber_gain)) throw InvalidArgument("chamber_gain must be > 0");
    if (!(stirred_reflection_var >= 0.0) || !std::isfinite(stirred_reflection_var))
        throw InvalidArgument("stirred_reflection_var must be >= 0");
    if (n_steps == 0) throw InvalidArgument("n_steps must be >= 1");
    for (const auto& g : unstirred_reflection)
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
            throw InvalidArgument("unstirred reflection must be finite");
}

cdouble keyed_complex_normal(std::uint64_t seed, std::uint32_t step, std::uint32_t freq, std::uint32_t entry) {
    const Philox4x32 gen(seed);
    const auto r = gen({step, freq, entry, 0u});
    const double u1 = to_open_unit(r[0], r[1]);
    const double u2 = to_open_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (run + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

template <typename Fill>
void parallel_steps(std::size_t n_steps, unsigned workers, Fill fill) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_steps)));
    if (workers == 1) {
        fill(0, n_steps);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n_steps + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n_steps, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([=] { fill(lo, hi); });
    }
}

SParamEnsemble generate(std::size_t n_ports, double tx_eff, const std::vector<double>& rx_effs,
                        const RcScenario& sc, const FrequencySweep& sweep, unsigned workers) {
    sc.validate();
    if (!(tx_eff > 0.0 && tx_eff <= 1.0)) throw InvalidArgument("tx efficiency must lie in (0, 1]");
    for (double e : rx_effs)
        if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument("rx efficiency must lie in (0, 1]");
    if (sc.unstirred_reflection.size() != n_ports)
        throw InvalidArgument("scenario needs one unstirred reflection per port (" + std::to_string(n_ports) + ")");

    const std::size_t nf = sweep.size();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double refl_sigma = std::sqrt(sc.stirred_reflection_var) * inv_sqrt2;
    std::vector<double> amp(rx_effs.size());
    for (std::size_t r = 0; r < amp.size(); ++r) amp[r] = std::sqrt(tx_eff * rx_effs[r] * sc.chamber_gain) * inv_sqrt2;

    std::vector<cdouble> m(sc.n_steps * nf * n_ports * n_ports, cdouble{});
    parallel_steps(sc.n_steps, workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            for (std::size_t f = 0; f < nf; ++f) {
                cdouble* s = &m[(k * nf + f) * n_ports * n_ports];
                const auto step = static_cast<std::uint32_t>(k), fi = static_cast<std::uint32_t>(f);
                for (std::size_t p = 0; p < n_ports; ++p) {
                    const auto entry = static_cast<std::uint32_t>(p * n_ports + p);
                    cdouble refl = sc.unstirred_reflection[p];
                    if (refl_sigma > 0.0) refl += refl_sigma * keyed_complex_normal(sc.seed, step, fi, entry);
                    s[p * n_ports + p] = refl;
                }
                for (std::size_t r = 1; r < n_ports; ++r) {
                    const auto entry = static_cast<std::uint32_t>(r * n_ports);
                    const cdouble t = amp[r - 1] * keyed_complex_normal(sc.seed, step, fi, entry);
                    s[r * n_ports + 0] = t;
                    s[0 * n_ports + r] = t;
                }
            }
        }
    });
    return SParamEnsemble(n_ports, sweep, sc.n_steps, std::move(m));
}

}  // namespace

SParamEnsemble synth_rc_ensemble(double tx_eff, double rx_eff, const RcScenario& sc, const FrequencySweep& sweep,
                                 unsigned workers) {
    RcScenario two = sc;
    if (two.unstirred_reflection.size() > 2) two.unstirred_reflection.resize(2);
    return generate(2, tx_eff, {rx_eff}, two, sweep, workers);
}

SParamEnsemble synth_rc_ensemble_mimo(double tx_eff, double rx1_eff, double rx2_eff, const RcScenario& sc,
                                      const FrequencySweep& sweep, unsigned workers) {
    return generate(3, tx_eff, {rx1_eff, rx2_eff}, sc, sweep, workers);
}

}  // namespace chambereff::sim
