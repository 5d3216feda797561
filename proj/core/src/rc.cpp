#include <chambereff/rc.hpp>

#include <algorithm>
#include <cmath>

namespace chambereff::rc {

std::string to_string(MismatchConvention c) {
    return c == MismatchConvention::PowerAverage ? "power" : "coherent";
}

StirredStats::StirredStats(std::vector<double> s21, std::vector<double> s11, std::vector<double> s22,
                           std::vector<double> c11, std::vector<double> c22, std::size_t steps)
    : mean_mag2_s21(std::move(s21)), mean_mag2_s11(std::move(s11)), mean_mag2_s22(std::move(s22)),
      coh_mag2_s11(std::move(c11)), coh_mag2_s22(std::move(c22)), n_steps(steps) {
    const std::size_t n = mean_mag2_s21.size();
    if (mean_mag2_s11.size() != n || mean_mag2_s22.size() != n || coh_mag2_s11.size() != n ||
        coh_mag2_s22.size() != n)
        throw InvalidArgument("stirred statistics have inconsistent lengths");
    if (n_steps == 0) throw InvalidArgument("stirred statistics need at least one paddle step");
    auto check = [](std::vector<double>& coh, const std::vector<double>& pow) {
        for (std::size_t i = 0; i < coh.size(); ++i) {
            if (!(coh[i] >= 0.0) || !(pow[i] >= 0.0) || !std::isfinite(pow[i]))
                throw InvalidArgument("stirred statistics must be finite and non-negative");
            if (coh[i] > pow[i] * (1.0 + 1e-12) + 1e-300)
                throw InvalidArgument("coherent reflection exceeds the power-averaged reflection");
            coh[i] = std::min(coh[i], pow[i]);
        }
    };
    check(coh_mag2_s11, mean_mag2_s11);
    check(coh_mag2_s22, mean_mag2_s22);
    for (double x : mean_mag2_s21)
        if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("stirred transmission must be non-negative");
}

double StirredStats::tx_mismatch(std::size_t f, MismatchConvention c) const {
    return c == MismatchConvention::PowerAverage ? mean_mag2_s11[f] : coh_mag2_s11[f];
}

double StirredStats::rx_mismatch(std::size_t f, MismatchConvention c) const {
    return c == MismatchConvention::PowerAverage ? mean_mag2_s22[f] : coh_mag2_s22[f];
}

// ------------------------------------------------------------------------------------------------

namespace {

template <typename T>
T pairwise_sum(std::span<const T> x, const T& origin) {
    if (x.size() <= 8) {
        T acc{};
        for (const auto& v : x) acc += v - origin;
        return acc;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half), origin) + pairwise_sum(x.subspan(half), origin);
}

template <typename T>
T shifted_mean(std::span<const T> x) {
    if (x.empty()) throw InvalidArgument("mean of an empty ensemble");
    const T origin = x.front();
    return origin + pairwise_sum(x, origin) / static_cast<double>(x.size());
}

}  // namespace

double stirred_mean(std::span<const double> samples) { return shifted_mean(samples); }
cdouble stirred_mean(std::span<const cdouble> samples) { return shifted_mean(samples); }

StirredStats stirred_stats(const SParamEnsemble& e, std::size_t tx_port, std::size_t rx_port) {
    if (e.n_ports() < 2) throw InvalidArgument("stirred statistics need an ensemble with at least 2 ports");
    if (tx_port >= e.n_ports() || rx_port >= e.n_ports() || tx_port == rx_port)
        throw InvalidArgument("transmit and receive ports must be distinct valid port indices");
    const std::size_t nf = e.frequencies().size();
    const std::size_t ns = e.n_steps();
    std::vector<double> s21(nf), s11(nf), s22(nf), c11(nf), c22(nf);
    std::vector<double> mag2(ns);
    std::vector<cdouble> raw(ns);

    auto power_mean = [&](std::size_t f, std::size_t row, std::size_t col) {
        for (std::size_t k = 0; k < ns; ++k) mag2[k] = std::norm(e.at(k, f, row, col));
        return stirred_mean(std::span<const double>(mag2));
    };
    auto coherent = [&](std::size_t f, std::size_t port) {
        for (std::size_t k = 0; k < ns; ++k) raw[k] = e.at(k, f, port, port);
        return std::norm(stirred_mean(std::span<const cdouble>(raw)));
    };

    for (std::size_t f = 0; f < nf; ++f) {
        s21[f] = power_mean(f, rx_port, tx_port);
        s11[f] = power_mean(f, tx_port, tx_port);
        s22[f] = power_mean(f, rx_port, rx_port);
        c11[f] = coherent(f, tx_port);
        c22[f] = coherent(f, rx_port);
    }
    return StirredStats(std::move(s21), std::move(s11), std::move(s22), std::move(c11), std::move(c22), ns);
}

// ------------------------------------------------------------------------------------------------

namespace {

double mismatch_product(const StirredStats& s, std::size_t f, MismatchConvention conv, FactorForm form) {
    const double m_tx = s.tx_mismatch(f, conv);
    const double m_rx = s.rx_mismatch(f, conv);
    if (m_tx >= 1.0 || m_rx >= 1.0)
        throw MismatchSaturated("mismatch term reaches 1 at frequency index " + std::to_string(f));
    if (form == FactorForm::AsPrinted) return (1.0 - m_rx) * (1.0 - m_rx);
    return (1.0 - m_tx) * (1.0 - m_rx);
}

}  // namespace

std::vector<double> transfer_factor_aut(const StirredStats& s, MismatchConvention conv, FactorForm form) {
    std::vector<double> out(s.size());
    for (std::size_t f = 0; f < out.size(); ++f) out[f] = s.mean_mag2_s21[f] / mismatch_product(s, f, conv, form);
    return out;
}

std::vector<double> transfer_factor_ref(const StirredStats& s, MismatchConvention conv) {
    std::vector<double> out(s.size());
    for (std::size_t f = 0; f < out.size(); ++f) {
        const double denom = mismatch_product(s, f, conv, FactorForm::Corrected);
        if (!(s.mean_mag2_s21[f] > 0.0))
            throw ZeroTransmission("reference stirred transmission is zero at frequency index " + std::to_string(f));
        out[f] = denom / s.mean_mag2_s21[f];
    }
    return out;
}

// ------------------------------------------------------------------------------------------------

RcReport run_rc(const StirredStats& aut, const StirredStats& ref, const FrequencySweep& sweep,
                const ReferenceAntenna& ref_ant, const RcOptions& opt) {
    const auto shared = align_sweeps(sweep, ref_ant.frequencies());
    if (aut.size() != shared.size() || ref.size() != shared.size())
        throw InvalidArgument("statistics do not match the frequency sweep");
    const auto& eta_ref = ref_ant.eta_ref();

    auto f_aut = transfer_factor_aut(aut, opt.convention, opt.form);
    auto f_ref = transfer_factor_ref(ref, opt.convention);

    std::vector<std::string> warnings;
    std::vector<EfficiencyResult::FlagSet> flags(shared.size());
    const double ratio = static_cast<double>(std::max(aut.n_steps, ref.n_steps)) /
                         static_cast<double>(std::min(aut.n_steps, ref.n_steps));
    if (ratio > 2.0) {
        warnings.push_back("paddle step counts differ by more than 2x (" + std::to_string(aut.n_steps) + " vs " +
                           std::to_string(ref.n_steps) + ")");
        for (auto& f : flags) f.insert(kFlagStepRatio);
    }
    std::size_t tx_differs = 0;
    for (std::size_t f = 0; f < shared.size(); ++f) {
        const double a = aut.mean_mag2_s11[f];
        const double b = ref.mean_mag2_s11[f];
        if (a == b) continue;
        const double diff_db = (a > 0.0 && b > 0.0) ? std::abs(linear_power_to_db(a / b)) : INFINITY;
        if (diff_db > 1.0) {
            flags[f].insert(kFlagTxMismatchDiffers);
            ++tx_differs;
        }
    }
    if (tx_differs > 0)
        warnings.push_back("Tx-port mismatch differs by more than 1 dB between AUT and REF runs at " +
                           std::to_string(tx_differs) + " frequencies");

    std::vector<double> eta(shared.size());
    for (std::size_t f = 0; f < eta.size(); ++f) eta[f] = f_aut[f] * f_ref[f] * eta_ref[f];
    EfficiencyResult result(shared, std::move(eta), Method::RC, opt.port, std::move(flags));
    return {aut, ref, std::move(f_aut), std::move(f_ref), std::move(warnings), std::move(result)};
}

RcReport run_rc(const SParamEnsemble& aut, const SParamEnsemble& ref, const ReferenceAntenna& ref_ant,
                const RcOptions& opt) {
    const auto sweep = align_sweeps(aut.frequencies(), ref.frequencies());
    return run_rc(stirred_stats(aut, opt.aut_ports.tx, opt.aut_ports.rx),
                  stirred_stats(ref, opt.ref_ports.tx, opt.ref_ports.rx), sweep, ref_ant, opt);
}

EfficiencyResult efficiency_rc(const SParamEnsemble& aut, const SParamEnsemble& ref,
                               const ReferenceAntenna& ref_ant, MismatchConvention conv) {
    RcOptions opt;
    opt.convention = conv;
    return run_rc(aut, ref, ref_ant, opt).result;
}

}  // namespace chambereff::rc
