#pragma once

// Reverberation-chamber processing: stirred ensemble statistics, mismatch-corrected transfer
// factors for the AUT and reference runs, and the reference-antenna efficiency ratio.

#include <chambereff/types.hpp>

#include <string>
#include <vector>

namespace chambereff::rc {

enum class MismatchConvention {
    PowerAverage,     // M = <|S_ii|^2>
    CoherentAverage,  // M = |<S_ii>|^2
};

// Corrected: one Tx-port and one AUT-port mismatch factor.
// AsPrinted: the AUT-port factor squared, Tx-port reflection ignored (AUT factor only).
enum class FactorForm { Corrected, AsPrinted };

std::string to_string(MismatchConvention c);

struct StirredStats {
    std::vector<double> mean_mag2_s21;
    std::vector<double> mean_mag2_s11;  // Tx port
    std::vector<double> mean_mag2_s22;  // receive (AUT / REF) port
    std::vector<double> coh_mag2_s11;
    std::vector<double> coh_mag2_s22;
    std::size_t n_steps = 0;

    // Validates sizes, non-negativity and coherent <= power mean (within round-off, then clamped).
    StirredStats(std::vector<double> s21, std::vector<double> s11, std::vector<double> s22,
                 std::vector<double> c11, std::vector<double> c22, std::size_t steps);

    std::size_t size() const noexcept { return mean_mag2_s21.size(); }
    double tx_mismatch(std::size_t f, MismatchConvention c) const;
    double rx_mismatch(std::size_t f, MismatchConvention c) const;
};

// Mean of a sequence via pairwise summation of deviations from the first sample. The summation
// tree depends only on the length, so the result is reproducible bit for bit, and a constant
// sequence returns its value exactly.
double stirred_mean(std::span<const double> samples);
cdouble stirred_mean(std::span<const cdouble> samples);

// Statistics over the paddle-step axis; S21 is the transmission S[rx][tx].
StirredStats stirred_stats(const SParamEnsemble& e, std::size_t tx_port, std::size_t rx_port);

std::vector<double> transfer_factor_aut(const StirredStats& s, MismatchConvention conv,
                                        FactorForm form = FactorForm::Corrected);
std::vector<double> transfer_factor_ref(const StirredStats& s, MismatchConvention conv);

struct RcPorts {
    std::size_t tx = 0;
    std::size_t rx = 1;
};

struct RcOptions {
    MismatchConvention convention = MismatchConvention::PowerAverage;
    FactorForm form = FactorForm::Corrected;
    RcPorts aut_ports{};
    RcPorts ref_ports{};
    Port port = Port::Ch1;
};

inline constexpr const char* kFlagTxMismatchDiffers = "tx_mismatch_differs";
inline constexpr const char* kFlagStepRatio = "step_count_ratio";

struct RcReport {
    StirredStats aut_stats;
    StirredStats ref_stats;
    std::vector<double> f_aut;
    std::vector<double> f_ref;
    std::vector<std::string> warnings;
    EfficiencyResult result;
};

// eta_AUT = F_AUT * F_REF * eta_REF per frequency.
RcReport run_rc(const SParamEnsemble& aut, const SParamEnsemble& ref, const ReferenceAntenna& ref_ant,
                const RcOptions& opt = {});

// Same computation from precomputed statistics (used after virtual port combining).
RcReport run_rc(const StirredStats& aut, const StirredStats& ref, const FrequencySweep& sweep,
                const ReferenceAntenna& ref_ant, const RcOptions& opt = {});

EfficiencyResult efficiency_rc(const SParamEnsemble& aut, const SParamEnsemble& ref,
                               const ReferenceAntenna& ref_ant, MismatchConvention conv);

}  // namespace chambereff::rc
