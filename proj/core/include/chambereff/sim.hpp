#pragma once

// Synthetic chamber measurements with known ground truth.

#include <chambereff/types.hpp>

#include <cstdint>
#include <vector>

namespace chambereff::sim {

enum class AntennaKind { Isotropic, HertzianDipole, HalfWaveDipole };

std::string to_string(AntennaKind k);
AntennaKind parse_antenna_kind(const std::string& s);

// Peak directivity of the analytic pattern. The half-wave value is the numerically integrated
// constant 1.640922...
double analytic_peak_directivity(AntennaKind k);

// Normalised intensity law for the kind at polar angle theta (radians).
double analytic_intensity(AntennaKind k, double theta_rad);

class SyntheticAntenna {
public:
    SyntheticAntenna(AntennaKind kind, double true_efficiency);

    AntennaKind kind() const noexcept { return kind_; }
    double true_efficiency() const noexcept { return eta_; }
    double true_peak_directivity() const noexcept { return analytic_peak_directivity(kind_); }
    double true_gain() const noexcept { return eta_ * true_peak_directivity(); }

private:
    AntennaKind kind_;
    double eta_;
};

enum class Polarization { VP, HP };

struct SyntheticPattern {
    RadiationPattern pattern;
    Spectrum true_gain;
};

// `scale` multiplies the intensity (pattern shape, and therefore directivity, is unchanged).
SyntheticPattern synth_pattern(const SyntheticAntenna& a, const SphericalGrid& grid, const FrequencySweep& sweep,
                               Polarization pol = Polarization::VP, double scale = 1.0);

struct AcLink {
    Spectrum p_aut_db;
    Spectrum p_ref_db;
};

// Substitution pair: both antennas see the same link constant, so the power difference is
// 10 log10(true gain) - reference gain.
AcLink synth_ac_link(double true_gain_linear, const ReferenceAntenna& ref, const FrequencySweep& sweep,
                     double link_constant_db = -40.0);
AcLink synth_ac_link(const SyntheticAntenna& a, const ReferenceAntenna& ref, const FrequencySweep& sweep,
                     double link_constant_db = -40.0);

struct RcScenario {
    double chamber_gain = 0.01;
    // Free-space reflection per ensemble port (port 0 = Tx).
    std::vector<cdouble> unstirred_reflection{{0.1, 0.0}, {0.15, 0.05}};
    double stirred_reflection_var = 0.005;
    std::size_t n_steps = 1000;
    std::uint64_t seed = 1;

    void validate() const;
};

// Unit complex normal (real and imaginary parts each N(0,1)) addressed by its logical position.
cdouble keyed_complex_normal(std::uint64_t seed, std::uint32_t step, std::uint32_t freq, std::uint32_t entry);

// 2-port {tx, rx} run. S21 = sqrt(tx_eff rx_eff chamber_gain) z / sqrt(2), S12 = S21, and
// S_ii = unstirred_i + sqrt(var) z_i / sqrt(2). `workers` only changes the schedule.
SParamEnsemble synth_rc_ensemble(double tx_eff, double rx_eff, const RcScenario& sc, const FrequencySweep& sweep,
                                 unsigned workers = 1);

// 3-port {tx, rx1, rx2} run of a two-channel AUT with independent stirred transmissions per
// channel and no inter-channel coupling. Needs three unstirred reflections.
SParamEnsemble synth_rc_ensemble_mimo(double tx_eff, double rx1_eff, double rx2_eff, const RcScenario& sc,
                                      const FrequencySweep& sweep, unsigned workers = 1);

// Seed for the k-th independent run derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run);

}  // namespace chambereff::sim
