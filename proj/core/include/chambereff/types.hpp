#pragma once

// Shared domain types. Every type validates its invariants on construction and
// is immutable afterwards, so instances can be shared freely between threads.

#include <chambereff/errors.hpp>

#include <complex>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace chambereff {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;

double db_to_linear_power(double db);
double linear_power_to_db(double linear);

// ------------------------------------------------------------------------------------------------
// Frequency axis
// ------------------------------------------------------------------------------------------------

class FrequencySweep {
public:
    // Strictly increasing, all values > 0.
    explicit FrequencySweep(std::vector<double> points_hz);

    // Evenly spaced points including both end points (n >= 2), or the single start point (n == 1).
    static FrequencySweep linear(double start_hz, double stop_hz, std::size_t n);
    // 201 points spanning 1-3 GHz.
    static FrequencySweep default_sweep();

    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const noexcept { return points_; }

    bool operator==(const FrequencySweep&) const = default;

private:
    std::vector<double> points_;
};

inline constexpr double kSweepRelTolerance = 1e-9;

// Returns the common axis when a and b agree point-by-point within 1e-9 relative.
// Throws SweepMismatch carrying the first differing index (min length for unequal sizes).
FrequencySweep align_sweeps(const FrequencySweep& a, const FrequencySweep& b);

// Frequency-tagged scalar series (powers in dB, gains, directivities ...).
struct Spectrum {
    FrequencySweep sweep;
    std::vector<double> values;

    Spectrum(FrequencySweep s, std::vector<double> v);
};

// ------------------------------------------------------------------------------------------------
// Spherical scan grid
// ------------------------------------------------------------------------------------------------

// theta covers [0, 180] inclusive; phi covers [0, 360) half-open.
class SphericalGrid {
public:
    SphericalGrid(double theta_step_deg, double phi_step_deg);

    static SphericalGrid default_grid() { return SphericalGrid(5.0, 5.0); }

    double theta_step_deg() const noexcept { return theta_step_; }
    double phi_step_deg() const noexcept { return phi_step_; }
    std::size_t theta_samples() const noexcept { return n_theta_; }
    std::size_t phi_samples() const noexcept { return n_phi_; }
    std::size_t node_count() const noexcept { return n_theta_ * n_phi_; }

    double theta_deg(std::size_t i) const { return static_cast<double>(i) * theta_step_; }
    double phi_deg(std::size_t j) const { return static_cast<double>(j) * phi_step_; }

    bool operator==(const SphericalGrid& o) const noexcept {
        return n_theta_ == o.n_theta_ && n_phi_ == o.n_phi_;
    }

private:
    double theta_step_;
    double phi_step_;
    std::size_t n_theta_;
    std::size_t n_phi_;
};

// ------------------------------------------------------------------------------------------------
// Radiation pattern
// ------------------------------------------------------------------------------------------------

// Unvalidated pattern arrays as produced by parsers and generators.
// Layout of both intensity arrays: [frequency][theta][phi], row-major.
struct PatternData {
    SphericalGrid grid;
    FrequencySweep frequencies;
    std::vector<double> intensity_vp;
    std::vector<double> intensity_hp;
};

struct PatternViolation {
    enum class Kind { ShapeMismatch, NonFinite, Negative };
    Kind kind;
    std::size_t freq_index = 0;
    std::size_t theta_index = 0;
    std::size_t phi_index = 0;
    std::string polarization;  // "VP" / "HP" ("" for shape problems)
    std::string message;
};

// Side-effect free; empty result iff the data is a well-formed pattern.
std::vector<PatternViolation> validate_pattern(const PatternData& data);

class RadiationPattern {
public:
    // Throws InvalidPattern listing the first violation when validate_pattern is non-empty.
    explicit RadiationPattern(PatternData data);

    const SphericalGrid& grid() const noexcept { return data_.grid; }
    const FrequencySweep& frequencies() const noexcept { return data_.frequencies; }
    std::span<const double> intensity_vp() const noexcept { return data_.intensity_vp; }
    std::span<const double> intensity_hp() const noexcept { return data_.intensity_hp; }
    const PatternData& data() const noexcept { return data_; }

    std::size_t index(std::size_t f, std::size_t it, std::size_t ip) const noexcept {
        return (f * data_.grid.theta_samples() + it) * data_.grid.phi_samples() + ip;
    }

private:
    PatternData data_;
};

// ------------------------------------------------------------------------------------------------
// Stirred S-parameter ensemble
// ------------------------------------------------------------------------------------------------

// Scattering matrices per (paddle step, frequency). Layout [step][freq][row][col].
class SParamEnsemble {
public:
    SParamEnsemble(std::size_t n_ports, FrequencySweep frequencies, std::size_t n_steps,
                   std::vector<cdouble> matrices);

    std::size_t n_ports() const noexcept { return n_ports_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    const FrequencySweep& frequencies() const noexcept { return frequencies_; }
    std::span<const cdouble> matrices() const noexcept { return matrices_; }

    const cdouble& at(std::size_t step, std::size_t f, std::size_t row, std::size_t col) const {
        return matrices_[((step * frequencies_.size() + f) * n_ports_ + row) * n_ports_ + col];
    }

    // Number of entries with |S_ij| > 1 (permitted, measurement noise can cause it).
    std::size_t count_non_passive() const;

private:
    std::size_t n_ports_;
    FrequencySweep frequencies_;
    std::size_t n_steps_;
    std::vector<cdouble> matrices_;
};

// ------------------------------------------------------------------------------------------------
// Results and reference antennas
// ------------------------------------------------------------------------------------------------

enum class Method { AC, RC };
enum class Port { Ch1, Ch2, Total };

std::string to_string(Method m);
std::string to_string(Port p);
Method parse_method(const std::string& s);
Port parse_port(const std::string& s);

inline constexpr const char* kFlagOverUnity = "over_unity";

class EfficiencyResult {
public:
    using FlagSet = std::set<std::string>;

    // eta must be finite and >= 0. Values > 1 get the over_unity flag added.
    // extra_flags: either empty, or one set per frequency.
    EfficiencyResult(FrequencySweep frequencies, std::vector<double> eta, Method method, Port port,
                     std::vector<FlagSet> extra_flags = {});

    const FrequencySweep& frequencies() const noexcept { return frequencies_; }
    const std::vector<double>& eta() const noexcept { return eta_; }
    Method method() const noexcept { return method_; }
    Port port() const noexcept { return port_; }
    const std::vector<FlagSet>& flags() const noexcept { return flags_; }

    // Copy with the given flag added to every frequency.
    EfficiencyResult with_flag(const std::string& flag) const;

private:
    FrequencySweep frequencies_;
    std::vector<double> eta_;
    Method method_;
    Port port_;
    std::vector<FlagSet> flags_;
};

// Either table may be absent: a gain table is only needed for substitution, an efficiency table
// only for the reverberation method.
class ReferenceAntenna {
public:
    ReferenceAntenna(FrequencySweep frequencies, std::optional<std::vector<double>> gain_dbi,
                     std::optional<std::vector<double>> eta_ref);

    const FrequencySweep& frequencies() const noexcept { return frequencies_; }
    bool has_gain() const noexcept { return gain_dbi_.has_value(); }
    bool has_efficiency() const noexcept { return eta_ref_.has_value(); }
    // Throw InvalidArgument when the table is missing.
    const std::vector<double>& gain_dbi() const;
    const std::vector<double>& eta_ref() const;

private:
    FrequencySweep frequencies_;
    std::optional<std::vector<double>> gain_dbi_;
    std::optional<std::vector<double>> eta_ref_;
};

}  // namespace chambereff
