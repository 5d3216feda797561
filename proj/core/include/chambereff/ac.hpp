#pragma once

// Anechoic-chamber processing: pattern integration for directivity, gain by substitution
// against a reference gain antenna, efficiency as gain over directivity.

#include <chambereff/types.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace chambereff::ac {

class Direction {
public:
    // theta in [0, 180], phi in [0, 360).
    Direction(double theta_deg, double phi_deg);

    double theta_deg() const noexcept { return theta_; }
    double phi_deg() const noexcept { return phi_; }

    // Nearest grid node as (theta index, phi index); phi wraps across the 360 seam.
    std::pair<std::size_t, std::size_t> snap(const SphericalGrid& grid) const;

    bool operator==(const Direction&) const = default;

private:
    double theta_;
    double phi_;
};

// Scalar radiation intensity per (frequency, theta, phi), same layout as RadiationPattern.
struct IntensityField {
    SphericalGrid grid;
    FrequencySweep frequencies;
    std::vector<double> values;

    double at(std::size_t f, std::size_t it, std::size_t ip) const {
        return values[(f * grid.theta_samples() + it) * grid.phi_samples() + ip];
    }
};

// Solid angle of the cell around each node. The rule does not depend on phi, so one weight is
// stored per theta ring.
class QuadratureWeights {
public:
    explicit QuadratureWeights(const SphericalGrid& grid);

    const SphericalGrid& grid() const noexcept { return grid_; }
    double at(std::size_t it, std::size_t /*ip*/) const { return ring_[it]; }
    const std::vector<double>& ring_weights() const noexcept { return ring_; }
    double sum() const;

private:
    SphericalGrid grid_;
    std::vector<double> ring_;
};

IntensityField total_intensity(const RadiationPattern& p);

QuadratureWeights build_weights(const SphericalGrid& grid);

// (1/4pi) * sum U w, one value per frequency.
std::vector<double> average_intensity(const IntensityField& u, const QuadratureWeights& w);

// D = U(d) / average; throws ZeroPattern when the average is zero.
Spectrum directivity(const RadiationPattern& p, const Direction& d);
// Directivity with a separate direction per frequency.
Spectrum directivity(const RadiationPattern& p, const std::vector<Direction>& per_freq);

// Grid node with the largest total intensity per frequency; first in scan order on ties.
std::vector<Direction> peak_direction(const RadiationPattern& p);

// G_dBi = ref gain + (P_aut - P_ref), returned as linear gain.
Spectrum gain_substitution(const Spectrum& p_aut_db, const Spectrum& p_ref_db, const ReferenceAntenna& ref);

EfficiencyResult efficiency_ac(const Spectrum& gain, const Spectrum& directivity, Port port = Port::Ch1);

// Full pattern + substitution chain with the intermediate quantities kept for auditing.
struct AcReport {
    std::vector<Direction> directions;
    std::vector<double> average_intensity;
    Spectrum directivity;
    Spectrum gain;
    EfficiencyResult result;
};

AcReport run_ac(const RadiationPattern& pattern, const Spectrum& p_aut_db, const Spectrum& p_ref_db,
                const ReferenceAntenna& ref, std::optional<Direction> fixed_direction, Port port);

}  // namespace chambereff::ac
