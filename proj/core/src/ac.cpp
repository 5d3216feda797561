#include <chambereff/ac.hpp>

#include <algorithm>
#include <cmath>

namespace chambereff::ac {

Direction::Direction(double theta_deg, double phi_deg) : theta_(theta_deg), phi_(phi_deg) {
    if (!std::isfinite(theta_deg) || theta_deg < 0.0 || theta_deg > 180.0)
        throw InvalidArgument("direction theta must lie in [0, 180] degrees");
    if (!std::isfinite(phi_deg) || phi_deg < 0.0 || phi_deg >= 360.0)
        throw InvalidArgument("direction phi must lie in [0, 360) degrees");
}

std::pair<std::size_t, std::size_t> Direction::snap(const SphericalGrid& grid) const {
    const auto it = static_cast<std::size_t>(std::lround(theta_ / grid.theta_step_deg()));
    const auto ip = static_cast<std::size_t>(std::lround(phi_ / grid.phi_step_deg())) % grid.phi_samples();
    return {std::min(it, grid.theta_samples() - 1), ip};
}

// ------------------------------------------------------------------------------------------------

QuadratureWeights::QuadratureWeights(const SphericalGrid& grid) : grid_(grid), ring_(grid.theta_samples()) {
    const double dtheta = grid.theta_step_deg() * kDegToRad;
    const double dphi = grid.phi_step_deg() * kDegToRad;
    for (std::size_t i = 0; i < ring_.size(); ++i) {
        const double center = static_cast<double>(i) * dtheta;
        const double lo = std::max(center - 0.5 * dtheta, 0.0);
        const double hi = std::min(center + 0.5 * dtheta, kPi);
        // The first and last cells are polar caps.
        const double cos_lo = i == 0 ? 1.0 : std::cos(lo);
        const double cos_hi = i + 1 == ring_.size() ? -1.0 : std::cos(hi);
        ring_[i] = dphi * (cos_lo - cos_hi);
    }
}

double QuadratureWeights::sum() const {
    double s = 0.0;
    for (double w : ring_) s += w;
    return s * static_cast<double>(grid_.phi_samples());
}

QuadratureWeights build_weights(const SphericalGrid& grid) { return QuadratureWeights(grid); }

IntensityField total_intensity(const RadiationPattern& p) {
    const auto vp = p.intensity_vp();
    const auto hp = p.intensity_hp();
    std::vector<double> u(vp.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = vp[k] + hp[k];
    return {p.grid(), p.frequencies(), std::move(u)};
}

std::vector<double> average_intensity(const IntensityField& u, const QuadratureWeights& w) {
    if (!(u.grid == w.grid())) throw GridMismatch("intensity field and quadrature weights use different grids");
    const std::size_t nt = u.grid.theta_samples();
    const std::size_t np = u.grid.phi_samples();
    std::vector<double> out(u.frequencies.size());
    for (std::size_t f = 0; f < out.size(); ++f) {
        double acc = 0.0;
        for (std::size_t it = 0; it < nt; ++it) {
            double ring = 0.0;
            for (std::size_t ip = 0; ip < np; ++ip) ring += u.at(f, it, ip);
            acc += ring * w.at(it, 0);
        }
        out[f] = acc / (4.0 * kPi);
    }
    return out;
}

namespace {

Spectrum directivity_from_field(const IntensityField& u, const std::vector<double>& avg,
                                const std::vector<Direction>& dirs) {
    std::vector<double> d(avg.size());
    for (std::size_t f = 0; f < avg.size(); ++f) {
        if (!(avg[f] > 0.0))
            throw ZeroPattern("radiation pattern is identically zero at " + std::to_string(u.frequencies[f]) + " Hz");
        const auto [it, ip] = dirs[f].snap(u.grid);
        d[f] = u.at(f, it, ip) / avg[f];
    }
    return Spectrum(u.frequencies, std::move(d));
}

}  // namespace

Spectrum directivity(const RadiationPattern& p, const Direction& d) {
    return directivity(p, std::vector<Direction>(p.frequencies().size(), d));
}

Spectrum directivity(const RadiationPattern& p, const std::vector<Direction>& per_freq) {
    if (per_freq.size() != p.frequencies().size())
        throw InvalidArgument("need one direction per frequency");
    const auto u = total_intensity(p);
    return directivity_from_field(u, average_intensity(u, build_weights(p.grid())), per_freq);
}

std::vector<Direction> peak_direction(const RadiationPattern& p) {
    const auto u = total_intensity(p);
    const std::size_t nt = p.grid().theta_samples();
    const std::size_t np = p.grid().phi_samples();
    std::vector<Direction> out;
    out.reserve(p.frequencies().size());
    for (std::size_t f = 0; f < p.frequencies().size(); ++f) {
        std::size_t best_t = 0, best_p = 0;
        double best = u.at(f, 0, 0);
        for (std::size_t it = 0; it < nt; ++it)
            for (std::size_t ip = 0; ip < np; ++ip)
                if (u.at(f, it, ip) > best) {
                    best = u.at(f, it, ip);
                    best_t = it;
                    best_p = ip;
                }
        out.emplace_back(p.grid().theta_deg(best_t), p.grid().phi_deg(best_p));
    }
    return out;
}

Spectrum gain_substitution(const Spectrum& p_aut_db, const Spectrum& p_ref_db, const ReferenceAntenna& ref) {
    auto sweep = align_sweeps(p_aut_db.sweep, p_ref_db.sweep);
    sweep = align_sweeps(sweep, ref.frequencies());
    const auto& g_ref = ref.gain_dbi();
    std::vector<double> g(sweep.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = db_to_linear_power(g_ref[i] + (p_aut_db.values[i] - p_ref_db.values[i]));
    return Spectrum(std::move(sweep), std::move(g));
}

EfficiencyResult efficiency_ac(const Spectrum& gain, const Spectrum& directivity, Port port) {
    auto sweep = align_sweeps(gain.sweep, directivity.sweep);
    std::vector<double> eta(sweep.size());
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if (!(directivity.values[i] > 0.0))
            throw ZeroPattern("directivity is zero at " + std::to_string(sweep[i]) + " Hz");
        eta[i] = gain.values[i] / directivity.values[i];
    }
    return EfficiencyResult(std::move(sweep), std::move(eta), Method::AC, port);
}

AcReport run_ac(const RadiationPattern& pattern, const Spectrum& p_aut_db, const Spectrum& p_ref_db,
                const ReferenceAntenna& ref, std::optional<Direction> fixed_direction, Port port) {
    auto dirs = fixed_direction ? std::vector<Direction>(pattern.frequencies().size(), *fixed_direction)
                                : peak_direction(pattern);
    const auto u = total_intensity(pattern);
    auto avg = average_intensity(u, build_weights(pattern.grid()));
    auto d = directivity_from_field(u, avg, dirs);
    auto g = gain_substitution(p_aut_db, p_ref_db, ref);
    auto r = efficiency_ac(g, d, port);
    return {std::move(dirs), std::move(avg), std::move(d), std::move(g), std::move(r)};
}

}  // namespace chambereff::ac
