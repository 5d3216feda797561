#include <chambereff/types.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chambereff {

double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }

double linear_power_to_db(double linear) { return 10.0 * std::log10(linear); }

// ------------------------------------------------------------------------------------------------

FrequencySweep::FrequencySweep(std::vector<double> points_hz) : points_(std::move(points_hz)) {
    if (points_.empty()) throw InvalidArgument("frequency sweep is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || points_[i] <= 0.0)
            throw InvalidArgument("frequency point " + std::to_string(i) + " is not a positive finite value");
        if (i > 0 && !(points_[i] > points_[i - 1]))
            throw InvalidArgument("frequency sweep is not strictly increasing at index " + std::to_string(i));
    }
}

FrequencySweep FrequencySweep::linear(double start_hz, double stop_hz, std::size_t n) {
    if (n == 0) throw InvalidArgument("frequency sweep needs at least one point");
    std::vector<double> pts(n);
    if (n == 1) {
        pts[0] = start_hz;
    } else {
        const double step = (stop_hz - start_hz) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) pts[i] = start_hz + step * static_cast<double>(i);
        pts[n - 1] = stop_hz;
    }
    return FrequencySweep(std::move(pts));
}

FrequencySweep FrequencySweep::default_sweep() { return linear(1e9, 3e9, 201); }

FrequencySweep align_sweeps(const FrequencySweep& a, const FrequencySweep& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
        if (std::abs(a[i] - b[i]) > kSweepRelTolerance * scale) throw SweepMismatch(i);
    }
    if (a.size() != b.size()) throw SweepMismatch(n, "sweep lengths differ");
    return a;
}

Spectrum::Spectrum(FrequencySweep s, std::vector<double> v) : sweep(std::move(s)), values(std::move(v)) {
    if (values.size() != sweep.size())
        throw InvalidArgument("spectrum has " + std::to_string(values.size()) + " values for " +
                              std::to_string(sweep.size()) + " frequencies");
}

// ------------------------------------------------------------------------------------------------

namespace {

std::size_t divisions(double span, double step, const char* axis) {
    if (!std::isfinite(step) || step <= 0.0) throw InvalidArgument(std::string(axis) + " step must be positive");
    const double ratio = span / step;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, n))
        throw InvalidArgument(std::string(axis) + " step does not evenly divide " + std::to_string(span));
    return static_cast<std::size_t>(n);
}

}  // namespace

SphericalGrid::SphericalGrid(double theta_step_deg, double phi_step_deg)
    : theta_step_(theta_step_deg), phi_step_(phi_step_deg) {
    n_theta_ = divisions(180.0, theta_step_deg, "theta") + 1;
    n_phi_ = divisions(360.0, phi_step_deg, "phi");
}

// ------------------------------------------------------------------------------------------------

std::vector<PatternViolation> validate_pattern(const PatternData& data) {
    std::vector<PatternViolation> out;
    const std::size_t nt = data.grid.theta_samples();
    const std::size_t np = data.grid.phi_samples();
    const std::size_t expected = data.frequencies.size() * nt * np;

    auto check_shape = [&](const std::vector<double>& v, const char* pol) {
        if (v.size() == expected) return true;
        std::ostringstream msg;
        msg << pol << " intensity has " << v.size() << " samples, expected " << expected;
        out.push_back({PatternViolation::Kind::ShapeMismatch, 0, 0, 0, pol, msg.str()});
        return false;
    };
    const bool vp_ok = check_shape(data.intensity_vp, "VP");
    const bool hp_ok = check_shape(data.intensity_hp, "HP");

    auto scan = [&](const std::vector<double>& v, const char* pol) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double x = v[k];
            if (std::isfinite(x) && x >= 0.0) continue;
            const std::size_t f = k / (nt * np);
            const std::size_t it = (k / np) % nt;
            const std::size_t ip = k % np;
            std::ostringstream msg;
            msg << pol << " intensity " << x << " at freq " << data.frequencies[f] << " Hz, theta "
                << data.grid.theta_deg(it) << " deg, phi " << data.grid.phi_deg(ip) << " deg";
            const auto kind = std::isfinite(x) ? PatternViolation::Kind::Negative : PatternViolation::Kind::NonFinite;
            out.push_back({kind, f, it, ip, pol, msg.str()});
        }
    };
    if (vp_ok) scan(data.intensity_vp, "VP");
    if (hp_ok) scan(data.intensity_hp, "HP");
    return out;
}

RadiationPattern::RadiationPattern(PatternData data) : data_(std::move(data)) {
    const auto report = validate_pattern(data_);
    if (!report.empty()) {
        std::string msg = "invalid radiation pattern: " + report.front().message;
        if (report.size() > 1) msg += " (+" + std::to_string(report.size() - 1) + " more)";
        throw InvalidPattern(msg);
    }
}

// ------------------------------------------------------------------------------------------------

SParamEnsemble::SParamEnsemble(std::size_t n_ports, FrequencySweep frequencies, std::size_t n_steps,
                               std::vector<cdouble> matrices)
    : n_ports_(n_ports), frequencies_(std::move(frequencies)), n_steps_(n_steps), matrices_(std::move(matrices)) {
    if (n_ports_ == 0) throw InvalidArgument("ensemble needs at least one port");
    if (n_steps_ == 0) throw InvalidArgument("ensemble needs at least one paddle step");
    const std::size_t expected = n_steps_ * frequencies_.size() * n_ports_ * n_ports_;
    if (matrices_.size() != expected)
        throw InvalidArgument("ensemble has " + std::to_string(matrices_.size()) + " entries, expected " +
                              std::to_string(expected));
    for (std::size_t k = 0; k < matrices_.size(); ++k) {
        if (!std::isfinite(matrices_[k].real()) || !std::isfinite(matrices_[k].imag()))
            throw InvalidArgument("ensemble entry " + std::to_string(k) + " is not finite");
    }
}

std::size_t SParamEnsemble::count_non_passive() const {
    return static_cast<std::size_t>(
        std::count_if(matrices_.begin(), matrices_.end(), [](const cdouble& s) { return std::abs(s) > 1.0; }));
}

// ------------------------------------------------------------------------------------------------

std::string to_string(Method m) { return m == Method::AC ? "AC" : "RC"; }

std::string to_string(Port p) {
    switch (p) {
        case Port::Ch1: return "ch1";
        case Port::Ch2: return "ch2";
        case Port::Total: return "total";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    if (s == "AC") return Method::AC;
    if (s == "RC") return Method::RC;
    throw InvalidArgument("unknown method '" + s + "'");
}

Port parse_port(const std::string& s) {
    if (s == "ch1") return Port::Ch1;
    if (s == "ch2") return Port::Ch2;
    if (s == "total") return Port::Total;
    throw InvalidArgument("unknown port '" + s + "'");
}

EfficiencyResult::EfficiencyResult(FrequencySweep frequencies, std::vector<double> eta, Method method, Port port,
                                   std::vector<FlagSet> extra_flags)
    : frequencies_(std::move(frequencies)), eta_(std::move(eta)), method_(method), port_(port),
      flags_(std::move(extra_flags)) {
    if (eta_.size() != frequencies_.size()) throw InvalidArgument("efficiency/frequency length mismatch");
    if (flags_.empty()) flags_.resize(eta_.size());
    if (flags_.size() != eta_.size()) throw InvalidArgument("flag/frequency length mismatch");
    for (std::size_t i = 0; i < eta_.size(); ++i) {
        if (!std::isfinite(eta_[i]) || eta_[i] < 0.0)
            throw InvalidArgument("efficiency at index " + std::to_string(i) + " is not finite and non-negative");
        if (eta_[i] > 1.0) flags_[i].insert(kFlagOverUnity);
    }
}

EfficiencyResult EfficiencyResult::with_flag(const std::string& flag) const {
    auto flags = flags_;
    for (auto& f : flags) f.insert(flag);
    return EfficiencyResult(frequencies_, eta_, method_, port_, std::move(flags));
}

ReferenceAntenna::ReferenceAntenna(FrequencySweep frequencies, std::optional<std::vector<double>> gain_dbi,
                                   std::optional<std::vector<double>> eta_ref)
    : frequencies_(std::move(frequencies)), gain_dbi_(std::move(gain_dbi)), eta_ref_(std::move(eta_ref)) {
    if (gain_dbi_) {
        if (gain_dbi_->size() != frequencies_.size()) throw InvalidArgument("reference gain table length mismatch");
        for (double g : *gain_dbi_)
            if (!std::isfinite(g)) throw InvalidArgument("reference gain table has a non-finite entry");
    }
    if (eta_ref_) {
        if (eta_ref_->size() != frequencies_.size())
            throw InvalidArgument("reference efficiency table length mismatch");
        for (double e : *eta_ref_)
            if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument("reference efficiency must lie in (0, 1]");
    }
    if (!gain_dbi_ && !eta_ref_) throw InvalidArgument("reference antenna has neither gain nor efficiency table");
}

const std::vector<double>& ReferenceAntenna::gain_dbi() const {
    if (!gain_dbi_) throw InvalidArgument("reference antenna has no gain table");
    return *gain_dbi_;
}

const std::vector<double>& ReferenceAntenna::eta_ref() const {
    if (!eta_ref_) throw InvalidArgument("reference antenna has no efficiency table");
    return *eta_ref_;
}

}  // namespace chambereff
