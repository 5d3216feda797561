#include <chambereff/combine.hpp>

#include <algorithm>
#include <cmath>

namespace chambereff::combine {

CombinerModel::CombinerModel(FrequencySweep frequencies, std::vector<cdouble> s_matrix)
    : frequencies_(std::move(frequencies)), s_(std::move(s_matrix)) {
    if (s_.size() != frequencies_.size() * 9)
        throw InvalidArgument("combiner model needs a 3x3 matrix per frequency");
    for (std::size_t k = 0; k < s_.size(); ++k) {
        if (!std::isfinite(s_[k].real()) || !std::isfinite(s_[k].imag()))
            throw InvalidArgument("combiner S-parameter is not finite");
        if (std::abs(s_[k]) > 1.0 + 1e-9)
            throw PassivityViolation("combiner entry S" + std::to_string((k / 3) % 3) + std::to_string(k % 3) +
                                     " exceeds unit magnitude at frequency index " + std::to_string(k / 9));
    }
}

double CombinerModel::transmission_power(std::size_t f) const { return std::norm(s(f, 0, 1)) + std::norm(s(f, 0, 2)); }

CombinerModel ideal_combiner(double insertion_loss_db, double isolation_db, const FrequencySweep& sweep) {
    if (!(insertion_loss_db >= kLosslessSplitDb - 1e-12))
        throw PassivityViolation("insertion loss " + std::to_string(insertion_loss_db) +
                                 " dB is below the 3.0103 dB limit of a matched reciprocal 3-port");
    if (std::isnan(isolation_db)) throw InvalidArgument("isolation must be a number");
    const double through = std::min(std::pow(10.0, -insertion_loss_db / 20.0), std::sqrt(0.5));
    const double leak = std::isinf(isolation_db) && isolation_db > 0 ? 0.0 : std::pow(10.0, -isolation_db / 20.0);
    std::vector<cdouble> s(sweep.size() * 9, cdouble{});
    for (std::size_t f = 0; f < sweep.size(); ++f) {
        cdouble* m = &s[f * 9];
        m[0 * 3 + 1] = m[1 * 3 + 0] = through;
        m[0 * 3 + 2] = m[2 * 3 + 0] = through;
        m[1 * 3 + 2] = m[2 * 3 + 1] = leak;
    }
    return CombinerModel(sweep, std::move(s));
}

SParamEnsemble virtual_combine(const SParamEnsemble& e, const CombinerModel& c, CombinePorts ports) {
    if (e.n_ports() != 3) throw InvalidArgument("virtual combining needs a 3-port {tx, rx1, rx2} ensemble");
    if (ports.tx > 2 || ports.rx1 > 2 || ports.rx2 > 2 || ports.tx == ports.rx1 || ports.tx == ports.rx2 ||
        ports.rx1 == ports.rx2)
        throw InvalidArgument("combine port roles must be a permutation of 0, 1, 2");
    const auto sweep = align_sweeps(e.frequencies(), c.frequencies());
    const std::size_t nf = sweep.size();
    std::vector<cdouble> out(e.n_steps() * nf * 4);
    const auto tx = ports.tx, a = ports.rx1, b = ports.rx2;
    for (std::size_t k = 0; k < e.n_steps(); ++k) {
        for (std::size_t f = 0; f < nf; ++f) {
            const cdouble s00 = c.s(f, 0, 0), s01 = c.s(f, 0, 1), s02 = c.s(f, 0, 2);
            cdouble* m = &out[(k * nf + f) * 4];
            m[0] = e.at(k, f, tx, tx);
            m[2] = s01 * e.at(k, f, a, tx) + s02 * e.at(k, f, b, tx);  // total <- tx
            m[1] = s01 * e.at(k, f, tx, a) + s02 * e.at(k, f, tx, b);  // tx <- total
            m[3] = s00 + s01 * s01 * e.at(k, f, a, a) + s02 * s02 * e.at(k, f, b, b) +
                   2.0 * s01 * s02 * e.at(k, f, a, b);
        }
    }
    return SParamEnsemble(2, sweep, e.n_steps(), std::move(out));
}

std::vector<double> de_embed_factor(const CombinerModel& c) {
    std::vector<double> out(c.frequencies().size());
    for (std::size_t f = 0; f < out.size(); ++f) {
        const double t = c.transmission_power(f);
        if (!(t > 0.0)) throw ZeroTransmission("combiner has no transmission to the sum port");
        out[f] = 1.0 / t;
    }
    return out;
}

}  // namespace chambereff::combine
