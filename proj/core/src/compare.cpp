#include <chambereff/compare.hpp>
#include <chambereff/io.hpp>

#include <algorithm>
#include <cmath>

namespace chambereff::compare {

namespace {

std::string variant_of(const EfficiencyResult& r) {
    if (r.flags().empty()) return {};
    for (const auto& f : r.flags().front())
        if (f.rfind("convention=", 0) == 0) return f;
    return {};
}

// Index pairs (i in a, j in b) of frequencies equal within the sweep tolerance.
std::vector<std::pair<std::size_t, std::size_t>> overlap(const FrequencySweep& a, const FrequencySweep& b) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double tol = kSweepRelTolerance * std::max(a[i], b[j]);
        if (std::abs(a[i] - b[j]) <= tol) {
            out.emplace_back(i, j);
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

void add_spreads(const std::vector<EfficiencyResult>& results, std::vector<PortSpread>& out) {
    for (const auto& total : results) {
        if (total.port() != Port::Total) continue;
        for (const auto& ch : results) {
            if (ch.port() == Port::Total || ch.method() != total.method() || variant_of(ch) != variant_of(total))
                continue;
            const auto pairs = overlap(ch.frequencies(), total.frequencies());
            if (pairs.empty()) continue;
            double acc = 0.0;
            for (auto [i, j] : pairs)
                acc += linear_power_to_db(ch.eta()[i]) - linear_power_to_db(total.eta()[j]);
            out.push_back({ch.method(), variant_of(ch), ch.port(), pairs.size(), acc / static_cast<double>(pairs.size())});
        }
    }
}

}  // namespace

ComparisonReport compare_results(const std::vector<EfficiencyResult>& ac, const std::vector<EfficiencyResult>& rc) {
    ComparisonReport report;
    for (const auto& a : ac) {
        for (const auto& r : rc) {
            if (a.port() != r.port()) continue;
            const auto pairs = overlap(a.frequencies(), r.frequencies());
            if (pairs.empty()) continue;
            DeltaSummary s{a.port(), variant_of(r), pairs.size(), 0.0, 0.0};
            for (auto [i, j] : pairs) {
                const double da = linear_power_to_db(a.eta()[i]);
                const double dr = linear_power_to_db(r.eta()[j]);
                // Equal values (including two zeros) compare as no difference.
                const double delta = da == dr ? 0.0 : da - dr;
                report.points.push_back({a.port(), s.variant, a.frequencies()[i], da, dr, delta});
                s.mean_abs_delta_db += std::abs(delta);
                s.max_abs_delta_db = std::max(s.max_abs_delta_db, std::abs(delta));
            }
            s.mean_abs_delta_db /= static_cast<double>(pairs.size());
            report.summaries.push_back(s);
        }
    }
    if (report.summaries.empty())
        throw NoOverlap("AC and RC results share no port with overlapping frequency points");
    add_spreads(ac, report.spreads);
    add_spreads(rc, report.spreads);
    return report;
}

std::string write_comparison(const ComparisonReport& r) {
    using io::format_number;
    std::string out(kComparisonHeader);
    out += '\n';
    for (const auto& p : r.points)
        out += "point,AC-RC," + to_string(p.port) + "," + p.variant + "," + format_number(p.freq_hz) + "," +
               format_number(p.eta_ac_db) + "," + format_number(p.eta_rc_db) + "," + format_number(p.delta_db) + "\n";
    for (const auto& s : r.summaries) {
        const std::string head = "AC-RC," + to_string(s.port) + "," + s.variant + ",,,,";
        out += "mean_abs," + head + format_number(s.mean_abs_delta_db) + "\n";
        out += "max_abs," + head + format_number(s.max_abs_delta_db) + "\n";
    }
    for (const auto& s : r.spreads)
        out += "port_minus_total," + to_string(s.method) + "," + to_string(s.port) + "," + s.variant + ",,,," +
               format_number(s.mean_delta_db) + "\n";
    return out;
}

}  // namespace chambereff::compare
