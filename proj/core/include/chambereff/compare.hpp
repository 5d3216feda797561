#pragma once

// AC versus RC comparison of efficiency results, per port, plus the spread between each
// channel and the combined port within one method.

#include <chambereff/types.hpp>

#include <string>
#include <vector>

namespace chambereff::compare {

struct PointDelta {
    Port port;
    std::string variant;  // RC convention tag, e.g. "convention=power" ("" when untagged)
    double freq_hz;
    double eta_ac_db;
    double eta_rc_db;
    double delta_db;  // AC minus RC
};

struct DeltaSummary {
    Port port;
    std::string variant;
    std::size_t points;
    double mean_abs_delta_db;
    double max_abs_delta_db;
};

// Mean over shared frequencies of eta(channel) - eta(total), dB, within one method/variant.
struct PortSpread {
    Method method;
    std::string variant;
    Port port;
    std::size_t points;
    double mean_delta_db;
};

struct ComparisonReport {
    std::vector<PointDelta> points;
    std::vector<DeltaSummary> summaries;
    std::vector<PortSpread> spreads;
};

// Throws NoOverlap when no AC/RC pair shares a port and at least one frequency.
ComparisonReport compare_results(const std::vector<EfficiencyResult>& ac, const std::vector<EfficiencyResult>& rc);

inline constexpr const char* kComparisonHeader = "record,method,port,variant,freq_hz,eta_ac_db,eta_rc_db,delta_db";

// record = point | mean_abs | max_abs | port_minus_total
std::string write_comparison(const ComparisonReport& r);

}  // namespace chambereff::compare
