#pragma once

// Two-port to one-port power combining. Port 0 of the combiner is the sum port, ports 1 and 2
// are the inputs wired to the two AUT channels.

#include <chambereff/types.hpp>

#include <vector>

namespace chambereff::combine {

inline constexpr double kLosslessSplitDb = 3.0102999566398120;  // 10 log10(2)
inline constexpr double kDefaultInsertionLossDb = 3.2;
inline constexpr double kDefaultIsolationDb = 20.0;

class CombinerModel {
public:
    // s_matrix layout [freq][row][col], 3x3 per frequency. Rejects |S_ij| > 1 + 1e-9.
    CombinerModel(FrequencySweep frequencies, std::vector<cdouble> s_matrix);

    const FrequencySweep& frequencies() const noexcept { return frequencies_; }
    const cdouble& s(std::size_t f, std::size_t row, std::size_t col) const {
        return s_[(f * 3 + row) * 3 + col];
    }
    // |S01|^2 + |S02|^2: the fraction of input power that reaches the sum port under equal
    // incoherent drive. Equals 1 for the lossless split.
    double transmission_power(std::size_t f) const;

private:
    FrequencySweep frequencies_;
    std::vector<cdouble> s_;
};

// Matched, reciprocal, symmetric combiner. Throws PassivityViolation below the 3 dB split.
CombinerModel ideal_combiner(double insertion_loss_db, double isolation_db, const FrequencySweep& sweep);

struct CombinePorts {
    std::size_t tx = 0;
    std::size_t rx1 = 1;
    std::size_t rx2 = 2;
};

// 3-port {tx, rx1, rx2} ensemble -> 2-port {tx, total} ensemble using the first-order
// signal-flow approximation:
//   S21_total = S01 S_rx1,tx + S02 S_rx2,tx
//   S22_total = S00 + S01^2 S_rx1rx1 + S02^2 S_rx2rx2 + 2 S01 S02 S_rx1rx2
SParamEnsemble virtual_combine(const SParamEnsemble& e, const CombinerModel& c, CombinePorts ports = {});

// Multiplies the efficiency by 1 / transmission_power to remove the combiner loss.
std::vector<double> de_embed_factor(const CombinerModel& c);

}  // namespace chambereff::combine
