#pragma once

#include <string>
#include <vector>

namespace nlpot {

struct IterationRecord {
    int j = 0;
    double sup_value = 0.0;
    double sup_ratio = 0.0; ///< sup of the iterate over the reference (previous iterate or fixed reference)
    bool monotone = true;   ///< ordered against the previous iterate in the scheme's direction
};

/// Per-iteration record of a fixed-point or ladder scheme.
struct IterationTrace {
    std::vector<IterationRecord> records;
    bool converged = false;
    int iterations = 0;
    double final_change = 0.0;

    bool all_monotone() const noexcept;
    /// CSV with header `j,sup_value,sup_ratio,monotone`.
    std::string to_csv() const;
};

} // namespace nlpot
