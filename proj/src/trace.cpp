#include "nlpot/trace.hpp"

#include <algorithm>

#include "nlpot/numeric.hpp"

namespace nlpot {

bool IterationTrace::all_monotone() const noexcept {
    return std::all_of(records.begin(), records.end(), [](const IterationRecord& r) { return r.monotone; });
}

std::string IterationTrace::to_csv() const {
    std::string out = "j,sup_value,sup_ratio,monotone\n";
    for (const auto& r : records)
        out += std::to_string(r.j) + "," + format_double(r.sup_value) + "," + format_double(r.sup_ratio) + "," +
               (r.monotone ? "1" : "0") + "\n";
    return out;
}

} // namespace nlpot
