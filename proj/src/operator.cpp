#include "nlpot/operator.hpp"

#include <cmath>
#include <string>

#include "nlpot/error.hpp"
#include "nlpot/numeric.hpp"

namespace nlpot {

void OperatorSpec::validate(int n, std::size_t grid_size) const {
    if (!(p > 1.0) || !(p < n))
        throw DomainError("operator: p = " + format_double(p) + " must satisfy 1 < p < n = " + std::to_string(n));
    if (!(alpha > 0.0) || !(alpha <= beta) || !std::isfinite(beta))
        throw InvariantError("operator: structural constants need 0 < alpha <= beta < inf");
    if (weight.empty()) {
        if (alpha > 1.0 || beta < 1.0) throw InvariantError("operator: unit weight violates alpha <= 1 <= beta");
        return;
    }
    if (grid_size != 0 && weight.size() != grid_size)
        throw InvariantError("operator: weight has " + std::to_string(weight.size()) + " samples, grid has " +
                             std::to_string(grid_size));
    for (std::size_t i = 0; i < weight.size(); ++i)
        if (!(weight[i] >= alpha) || !(weight[i] <= beta))
            throw InvariantError("operator: weight at node " + std::to_string(i) + " outside [alpha, beta]");
}

} // namespace nlpot
