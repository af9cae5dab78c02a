#pragma once

#include <cstddef>
#include <vector>

namespace nlpot {

/// Model operator A(x, xi) = w(x) |xi|^(p-2) xi.
///
/// An empty weight means w = 1. Otherwise weight holds one positive sample per grid
/// node and alpha <= w <= beta must hold at every node.
struct OperatorSpec {
    double p = 2.0;
    std::vector<double> weight;
    double alpha = 1.0;
    double beta = 1.0;

    /// Throws DomainError unless 1 < p < n, InvariantError when the weight breaks
    /// the structural bounds or has the wrong size (grid_size = 0 skips the size check).
    void validate(int n, std::size_t grid_size = 0) const;

    bool constant_weight() const noexcept { return weight.empty(); }
    double w(std::size_t node) const noexcept { return weight.empty() ? 1.0 : weight[node]; }
};

} // namespace nlpot
