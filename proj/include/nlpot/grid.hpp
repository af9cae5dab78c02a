#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nlpot {

/// Uniform node grid over the box [-L, L]^n, n in {2, 3}.
///
/// Node i along an axis sits at -L + i h, so both faces of the box carry nodes.
/// Linear indices are row-major with the last axis fastest.
class GridGeometry {
public:
    GridGeometry() = default;
    GridGeometry(int dimension, double half_width, double spacing);

    int dimension() const noexcept { return n_; }
    double half_width() const noexcept { return half_width_; }
    double spacing() const noexcept { return h_; }
    int points_per_axis() const noexcept { return points_; }
    std::size_t size() const noexcept { return size_; }
    double cell_volume() const noexcept;

    double coordinate(int i) const noexcept { return -half_width_ + i * h_; }
    std::array<int, 3> multi_index(std::size_t idx) const noexcept;
    std::size_t linear_index(const std::array<int, 3>& mi) const noexcept;
    /// Position of node idx; unused trailing entries are zero.
    std::array<double, 3> position(std::size_t idx) const noexcept;
    double radius(std::size_t idx) const noexcept;

    bool same_as(const GridGeometry& other) const noexcept;
    std::string describe() const;

private:
    int n_ = 0;
    double half_width_ = 0.0;
    double h_ = 0.0;
    int points_ = 0;
    std::size_t size_ = 0;
};

} // namespace nlpot
