#include "nlpot/grid.hpp"

#include <cmath>

#include "nlpot/error.hpp"
#include "nlpot/numeric.hpp"

namespace nlpot {

GridGeometry::GridGeometry(int dimension, double half_width, double spacing)
    : n_(dimension), half_width_(half_width), h_(spacing) {
    if (n_ != 2 && n_ != 3) throw DomainError("grid dimension must be 2 or 3");
    if (!(h_ > 0.0) || !(half_width_ > 0.0)) throw InvariantError("grid spacing and half width must be positive");
    const double cells = 2.0 * half_width_ / h_;
    const long rounded = std::lround(cells);
    if (rounded < 2 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
        throw InvariantError("box width 2L must be a positive multiple of the spacing (at least 2 cells)");
    points_ = static_cast<int>(rounded) + 1;
    size_ = 1;
    for (int d = 0; d < n_; ++d) size_ *= static_cast<std::size_t>(points_);
}

double GridGeometry::cell_volume() const noexcept { return std::pow(h_, n_); }

std::array<int, 3> GridGeometry::multi_index(std::size_t idx) const noexcept {
    std::array<int, 3> mi{0, 0, 0};
    for (int d = n_ - 1; d >= 0; --d) {
        mi[d] = static_cast<int>(idx % points_);
        idx /= points_;
    }
    return mi;
}

std::size_t GridGeometry::linear_index(const std::array<int, 3>& mi) const noexcept {
    std::size_t idx = 0;
    for (int d = 0; d < n_; ++d) idx = idx * points_ + static_cast<std::size_t>(mi[d]);
    return idx;
}

std::array<double, 3> GridGeometry::position(std::size_t idx) const noexcept {
    const auto mi = multi_index(idx);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int d = 0; d < n_; ++d) x[d] = coordinate(mi[d]);
    return x;
}

double GridGeometry::radius(std::size_t idx) const noexcept {
    const auto x = position(idx);
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

bool GridGeometry::same_as(const GridGeometry& other) const noexcept {
    return n_ == other.n_ && points_ == other.points_ &&
           std::abs(h_ - other.h_) <= 1e-14 * h_ &&
           std::abs(half_width_ - other.half_width_) <= 1e-14 * half_width_;
}

std::string GridGeometry::describe() const {
    return "n=" + std::to_string(n_) + ",h=" + format_double(h_) + ",L=" + format_double(half_width_);
}

} // namespace nlpot
