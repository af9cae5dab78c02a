#pragma once

#include <string>
#include <vector>

namespace nlpot {

/// Nonnegative function of radius sampled on an increasing mesh.
///
/// Beyond the last radius the profile continues as
/// value(r) ~ values.back() * (r / radii.back())^tail_exponent.
/// The first radius may be 0 (the origin).
struct RadialProfile {
    std::vector<double> radii;
    std::vector<double> values;
    double tail_exponent = 0.0;
    int dimension = 0;
    std::string label;

    std::size_t size() const noexcept { return radii.size(); }
    double max_value() const noexcept;
    /// Throws InvariantError unless radii increase strictly and values are >= 0.
    void validate() const;
};

/// Origin (optional) followed by `count` log-spaced radii in [r_min, r_max].
std::vector<double> radial_mesh(double r_min, double r_max, int count, bool include_origin = true);

} // namespace nlpot
