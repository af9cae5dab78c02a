#include "nlpot/profile.hpp"

#include <algorithm>
#include <cmath>

#include "nlpot/error.hpp"

namespace nlpot {

double RadialProfile::max_value() const noexcept {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

void RadialProfile::validate() const {
    if (radii.size() != values.size()) throw InvariantError("profile: radii/values size mismatch");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < 0.0 || (i > 0 && !(radii[i] > radii[i - 1])))
            throw InvariantError("profile: mesh must be nonnegative and strictly increasing");
        if (!(values[i] >= 0.0)) throw InvariantError("profile: values must be nonnegative");
    }
}

std::vector<double> radial_mesh(double r_min, double r_max, int count, bool include_origin) {
    if (!(r_min > 0.0) || !(r_max > r_min) || count < 2)
        throw DomainError("radial_mesh: need 0 < r_min < r_max and count >= 2");
    std::vector<double> mesh;
    mesh.reserve(count + 1);
    if (include_origin) mesh.push_back(0.0);
    const double step = std::log(r_max / r_min) / (count - 1);
    for (int i = 0; i < count; ++i) mesh.push_back(i + 1 == count ? r_max : r_min * std::exp(step * i));
    return mesh;
}

} // namespace nlpot
