#include "nlpot/numeric.hpp"

#include <cstdio>
#include <stdexcept>

namespace nlpot {

std::string ExtendedReal::to_string() const {
    return infinite_ ? std::string("inf") : format_double(value_);
}

ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.is_infinite() || b.is_infinite()) return ExtendedReal::infinite();
    return ExtendedReal(a.value() + b.value());
}

ExtendedReal operator*(double s, ExtendedReal a) {
    if (a.is_infinite()) return s == 0.0 ? ExtendedReal(0.0) : ExtendedReal::infinite();
    return ExtendedReal(s * a.value());
}

double gamma_half_integer(int k) {
    if (k <= 0) throw std::invalid_argument("gamma_half_integer: k must be positive");
    // Gamma(1) = 1, Gamma(1/2) = sqrt(pi), Gamma(x + 1) = x Gamma(x)
    double g = (k % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
    for (int j = (k % 2 == 0) ? 2 : 1; j + 2 <= k; j += 2) g *= 0.5 * j;
    return g;
}

double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma_half_integer(n);
}

double ball_volume(int n) { return sphere_area(n) / n; }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace nlpot

namespace nlpot {

const char* to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

} // namespace nlpot
