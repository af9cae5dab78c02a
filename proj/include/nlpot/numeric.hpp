#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace nlpot {

/// Nonnegative real or an explicit +infinity marker.
///
/// Divergent potentials are reported through `infinite()` rather than an IEEE
/// infinity produced by overflow, so downstream code has to branch on it.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    constexpr explicit ExtendedReal(double v) : value_(v) {}

    static constexpr ExtendedReal infinite() {
        ExtendedReal r;
        r.infinite_ = true;
        return r;
    }

    constexpr bool is_finite() const noexcept { return !infinite_; }
    constexpr bool is_infinite() const noexcept { return infinite_; }

    /// Finite value; meaningless when is_infinite().
    constexpr double value() const noexcept { return value_; }

    std::string to_string() const;

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

ExtendedReal operator+(ExtendedReal a, ExtendedReal b);
ExtendedReal operator*(double s, ExtendedReal a);

/// Gamma(k/2) for positive integers k, by the half-integer recursion.
double gamma_half_integer(int k);

/// Surface area s_{n-1} = 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n.
double sphere_area(int n);

/// Volume of the unit ball in R^n.
double ball_volume(int n);

/// Fixed-point text formatting with 17 significant digits, used by every writer.
std::string format_double(double v);

} // namespace nlpot

namespace nlpot {

/// Tri-state outcome of a numerical check; inconclusive is never coerced.
enum class Verdict { holds, fails, inconclusive };

const char* to_string(Verdict v) noexcept;

} // namespace nlpot
