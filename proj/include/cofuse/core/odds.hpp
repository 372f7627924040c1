#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "cofuse/core/error.hpp"

namespace cofuse {

/// Largest existence probability used inside odds arithmetic; keeps r/(1-r) finite.
inline constexpr double kMaxExistence = 1.0 - 1e-9;

inline double clamp_existence(double r) { return std::clamp(r, 0.0, kMaxExistence); }

/// Odds ratio r/(1-r) of an existence probability. r = 1 maps to +infinity.
class OddsRatio {
public:
    constexpr OddsRatio() = default;
    explicit constexpr OddsRatio(double value) : value_(value) {}

    [[nodiscard]] constexpr double value() const noexcept { return value_; }
    [[nodiscard]] bool is_infinite() const noexcept { return std::isinf(value_); }

    /// Inverse map back to a probability, o/(1+o).
    [[nodiscard]] double probability() const noexcept { return is_infinite() ? 1.0 : value_ / (1.0 + value_); }

    friend constexpr auto operator<=>(const OddsRatio&, const OddsRatio&) = default;

private:
    double value_ = 0.0;
};

inline OddsRatio odds(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("odds: existence probability outside [0,1]");
    if (r == 1.0) return OddsRatio{std::numeric_limits<double>::infinity()};
    return OddsRatio{r / (1.0 - r)};
}

} // namespace cofuse
