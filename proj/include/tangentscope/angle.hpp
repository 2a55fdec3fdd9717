#pragma once

#include <cmath>
#include <numbers>

namespace tangentscope {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;

/// Canonical representative of a point on T = R/2piZ, reduced to [0, 2pi).
struct Angle {
    double value = 0.0;

    Angle() = default;
    explicit Angle(double radians) : value(reduce(radians)) {}

    static double reduce(double x) {
        double r = std::fmod(x, two_pi);
        if (r < 0.0) r += two_pi;
        // fmod can return exactly 2*pi after the correction when x is a
        // tiny negative number
        if (r >= two_pi) r = 0.0;
        return r;
    }

    /// Geodesic distance on the circle, in [0, pi].
    static double distance(double x, double y) {
        double d = std::fabs(reduce(x) - reduce(y));
        return d > pi ? two_pi - d : d;
    }

    /// Signed representative in (-pi, pi].
    static double signed_rep(double x) {
        double r = reduce(x);
        return r > pi ? r - two_pi : r;
    }
};

/// Radial parameter r in (0,1), stored as eps = 1-r so sequences like
/// r = 1 - 2^-60 keep full precision in every downstream formula.
struct RadialParam {
    double eps = 0.5;

    static RadialParam from_r(double r) { return RadialParam{1.0 - r}; }
    static RadialParam from_eps(double e) { return RadialParam{e}; }

    double r() const { return 1.0 - eps; }
    bool valid() const { return eps > 0.0 && eps < 1.0; }
};

} // namespace tangentscope
