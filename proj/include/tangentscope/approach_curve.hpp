#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tangentscope/angle.hpp"

namespace tangentscope {

/// Approach-curve family lambda(r) > 0 with lambda(r) -> 0 as r -> 1.
/// Evaluation works in eps = 1-r throughout.
struct ApproachCurve {
    enum class Kind { nontangential, log_tangential, power, table };

    Kind kind = Kind::nontangential;
    double c = 1.0;     // scale for all analytic kinds
    double p = 1.0;     // exponent of the log factor (log_tangential)
    double alpha = 1.0; // power exponent
    std::vector<std::pair<double, double>> tab; // (eps, lambda), eps decreasing

    static ApproachCurve nontangential(double c = 1.0);
    static ApproachCurve log_tangential(double c, double p);
    static ApproachCurve power(double c, double alpha);
    static ApproachCurve table(std::vector<std::pair<double, double>> entries);
    /// CLI spec: nontangential:c=1 | log:c=1,p=2 | power:c=1,alpha=0.5
    static ApproachCurve parse(const std::string& spec);

    double lambda(RadialParam r) const;

    /// Bisection for lambda(r) = target over eps in [eps_lo, eps_hi]
    /// (lambda monotone there). Throws when target is not bracketed.
    RadialParam solve_lambda(double target, double eps_lo, double eps_hi) const;

    /// lambda > 0 and decreasing to 0 along the given eps-sequence.
    bool validate(const std::vector<RadialParam>& rs) const;

    std::string describe() const;
};

} // namespace tangentscope
