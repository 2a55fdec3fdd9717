#pragma once

#include <stdexcept>
#include <string>

namespace tangentscope {

/// Thrown when a counterexample constructor refuses to run because a
/// required region-functional condition fails (or a resource cap is hit).
/// CLI maps this to exit code 2; `condition` is machine-readable.
class construction_refused : public std::runtime_error {
public:
    construction_refused(std::string condition, double estimate, double threshold,
                         const std::string& detail)
        : std::runtime_error(detail),
          condition(std::move(condition)),
          estimate(estimate),
          threshold(threshold) {}

    std::string condition;
    double estimate = 0.0;
    double threshold = 0.0;
};

} // namespace tangentscope
