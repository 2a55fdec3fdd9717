#pragma once

#include <optional>
#include <vector>

#include "tangentscope/grid_function.hpp"
#include "tangentscope/kernels.hpp"

namespace tangentscope {

/// Point mass on the circle.
struct Atom {
    double position = 0.0; // radians, reduced on construction
    double mass = 0.0;
};

/// Finite signed measure: exact atoms plus an optional absolutely continuous
/// part given by a grid density. Atoms are never smeared onto the grid.
struct SignedMeasure {
    std::vector<Atom> atoms;
    std::optional<GridFunction> density;

    double total_variation() const;
};

/// Phi_r(x, dmu) = sum_atoms mass * phi_r(x - pos) + int phi_r(x-t) rho(t) dt.
double convolve_measure_point(const Kernel& k, RadialParam r, const SignedMeasure& mu,
                              double x);

} // namespace tangentscope
