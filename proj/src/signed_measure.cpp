#include "tangentscope/signed_measure.hpp"

#include <cmath>

#include "tangentscope/operators.hpp"

namespace tangentscope {

double SignedMeasure::total_variation() const {
    double tv = 0.0;
    for (const Atom& a : atoms) tv += std::fabs(a.mass);
    if (density) tv += lp_norm(*density, 1.0);
    return tv;
}

double convolve_measure_point(const Kernel& k, RadialParam r, const SignedMeasure& mu,
                              double x) {
    double acc = 0.0;
    for (const Atom& a : mu.atoms) acc += a.mass * k.evaluate(r, x - a.position);
    if (mu.density) acc += convolve_point(k, r, *mu.density, x);
    return acc;
}

} // namespace tangentscope
