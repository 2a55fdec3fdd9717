#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tangentscope/angle.hpp"
#include "tangentscope/grid_function.hpp"

namespace tangentscope {

namespace quad {
/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
double adaptive(const std::function<double(double)>& f, double a, double b,
                double tol, int max_depth = 60);
} // namespace quad

/// One-parameter kernel family r -> phi_r, normalized so that the total mass
/// over T is 1 (exactly where a closed form exists, by one-time quadrature
/// otherwise). Evaluators receive the radial parameter as eps = 1-r.
class Kernel {
public:
    std::string name;
    std::map<std::string, double> params;

    std::function<double(RadialParam, double)> evaluate;
    /// Antiderivative-based closed form for int_a^b phi_r, any a < b with
    /// b - a <= 2pi; null when the family has no closed form.
    std::function<double(RadialParam, double, double)> closed_integral;
    /// Characteristic peak width, used for oversampling decisions.
    std::function<double(RadialParam)> peak_width;

    bool has_closed_integral() const { return static_cast<bool>(closed_integral); }

    /// int_a^b phi_r: closed form when present, adaptive quadrature otherwise.
    double integral(RadialParam r, double a, double b, double tol = 1e-10) const;

    double operator()(RadialParam r, double t) const { return evaluate(r, t); }
};

Kernel poisson_kernel();
Kernel frac_poisson_kernel();
Kernel fejer_kernel();
/// Non-example phi_r == 1/(2pi): satisfies Phi1 exactly, fails Phi2.
Kernel constant_kernel();
/// Tabulated kernels: manifest CSV `r,path`, one GridFunction CSV per r.
Kernel tabulated_kernel(const std::string& manifest_path);
/// Kernel by CLI name: poisson | frac_poisson | fejer | const | table:<path>.
Kernel kernel_by_name(const std::string& spec);

/// Fejer order for the family parameterization r_n = 1 - 1/(n+1).
long long fejer_order(RadialParam r);
double fejer_value(long long n, double t);

/// The normalizing constant c(r) = int_T sqrt(P_r) (unnormalized Poisson).
double frac_poisson_c(RadialParam r);

/// Grid majorant phi*_r: value at grid point x is the running maximum of
/// |phi_r| over grid points t with |x| <= |t| <= pi.
GridFunction majorant(const Kernel& k, RadialParam r, int N);

/// L1 norm of the majorant on a peak-refined partition (geometric refinement
/// near 0 on top of the N-grid); accurate where the plain grid sum is not.
double majorant_l1_refined(const Kernel& k, RadialParam r, int N);

struct KernelStats {
    RadialParam r;
    double sup_norm = 0.0;
    double l1_norm = 0.0;
    GridFunction majorant;
    double phi_star = 0.0;     // max over grid of |x * majorant(x)|
    double majorant_l1 = 0.0;  // refined partition value

    double lq_norm(const Kernel& k, int N, double q) const;
};

KernelStats kernel_stats(const Kernel& k, RadialParam r, int N);

/// Grid Lq norm of phi_r (q = inf uses the sup).
double kernel_lq_norm(const Kernel& k, RadialParam r, int N, double q);

struct AxiomsReport {
    std::vector<double> r_eps;
    std::vector<double> phi1_deviation;       // |int phi_r - 1| per r
    double phi1_max_deviation = 0.0;
    std::vector<double> offsets;              // default pi/8, pi/4, pi/2
    std::vector<std::vector<double>> majorant_at_offsets; // [offset][r]
    std::vector<double> majorant_l1;          // per r
    double phi3_sup = 0.0;
    bool phi1_ok = false;
    bool phi2_ok = false;
    bool phi3_ok = false; // finite proxy: sup over sequence <= phi3_bound
    double phi3_bound = 0.0;
};

/// Checks Phi1-Phi3 along an r-sequence; flags violations, never throws for
/// axiom failures. phi3_bound is the finite-proxy bound the caller tests
/// against (e.g. 1.01 for Poisson).
AxiomsReport axioms_check(const Kernel& k, const std::vector<RadialParam>& rs,
                          int N, double tol, double phi3_bound = 0.0);

/// True iff grid samples are >= 0, nonincreasing on [0, pi] and
/// nondecreasing on [-pi, 0] (up to 1e-12 relative slack).
bool regularity_check(const Kernel& k, RadialParam r, int N);

} // namespace tangentscope
