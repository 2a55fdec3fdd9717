#pragma once

#include <map>
#include <vector>

#include "tangentscope/approach_curve.hpp"
#include "tangentscope/arc_set.hpp"
#include "tangentscope/csv_io.hpp"
#include "tangentscope/grid_function.hpp"
#include "tangentscope/kernels.hpp"

namespace tangentscope {

/// Messages accumulated on a side channel (oversampling caps etc.).
using Diagnostics = std::vector<std::string>;

/// Circular convolution Phi_r(., f) on f's grid. The kernel side is exact:
/// per-cell closed-form integrals when available, midpoint oversampling when
/// the peak is narrower than 4 grid cells (cap 2^12, warned in `diag`),
/// plain point samples otherwise. f is held piecewise constant on centered
/// cells throughout.
GridFunction convolve(const Kernel& k, RadialParam r, const GridFunction& f,
                      Diagnostics* diag = nullptr);

/// Phi_r(y, f) at an arbitrary (off-grid) point y, same kernel-side rules.
double convolve_point(const Kernel& k, RadialParam r, const GridFunction& f, double y,
                      Diagnostics* diag = nullptr);

/// Phi_r(y, 1_A) for an exact arc union: per-arc closed-form integrals with
/// two error-bounded accelerations (far-window skip when the kernel tail
/// beyond the window carries < tail_tol mass; midpoint rule for arcs far
/// narrower than the peak).
double convolve_point_arcs(const Kernel& k, RadialParam r, const ArcSet& a, double y,
                           double tail_tol = 1e-7);

/// Same for a weighted piecewise-constant step function (disjoint pieces).
double convolve_point_step(const Kernel& k, RadialParam r,
                           const std::vector<csv::StepPiece>& pieces, double y,
                           double tail_tol = 1e-10);

/// Repeated-evaluation form of the piecewise convolutions: sorts the pieces
/// once and restricts each evaluation to the window carrying all but
/// tail_tol of the kernel mass at the supplied radial parameter.
class PieceConvolver {
public:
    PieceConvolver(Kernel k, const ArcSet& arcs, double tail_tol = 1e-7);
    PieceConvolver(Kernel k, std::vector<csv::StepPiece> pieces, double tail_tol = 1e-10);

    double eval(RadialParam r, double y) const;

private:
    Kernel kernel_;
    double tail_tol_ = 1e-7;
    std::vector<csv::StepPiece> pieces_; // sorted by arc start
    double max_len_ = 0.0;
    double max_abs_ = 0.0;
    mutable double cached_eps_ = -1.0;
    mutable double cutoff_ = pi;
    mutable double pw_ = 0.0;

    void finalize();
    void prepare(RadialParam r) const;
    double eval_range(RadialParam r, double y, std::size_t lo, std::size_t hi) const;
};

/// Hardy-Littlewood maximal function: max over centered windows of
/// half-width (k + 1/2) h, k = 0..N/2, of the window average of |f|.
/// Rolling-sum implementation; agrees with hl_maximal_brute bitwise on
/// exactly-representable inputs.
GridFunction hl_maximal(const GridFunction& f);
GridFunction hl_maximal_brute(const GridFunction& f);

struct MaximalReport {
    GridFunction values;
    std::map<double, double> level_set_measures;
    double best_constant = 0.0;
    double witness_t = 0.0;
};

/// Lambda-maximal operator: values(x) = max over r in r_set and grid y with
/// distance(x, y) < lambda(r) of |Phi_r(y, f)|; a lower bound for the sup.
MaximalReport lambda_maximal(const Kernel& k, const ApproachCurve& curve,
                             const GridFunction& f, const std::vector<RadialParam>& r_set,
                             Diagnostics* diag = nullptr);

/// measure{values > t} on the grid.
double level_set_measure(const GridFunction& values, double t);

/// Smallest C with measure{values > t} <= C t^-p ||f||_p^p over t_grid;
/// fills report.best_constant / witness_t. Rejects empty t_grid, ||f||_p = 0.
double weak_type_check(MaximalReport& report, const GridFunction& f, double p,
                       const std::vector<double>& t_grid);

/// max over grid of values(x) / (M|f|^p(x))^{1/p}, 0/0 -> 0.
double pointwise_domination_check(const Kernel& k, const ApproachCurve& curve,
                                  const GridFunction& f, double p,
                                  const std::vector<RadialParam>& r_set,
                                  Diagnostics* diag = nullptr);

/// Per-sample max - min of Phi_r(x + lambda(r), f) over r in r_window.
std::vector<double> curve_oscillation(const Kernel& k, const ApproachCurve& curve,
                                      const GridFunction& f,
                                      const std::vector<double>& x_samples,
                                      const std::vector<RadialParam>& r_window);
std::vector<double> curve_oscillation(const Kernel& k, const ApproachCurve& curve,
                                      const ArcSet& indicator_of,
                                      const std::vector<double>& x_samples,
                                      const std::vector<RadialParam>& r_window);

/// |sigma_n(x + c/n, f) - f(x)| per n (sigma_n = Fejer mean as convolution).
std::vector<double> fejer_shift_check(const GridFunction& f, double x,
                                      const std::vector<long long>& n_sequence, double c);

/// Presets for the CLI: const | step | cos | bump.
GridFunction preset_function(const std::string& name, int N);

} // namespace tangentscope
