#pragma once

#include <complex>
#include <vector>

#include "tangentscope/approach_curve.hpp"
#include "tangentscope/arc_set.hpp"
#include "tangentscope/csv_io.hpp"
#include "tangentscope/diagnostics.hpp"
#include "tangentscope/kernels.hpp"

namespace tangentscope {

struct CombSpec {
    enum class Phase { even_centers, odd_centers };
    long long n = 1;
    double delta = 0.25; // total measure is 2*pi*delta
    Phase phase = Phase::even_centers;
};

/// n arcs of length 2*pi*delta/n: even phase centers 2*pi*j/n, odd phase
/// centers (2j+1)*pi/n. Rejects delta outside (0, 1/2).
ArcSet comb_set(const CombSpec& spec);

/// Membership without materializing the arcs (phase arithmetic).
bool comb_contains(long long n, double delta, CombSpec::Phase phase, double x);

/// Deterministic sample points on the circle (seeded, platform-independent).
std::vector<double> sample_points(int count, unsigned long long seed);

struct WitnessPoint {
    double x = 0.0;
    long long j0 = 0;
    double eps_r1 = 0.0; // lambda(r') = 2*pi*j0/n_k - x
    double eps_r2 = 0.0; // lambda(r'') = lambda(r') + pi/n_k (6pi-combs only)
};

// ---------------------------------------------------------------------------
// Littlewood-type set (divergence of Phi_r(x + lambda(r), 1_E))

struct LittlewoodStage {
    double delta_k = 0.0;
    double eps_u = 0.0, eps_v = 0.0;
    long long n_k = 0;
    double mass = 0.0; // int_{-delta_k lambda(u_k)}^{+} phi_{u_k}
};

struct LittlewoodBuild {
    int depth = 0;
    double pi_star_estimate = 0.0;
    std::vector<LittlewoodStage> stages;
    ArcSet set; // E_K
    std::vector<std::vector<WitnessPoint>> witnesses; // [stage][sample]
};

/// Stage schedule: delta_k = 2^-(k+6); u_k by eps-halving scan from 2^-k
/// until the per-stage mass condition holds (hard stop eps = 2^-40);
/// refuses curves whose Pi^* estimate is <= 1/2.
LittlewoodBuild littlewood_set(const Kernel& k, const ApproachCurve& curve, int K,
                               int sample_count = 256, unsigned long long seed = 2025);

/// Phi_{r'}(x + lambda(r'), 1_E) at each witness, [sample][stage].
std::vector<std::vector<double>> littlewood_witness_values(const Kernel& k,
                                                           const ApproachCurve& curve,
                                                           const LittlewoodBuild& build);

/// Per-sample max - min of the witness values across stages.
std::vector<double> littlewood_oscillation(const Kernel& k, const ApproachCurve& curve,
                                           const LittlewoodBuild& build);

// ---------------------------------------------------------------------------
// Alternating set (L-infinity divergence)

struct AlternatingStage {
    double delta_k = 0.0;
    double eps_k = 0.0;
    long long n_k = 0;
    double mass = 0.0;
    double sup_norm = 0.0;
};

struct AlternatingBuild {
    int depth = 0;
    double pi_infty_estimate = 0.0;
    std::vector<AlternatingStage> stages;
    std::vector<ArcSet> partial; // E_1 .. E_K (the last one is `set`)
    ArcSet set;                  // E_K
};

AlternatingBuild alternating_set(const Kernel& k, const ApproachCurve& curve, int K);

/// OSC of Phi_{r_k}(theta, 1_E) over theta in the lambda(r_k) window around
/// each sample (tooth/gap-aligned candidate points), [stage][sample].
/// Values are certified lower bounds: stage k evaluates against E_k exactly
/// and subtracts ||phi_{r_k}||_inf * |E_K \triangle E_k|, the later-stage
/// perturbation that the Eq 1.3-16 discipline controls.
std::vector<std::vector<double>> alternating_oscillation(const Kernel& k,
                                                         const ApproachCurve& curve,
                                                         const AlternatingBuild& build,
                                                         const std::vector<double>& samples);

// ---------------------------------------------------------------------------
// L1 divergent function

struct L1DivStage {
    double eps_k = 0.0;
    double delta_r = 0.0;        // tooth half-width
    long long n_k = 0;           // teeth count n(r_k)
    double x_r = 0.0;            // peak location of |phi_{r_k}|
    double delta_measure = 0.0;  // |Delta_{r_k}| = 2 delta_r n_k
    double witness_bound = 0.0;  // (3/16) lambda(r_k) ||phi_{r_k}||_inf
};

struct L1DivergentBuild {
    int depth = 0;
    std::vector<L1DivStage> stages;
    std::vector<std::vector<csv::StepPiece>> stage_pieces; // f_{r_k} (unit L1 mass)
    std::vector<csv::StepPiece> f;                         // sum 2^-k f_{r_k}
    double l1_norm = 0.0;                                  // 1 - 2^-K for nonneg kernels
};

L1DivergentBuild l1_divergent_function(const Kernel& k, const ApproachCurve& curve, int K,
                                       int N);

/// ||f||_1 by exact segment sweep over the (possibly overlapping) pieces.
double step_l1_norm(const std::vector<csv::StepPiece>& pieces);

/// Witness values per [stage][sample]: Phi_{r_k} at the construction's own
/// witness point, against stage-k mass only (part = true) or the full f.
std::vector<std::vector<double>> l1div_witness_values(const Kernel& k,
                                                      const ApproachCurve& curve,
                                                      const L1DivergentBuild& build,
                                                      const std::vector<double>& samples,
                                                      bool full_f);

// ---------------------------------------------------------------------------
// Blaschke products

/// b(n, delta, e^{ix}) = (z^n - rho^n)/(rho^n z^n - 1), rho = e^{-sqrt(delta)/n}.
std::complex<double> finite_blaschke(long long n, double delta, double x);

/// (max |b+1| over grid points in U(n, delta),
///  max |b-1| over grid points outside U(n, delta^{1/4})).
std::pair<double, double> blaschke_bounds_check(long long n, double delta, int N);

struct BlaschkeStage {
    double delta_k = 0.0;
    double eps_u = 0.0, eps_v = 0.0;
    long long n_k = 0;
    double mass = 0.0;
    double omega_measured = 0.0; // grid modulus of continuity of B_{k-1}
    double on_comb_max = 0.0;    // sampled max |b_k + 1| on U(n_k, 6 delta_k)
    double off_comb_max = 0.0;   // sampled max |b_k - 1| off U(n_k, delta_k^{1/4})
};

struct BlaschkeBuild {
    int depth = 0;
    double pi_star_estimate = 0.0;
    std::vector<BlaschkeStage> stages;
    std::vector<std::vector<WitnessPoint>> witnesses; // [stage][sample]

    std::complex<double> eval(double x) const;           // B_K(e^{ix})
    std::complex<double> eval_partial(double x, int upto) const; // B_upto
};

/// Requires the Pi^* estimate >= 0.95 (refuses otherwise, exit-2 semantics);
/// grid N is used for the measured modulus of continuity and the off-comb
/// sampling.
BlaschkeBuild blaschke_product(const Kernel& k, const ApproachCurve& curve, int K, int N,
                               int sample_count = 128, unsigned long long seed = 2025);

/// Phi_r(y, B) by kernel-CDF-warped midpoint quadrature (M nodes); needs a
/// closed-form kernel integral.
std::complex<double> convolve_point_blaschke(const Kernel& k, RadialParam r,
                                             const BlaschkeBuild& build, double y,
                                             int M = 2048);

/// |Phi_{r'}(x+lambda(r'), B) - Phi_{r''}(x+lambda(r''), B)| per sample at a
/// given stage (0-based).
std::vector<double> blaschke_witness_gaps(const Kernel& k, const ApproachCurve& curve,
                                          const BlaschkeBuild& build, int stage);

} // namespace tangentscope
