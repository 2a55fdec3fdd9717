#pragma once

#include <vector>

#include "tangentscope/approach_curve.hpp"
#include "tangentscope/kernels.hpp"

namespace tangentscope {

enum class Trend { increasing, decreasing, plateau, oscillating };

const char* trend_name(Trend t);

/// Finite surrogate for a limsup/liminf along an r-sequence: tail statistics
/// are taken over the final third of the sequence.
struct LimsupEstimate {
    std::vector<double> r_eps;
    std::vector<double> samples;
    double tail_max = 0.0;
    double tail_min = 0.0;
    Trend trend = Trend::plateau;
};

LimsupEstimate make_estimate(std::vector<double> r_eps, std::vector<double> samples);
Trend classify_trend(const std::vector<double>& samples);

/// r_k = 1 - 2^-k, k = 1..kmax.
std::vector<RadialParam> default_r_sequence(int kmax = 20);
/// delta_j = 2^-j, j = 1..jmax.
std::vector<double> default_delta_sequence(int jmax = 10);

/// Exponent used where the finite surrogate must resolve the r -> 1 limit
/// beyond the everyday default (dichotomy acceptance, constructor gates).
inline constexpr int deep_rmax_exponent = 48;

/// Pi(lambda, phi): samples lambda(r) * ||phi_r||_inf.
LimsupEstimate pi_plain(const Kernel& k, const ApproachCurve& curve,
                        const std::vector<RadialParam>& rs, int N);

enum class PiMode { limsup, sup };

/// Pi_p (limsup mode) / Pi~_p (sup mode): lambda * ||phi_r||_inf * phi_*^{p-1}.
/// In sup mode the tail statistics run over the whole sequence. Rejects p < 1.
LimsupEstimate pi_p(const Kernel& k, const ApproachCurve& curve, double p,
                    const std::vector<RadialParam>& rs, int N, PiMode mode);

/// (delta, r) table of int_{-delta lambda(r)}^{delta lambda(r)} phi_r.
struct PiMatrix {
    std::vector<double> deltas;
    std::vector<double> r_eps;
    std::vector<std::vector<double>> cells; // [delta][r]
    std::vector<double> per_delta;          // tail statistic per row
    double estimate = 0.0;                  // last-delta row statistic
};

/// Pi_infty: per-delta tail_max over r; estimate from the smallest delta.
PiMatrix pi_infty(const Kernel& k, const ApproachCurve& curve,
                  const std::vector<double>& deltas, const std::vector<RadialParam>& rs);

/// Pi^*: same table, per-delta tail_min (liminf surrogate).
PiMatrix pi_star(const Kernel& k, const ApproachCurve& curve,
                 const std::vector<double>& deltas, const std::vector<RadialParam>& rs);

/// sup_r lambda(r) * ||phi_r||_q^p with q = p/(p-1), q = inf when p = 1.
LimsupEstimate carlsson_bound(const Kernel& k, const ApproachCurve& curve, double p,
                              const std::vector<RadialParam>& rs, int N);

} // namespace tangentscope
