#include "tangentscope/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tangentscope {

const char* trend_name(Trend t) {
    switch (t) {
        case Trend::increasing: return "increasing";
        case Trend::decreasing: return "decreasing";
        case Trend::plateau: return "plateau";
        case Trend::oscillating: return "oscillating";
    }
    return "?";
}

Trend classify_trend(const std::vector<double>& s) {
    const std::size_t n = s.size();
    if (n < 2) return Trend::plateau;
    const std::size_t third = std::max<std::size_t>(1, (n + 2) / 3);
    auto mean = [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += s[i];
        return acc / static_cast<double>(hi - lo);
    };
    double tmax = *std::max_element(s.end() - third, s.end());
    double tmin = *std::min_element(s.end() - third, s.end());
    double scale = std::max({std::fabs(tmax), std::fabs(tmin), 1e-300});
    if ((tmax - tmin) / scale <= 0.25) return Trend::plateau;
    double head = mean(0, third);
    double mid = mean(third, n - third > third ? n - third : third + 1);
    double tail = mean(n - third, n);
    if (tail > mid * 1.05 && mid > head * 1.05) return Trend::increasing;
    if (tail < mid / 1.05 && mid < head / 1.05) return Trend::decreasing;
    return Trend::oscillating;
}

LimsupEstimate make_estimate(std::vector<double> r_eps, std::vector<double> samples) {
    LimsupEstimate e;
    e.r_eps = std::move(r_eps);
    e.samples = std::move(samples);
    if (!e.samples.empty()) {
        std::size_t third = std::max<std::size_t>(1, (e.samples.size() + 2) / 3);
        e.tail_max = *std::max_element(e.samples.end() - third, e.samples.end());
        e.tail_min = *std::min_element(e.samples.end() - third, e.samples.end());
        e.trend = classify_trend(e.samples);
    }
    return e;
}

std::vector<RadialParam> default_r_sequence(int kmax) {
    std::vector<RadialParam> rs;
    for (int k = 1; k <= kmax; ++k) rs.push_back(RadialParam::from_eps(std::ldexp(1.0, -k)));
    return rs;
}

std::vector<double> default_delta_sequence(int jmax) {
    std::vector<double> ds;
    for (int j = 1; j <= jmax; ++j) ds.push_back(std::ldexp(1.0, -j));
    return ds;
}

namespace {

double grid_sup_norm(const Kernel& k, RadialParam r, int N) {
    double m = 0.0;
    for (int j = 0; j < N; ++j)
        m = std::max(m, std::fabs(k.evaluate(r, two_pi * j / N)));
    return m;
}

} // namespace

LimsupEstimate pi_plain(const Kernel& k, const ApproachCurve& curve,
                        const std::vector<RadialParam>& rs, int N) {
    std::vector<double> eps, vals;
    for (RadialParam r : rs) {
        eps.push_back(r.eps);
        vals.push_back(curve.lambda(r) * grid_sup_norm(k, r, N));
    }
    return make_estimate(std::move(eps), std::move(vals));
}

LimsupEstimate pi_p(const Kernel& k, const ApproachCurve& curve, double p,
                    const std::vector<RadialParam>& rs, int N, PiMode mode) {
    if (p < 1.0) throw std::invalid_argument("pi_p requires p >= 1");
    std::vector<double> eps, vals;
    for (RadialParam r : rs) {
        KernelStats st = kernel_stats(k, r, N);
        eps.push_back(r.eps);
        vals.push_back(curve.lambda(r) * st.sup_norm * std::pow(st.phi_star, p - 1.0));
    }
    LimsupEstimate e = make_estimate(std::move(eps), std::move(vals));
    if (mode == PiMode::sup && !e.samples.empty()) {
        e.tail_max = *std::max_element(e.samples.begin(), e.samples.end());
        e.tail_min = *std::min_element(e.samples.begin(), e.samples.end());
    }
    return e;
}

namespace {

PiMatrix pi_table(const Kernel& k, const ApproachCurve& curve, const std::vector<double>& deltas,
                  const std::vector<RadialParam>& rs, bool take_min) {
    PiMatrix m;
    m.deltas = deltas;
    for (RadialParam r : rs) m.r_eps.push_back(r.eps);
    m.cells.assign(deltas.size(), std::vector<double>(rs.size(), 0.0));
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        for (std::size_t i = 0; i < rs.size(); ++i) {
            double bound = deltas[j] * curve.lambda(rs[i]);
            m.cells[j][i] = k.integral(rs[i], -bound, bound);
        }
        std::size_t third = std::max<std::size_t>(1, (rs.size() + 2) / 3);
        const auto& row = m.cells[j];
        double stat = take_min ? *std::min_element(row.end() - third, row.end())
                               : *std::max_element(row.end() - third, row.end());
        m.per_delta.push_back(stat);
    }
    m.estimate = m.per_delta.empty() ? 0.0 : m.per_delta.back();
    return m;
}

} // namespace

PiMatrix pi_infty(const Kernel& k, const ApproachCurve& curve, const std::vector<double>& deltas,
                  const std::vector<RadialParam>& rs) {
    return pi_table(k, curve, deltas, rs, /*take_min=*/false);
}

PiMatrix pi_star(const Kernel& k, const ApproachCurve& curve, const std::vector<double>& deltas,
                 const std::vector<RadialParam>& rs) {
    return pi_table(k, curve, deltas, rs, /*take_min=*/true);
}

LimsupEstimate carlsson_bound(const Kernel& k, const ApproachCurve& curve, double p,
                              const std::vector<RadialParam>& rs, int N) {
    if (p < 1.0) throw std::invalid_argument("carlsson_bound requires p >= 1");
    double q = p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
    std::vector<double> eps, vals;
    for (RadialParam r : rs) {
        eps.push_back(r.eps);
        vals.push_back(curve.lambda(r) * std::pow(kernel_lq_norm(k, r, N, q), p));
    }
    LimsupEstimate e = make_estimate(std::move(eps), std::move(vals));
    if (!e.samples.empty()) {
        e.tail_max = *std::max_element(e.samples.begin(), e.samples.end());
        e.tail_min = *std::min_element(e.samples.begin(), e.samples.end());
    }
    return e;
}

} // namespace tangentscope
