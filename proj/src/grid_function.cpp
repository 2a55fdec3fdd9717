#include "tangentscope/grid_function.hpp"

#include <cmath>
#include <stdexcept>

namespace tangentscope {

GridFunction::GridFunction(int n_samples, double fill)
    : n_(n_samples), samples_(static_cast<std::size_t>(n_samples), fill) {
    if (n_samples < 2) throw std::invalid_argument("GridFunction needs N >= 2");
}

GridFunction::GridFunction(int n_samples, std::vector<double> samples)
    : n_(n_samples), samples_(std::move(samples)) {
    if (n_samples < 2) throw std::invalid_argument("GridFunction needs N >= 2");
    if (static_cast<int>(samples_.size()) != n_samples)
        throw std::invalid_argument("sample count does not match N");
}

GridFunction GridFunction::sample(int n_samples, const std::function<double(double)>& f) {
    GridFunction g(n_samples);
    for (int k = 0; k < n_samples; ++k) g[k] = f(g.theta(k));
    return g;
}

GridFunction GridFunction::indicator(int n_samples, const ArcSet& set) {
    GridFunction g(n_samples);
    for (int k = 0; k < n_samples; ++k) g[k] = set.contains(g.theta(k)) ? 1.0 : 0.0;
    return g;
}

int GridFunction::cell_index(double x) const {
    double t = Angle::reduce(x);
    int k = static_cast<int>(std::floor(t / step() + 0.5));
    return k % n_;
}

double GridFunction::value_at(double x) const { return samples_[cell_index(x)]; }

ComplexGridFunction ComplexGridFunction::sample(
    int n_samples, const std::function<std::complex<double>(double)>& f) {
    ComplexGridFunction g;
    g.n = n_samples;
    g.samples.resize(n_samples);
    for (int k = 0; k < n_samples; ++k) g.samples[k] = f(two_pi * k / n_samples);
    return g;
}

double integrate(const GridFunction& f) {
    double s = 0.0;
    for (double v : f.samples()) s += v;
    return s * f.step();
}

double lp_norm(const GridFunction& f, double p) {
    if (std::isinf(p)) return lp_norm_inf(f);
    if (p < 1.0) throw std::invalid_argument("lp_norm requires p >= 1");
    double s = 0.0;
    for (double v : f.samples()) s += std::pow(std::fabs(v), p);
    return std::pow(s * f.step(), 1.0 / p);
}

double lp_norm_inf(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.samples()) m = std::max(m, std::fabs(v));
    return m;
}

double integrate_window(const GridFunction& f, double a, double b) {
    if (b <= a) return 0.0;
    if (b - a > two_pi + 1e-12) throw std::invalid_argument("window longer than the circle");
    const double h = f.step();
    // Cell k covers [k*h - h/2, k*h + h/2) in unreduced coordinates; walk the
    // cells overlapping [a, b].
    int k_lo = static_cast<int>(std::floor((a + h / 2) / h));
    int k_hi = static_cast<int>(std::ceil((b - h / 2) / h));
    double total = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        double cell_a = k * h - h / 2;
        double cell_b = k * h + h / 2;
        double lo = std::max(a, cell_a);
        double hi = std::min(b, cell_b);
        if (hi <= lo) continue;
        int idx = ((k % f.size()) + f.size()) % f.size();
        total += (hi - lo) * f[idx];
    }
    return total;
}

double lebesgue_defect(const GridFunction& f, double x, double h) {
    if (h <= 0.0 || h > pi) throw std::invalid_argument("lebesgue_defect requires 0 < h <= pi");
    const double fx = f.value_at(x);
    GridFunction dev(f.size());
    for (int k = 0; k < f.size(); ++k) dev[k] = std::fabs(f[k] - fx);
    double t = Angle::reduce(x);
    return integrate_window(dev, t - h, t + h) / (2.0 * h);
}

} // namespace tangentscope
