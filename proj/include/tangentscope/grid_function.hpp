#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "tangentscope/angle.hpp"
#include "tangentscope/arc_set.hpp"

namespace tangentscope {

/// Real-valued function sampled on the uniform grid theta_k = 2*pi*k/N.
/// Sample k stands for the value on the cell [theta_k - h/2, theta_k + h/2),
/// h = 2*pi/N; integration is the midpoint rule and is exact for step
/// functions whose jumps sit on grid points.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int n_samples, double fill = 0.0);
    GridFunction(int n_samples, std::vector<double> samples);

    static GridFunction sample(int n_samples, const std::function<double(double)>& f);
    static GridFunction indicator(int n_samples, const ArcSet& set);

    int size() const { return n_; }
    double step() const { return two_pi / n_; }
    double theta(int k) const { return two_pi * k / n_; }

    double& operator[](int k) { return samples_[k]; }
    double operator[](int k) const { return samples_[k]; }
    const std::vector<double>& samples() const { return samples_; }
    std::vector<double>& samples() { return samples_; }

    /// Value at an arbitrary point: piecewise constant on centered cells.
    double value_at(double x) const;
    /// Index of the cell containing x.
    int cell_index(double x) const;

private:
    int n_ = 0;
    std::vector<double> samples_;
};

struct ComplexGridFunction {
    int n = 0;
    std::vector<std::complex<double>> samples;

    static ComplexGridFunction sample(int n_samples,
                                      const std::function<std::complex<double>(double)>& f);
    double theta(int k) const { return two_pi * k / n; }
};

/// Midpoint-rule integral (2pi/N) * sum of samples.
double integrate(const GridFunction& f);

/// Lp norm on the grid; p >= 1, with p = infinity handled by lp_norm_inf.
/// Rejects p < 1.
double lp_norm(const GridFunction& f, double p);
double lp_norm_inf(const GridFunction& f);

/// Exact integral of the piecewise-constant extension of f over [a, b]
/// (b - a <= 2pi), partial end cells clipped.
double integrate_window(const GridFunction& f, double a, double b);

/// (1/2h) * int_{x-h}^{x+h} |f(t) - f(x)| dt. Rejects h > pi or h <= 0.
double lebesgue_defect(const GridFunction& f, double x, double h);

} // namespace tangentscope
