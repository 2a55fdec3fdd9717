#include "tangentscope/operators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace tangentscope {

namespace {

constexpr int oversample_cap = 1 << 12;

int oversample_factor(const Kernel& k, RadialParam r, double h, Diagnostics* diag) {
    double pw = k.peak_width ? k.peak_width(r) : r.eps;
    if (pw >= 4.0 * h) return 1;
    double want = 8.0 * h / pw;
    int m = 2;
    while (m < want && m < oversample_cap) m *= 2;
    if (m >= oversample_cap && want > oversample_cap && diag)
        diag->push_back("oversampling capped at 2^12 for eps=" + csv::format_double(r.eps));
    return m;
}

// Integral of phi_r over one centered cell of width h at offset d*h.
// Closed form when available; m-fold midpoint rule otherwise.
std::vector<double> cell_weights(const Kernel& k, RadialParam r, int N, Diagnostics* diag) {
    const double h = two_pi / N;
    std::vector<double> w(N);
    if (k.has_closed_integral()) {
        // telescoping antiderivative differences keep total mass exact
        std::vector<double> at(N + 1);
        for (int d = 0; d <= N; ++d) at[d] = k.closed_integral(r, 0.0, d * h - h / 2);
        for (int d = 0; d < N; ++d) w[d] = at[d + 1] - at[d];
        return w;
    }
    int m = oversample_factor(k, r, h, diag);
    for (int d = 0; d < N; ++d) {
        if (m == 1) {
            w[d] = h * k.evaluate(r, d * h);
        } else {
            double acc = 0.0;
            for (int i = 0; i < m; ++i)
                acc += k.evaluate(r, d * h - h / 2 + (i + 0.5) * h / m);
            w[d] = acc * h / m;
        }
    }
    return w;
}

} // namespace

GridFunction convolve(const Kernel& k, RadialParam r, const GridFunction& f, Diagnostics* diag) {
    const int N = f.size();
    std::vector<double> w = cell_weights(k, r, N, diag);
    GridFunction out(N);
    for (int i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int j = 0; j < N; ++j) {
            int d = i - j;
            if (d < 0) d += N;
            acc += w[d] * f[j];
        }
        out[i] = acc;
    }
    return out;
}

double convolve_point(const Kernel& k, RadialParam r, const GridFunction& f, double y,
                      Diagnostics* diag) {
    const int N = f.size();
    const double h = f.step();
    double acc = 0.0;
    if (k.has_closed_integral()) {
        // integral over cell j is I(y - t_j + h/2) - I(y - t_j - h/2); the
        // boundary between cells j and j+1 is shared, evaluate once each
        std::vector<double> bound(N + 1);
        for (int j = 0; j <= N; ++j) bound[j] = k.closed_integral(r, 0.0, y - j * h + h / 2);
        for (int j = 0; j < N; ++j) acc += f[j] * (bound[j] - bound[j + 1]);
        return acc;
    }
    int m = oversample_factor(k, r, h, diag);
    for (int j = 0; j < N; ++j) {
        double cell = 0.0;
        for (int i = 0; i < m; ++i)
            cell += k.evaluate(r, y - j * h - h / 2 + (i + 0.5) * h / m);
        acc += f[j] * cell * h / m;
    }
    return acc;
}

namespace {

// Smallest half-window D with kernel mass outside [-D, D] below tol; pi when
// no closed form is available (no skipping then).
double tail_cutoff(const Kernel& k, RadialParam r, double tol) {
    if (!k.has_closed_integral()) return pi;
    double total = k.closed_integral(r, -pi, pi);
    double lo = 0.0, hi = pi;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double outside = total - k.closed_integral(r, -mid, mid);
        if (outside > tol)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

struct PieceView {
    double start, end, value;
};

double convolve_pieces(const Kernel& k, RadialParam r, const std::vector<PieceView>& pieces,
                       double y, double tail_tol) {
    double max_abs = 0.0;
    for (const auto& p : pieces) max_abs = std::max(max_abs, std::fabs(p.value));
    if (max_abs == 0.0) return 0.0;
    const double pw = k.peak_width ? k.peak_width(r) : r.eps;
    const double D = tail_cutoff(k, r, tail_tol / std::max(1.0, max_abs));
    const double yr = Angle::reduce(y);
    const bool closed = k.has_closed_integral();
    double acc = 0.0;
    for (const auto& p : pieces) {
        // distance from y to the arc (on the circle)
        double mid = 0.5 * (p.start + p.end);
        double len = p.end - p.start;
        double dist = Angle::distance(yr, mid) - 0.5 * len;
        if (dist > D) continue;
        // single-point midpoint rule only when the arc is far shorter than
        // the kernel's local variation scale (peak width near 0, distance
        // in the tail); relative error stays below ~1e-7 per arc
        bool tiny = len <= pw / 64.0 || (dist >= 8.0 * pw && len <= std::max(dist, 1e-300) / 1024.0);
        if (tiny || !closed) {
            if (tiny) {
                acc += p.value * len * k.evaluate(r, yr - mid);
            } else {
                // no closed form: subdivide against the peak width
                int m = static_cast<int>(std::ceil(len / std::max(pw / 64.0, 1e-14)));
                m = std::min(m, 1 << 16);
                double cell = len / m;
                double s = 0.0;
                for (int i = 0; i < m; ++i)
                    s += k.evaluate(r, yr - (p.start + (i + 0.5) * cell));
                acc += p.value * s * cell;
            }
        } else {
            acc += p.value * (k.closed_integral(r, 0.0, yr - p.start) -
                              k.closed_integral(r, 0.0, yr - p.end));
        }
    }
    return acc;
}

} // namespace

double convolve_point_arcs(const Kernel& k, RadialParam r, const ArcSet& a, double y,
                           double tail_tol) {
    return PieceConvolver(k, a, tail_tol).eval(r, y);
}

double convolve_point_step(const Kernel& k, RadialParam r,
                           const std::vector<csv::StepPiece>& steps, double y, double tail_tol) {
    return PieceConvolver(k, steps, tail_tol).eval(r, y);
}

PieceConvolver::PieceConvolver(Kernel k, const ArcSet& arcs, double tail_tol)
    : kernel_(std::move(k)), tail_tol_(tail_tol) {
    pieces_.reserve(arcs.size());
    for (const Arc& a : arcs.arcs()) pieces_.push_back({a, 1.0});
    finalize();
}

PieceConvolver::PieceConvolver(Kernel k, std::vector<csv::StepPiece> pieces, double tail_tol)
    : kernel_(std::move(k)), tail_tol_(tail_tol), pieces_(std::move(pieces)) {
    finalize();
}

void PieceConvolver::finalize() {
    std::sort(pieces_.begin(), pieces_.end(),
              [](const csv::StepPiece& a, const csv::StepPiece& b) {
                  return a.arc.start < b.arc.start;
              });
    for (const auto& p : pieces_) {
        max_len_ = std::max(max_len_, p.arc.length());
        max_abs_ = std::max(max_abs_, std::fabs(p.value));
    }
}

void PieceConvolver::prepare(RadialParam r) const {
    if (r.eps == cached_eps_) return;
    cached_eps_ = r.eps;
    pw_ = kernel_.peak_width ? kernel_.peak_width(r) : r.eps;
    cutoff_ =
        max_abs_ == 0.0 ? 0.0 : tail_cutoff(kernel_, r, tail_tol_ / std::max(1.0, max_abs_));
}

double PieceConvolver::eval_range(RadialParam r, double y, std::size_t lo,
                                  std::size_t hi) const {
    const bool closed = kernel_.has_closed_integral();
    double acc = 0.0;
    for (std::size_t idx = lo; idx < hi; ++idx) {
        const auto& p = pieces_[idx];
        double mid = 0.5 * (p.arc.start + p.arc.end);
        double len = p.arc.length();
        double dist = Angle::distance(y, mid) - 0.5 * len;
        if (dist > cutoff_) continue;
        bool tiny = len <= pw_ / 64.0 ||
                    (dist >= 8.0 * pw_ && len <= std::max(dist, 1e-300) / 1024.0);
        if (tiny) {
            acc += p.value * len * kernel_.evaluate(r, y - mid);
        } else if (closed) {
            acc += p.value * (kernel_.closed_integral(r, 0.0, y - p.arc.start) -
                              kernel_.closed_integral(r, 0.0, y - p.arc.end));
        } else {
            int m = static_cast<int>(std::ceil(len / std::max(pw_ / 64.0, 1e-14)));
            m = std::min(m, 1 << 16);
            double cell = len / m;
            double s = 0.0;
            for (int i = 0; i < m; ++i)
                s += kernel_.evaluate(r, y - (p.arc.start + (i + 0.5) * cell));
            acc += p.value * s * cell;
        }
    }
    return acc;
}

double PieceConvolver::eval(RadialParam r, double y) const {
    if (pieces_.empty()) return 0.0;
    prepare(r);
    double yr = Angle::reduce(y);
    // full scan when the window wraps onto itself
    if (2.0 * cutoff_ + max_len_ >= two_pi) return eval_range(r, yr, 0, pieces_.size());
    // pieces whose start lies in [yr - cutoff - max_len, yr + cutoff], with wrap
    double lo = yr - cutoff_ - max_len_;
    double hi = yr + cutoff_;
    auto start_ge = [&](double v) {
        return static_cast<std::size_t>(
            std::lower_bound(pieces_.begin(), pieces_.end(), v,
                             [](const csv::StepPiece& p, double x) { return p.arc.start < x; }) -
            pieces_.begin());
    };
    double acc = 0.0;
    auto add_window = [&](double a, double b) {
        if (b <= a) return;
        acc += eval_range(r, yr, start_ge(a), start_ge(b));
    };
    if (lo < 0.0) {
        add_window(0.0, hi);
        add_window(Angle::reduce(lo), two_pi);
    } else if (hi > two_pi) {
        add_window(lo, two_pi);
        add_window(0.0, hi - two_pi);
    } else {
        add_window(lo, hi);
    }
    // a wrapped piece stored as a leading [0, x) fragment can have its body
    // near 2pi; the fragment at index 0 is cheap to include always
    if (!pieces_.empty() && pieces_.front().arc.start == 0.0 && lo > 0.0 && hi <= two_pi)
        acc += eval_range(r, yr, 0, 1);
    return acc;
}

namespace {

// Shared window semantics: indices i-k..i+k mod N; when the window exceeds
// the circle the wrapped indices count twice, matching (1/2t) int_{x-t}^{x+t}.
inline int wrap(int j, int N) {
    j %= N;
    return j < 0 ? j + N : j;
}

} // namespace

GridFunction hl_maximal(const GridFunction& f) {
    const int N = f.size();
    std::vector<double> a(N);
    for (int i = 0; i < N; ++i) a[i] = std::fabs(f[i]);
    GridFunction out(N);
    for (int i = 0; i < N; ++i) {
        double sum = a[i];
        double best = sum; // k = 0: average over one cell
        for (int k = 1; k <= N / 2; ++k) {
            sum += a[wrap(i - k, N)] + a[wrap(i + k, N)];
            double avg = sum / (2 * k + 1);
            if (avg > best) best = avg;
        }
        out[i] = best;
    }
    return out;
}

GridFunction hl_maximal_brute(const GridFunction& f) {
    const int N = f.size();
    GridFunction out(N);
    for (int i = 0; i < N; ++i) {
        double best = 0.0;
        for (int k = 0; k <= N / 2; ++k) {
            double sum = 0.0;
            for (int j = i - k; j <= i + k; ++j) sum += std::fabs(f[wrap(j, N)]);
            double avg = sum / (2 * k + 1);
            if (k == 0 || avg > best) best = avg;
        }
        out[i] = best;
    }
    return out;
}

namespace {

// Sliding-window maximum with half-width w (indices), circular.
GridFunction dilate_max(const GridFunction& g, int w) {
    const int N = g.size();
    if (w <= 0) return g;
    if (2 * w + 1 >= N) {
        double m = lp_norm_inf(g);
        GridFunction out(N);
        for (int i = 0; i < N; ++i) out[i] = m;
        return out;
    }
    // monotone deque over the doubled array
    GridFunction out(N);
    std::deque<int> dq;
    auto val = [&](int j) { return g[j % N]; };
    int lo = -w, hi = -w - 1;
    for (int i = 0; i < N; ++i) {
        int want_hi = i + w;
        while (hi < want_hi) {
            ++hi;
            while (!dq.empty() && val(dq.back() + N) <= val(hi + N)) dq.pop_back();
            dq.push_back(hi);
        }
        int want_lo = i - w;
        while (lo < want_lo) {
            if (!dq.empty() && dq.front() == lo) dq.pop_front();
            ++lo;
        }
        out[i] = val(dq.front() + N);
    }
    return out;
}

} // namespace

MaximalReport lambda_maximal(const Kernel& k, const ApproachCurve& curve, const GridFunction& f,
                             const std::vector<RadialParam>& r_set, Diagnostics* diag) {
    const int N = f.size();
    const double h = f.step();
    MaximalReport rep;
    rep.values = GridFunction(N);
    for (RadialParam r : r_set) {
        GridFunction conv = convolve(k, r, f, diag);
        for (int i = 0; i < N; ++i) conv[i] = std::fabs(conv[i]);
        double lam = curve.lambda(r);
        int w = lam >= pi ? N : static_cast<int>(std::ceil(lam / h)) - 1;
        GridFunction dil = dilate_max(conv, std::max(0, w));
        for (int i = 0; i < N; ++i) rep.values[i] = std::max(rep.values[i], dil[i]);
    }
    return rep;
}

double level_set_measure(const GridFunction& values, double t) {
    int count = 0;
    for (int i = 0; i < values.size(); ++i)
        if (values[i] > t) ++count;
    return count * values.step();
}

double weak_type_check(MaximalReport& report, const GridFunction& f, double p,
                       const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("weak_type_check: empty t grid");
    double fp = lp_norm(f, p);
    if (!(fp > 0.0)) throw std::invalid_argument("weak_type_check: ||f||_p = 0");
    double best = 0.0, witness = t_grid.front();
    for (double t : t_grid) {
        double m = level_set_measure(report.values, t);
        report.level_set_measures[t] = m;
        double c = m * std::pow(t, p) / std::pow(fp, p);
        if (c > best) {
            best = c;
            witness = t;
        }
    }
    report.best_constant = best;
    report.witness_t = witness;
    return best;
}

double pointwise_domination_check(const Kernel& k, const ApproachCurve& curve,
                                  const GridFunction& f, double p,
                                  const std::vector<RadialParam>& r_set, Diagnostics* diag) {
    MaximalReport rep = lambda_maximal(k, curve, f, r_set, diag);
    GridFunction fp(f.size());
    for (int i = 0; i < f.size(); ++i) fp[i] = std::pow(std::fabs(f[i]), p);
    GridFunction m = hl_maximal(fp);
    double worst = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        double denom = std::pow(m[i], 1.0 / p);
        double num = rep.values[i];
        if (denom == 0.0) {
            if (num != 0.0) return std::numeric_limits<double>::infinity();
            continue; // 0/0 -> 0
        }
        worst = std::max(worst, num / denom);
    }
    return worst;
}

namespace {

template <typename Eval>
std::vector<double> oscillation_impl(const ApproachCurve& curve,
                                     const std::vector<double>& x_samples,
                                     const std::vector<RadialParam>& r_window, Eval eval) {
    std::vector<double> out;
    out.reserve(x_samples.size());
    for (double x : x_samples) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (RadialParam r : r_window) {
            double v = eval(r, x + curve.lambda(r));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        out.push_back(r_window.empty() ? 0.0 : hi - lo);
    }
    return out;
}

} // namespace

std::vector<double> curve_oscillation(const Kernel& k, const ApproachCurve& curve,
                                      const GridFunction& f, const std::vector<double>& x_samples,
                                      const std::vector<RadialParam>& r_window) {
    return oscillation_impl(curve, x_samples, r_window,
                            [&](RadialParam r, double y) { return convolve_point(k, r, f, y); });
}

std::vector<double> curve_oscillation(const Kernel& k, const ApproachCurve& curve,
                                      const ArcSet& indicator_of,
                                      const std::vector<double>& x_samples,
                                      const std::vector<RadialParam>& r_window) {
    return oscillation_impl(curve, x_samples, r_window, [&](RadialParam r, double y) {
        return convolve_point_arcs(k, r, indicator_of, y);
    });
}

std::vector<double> fejer_shift_check(const GridFunction& f, double x,
                                      const std::vector<long long>& n_sequence, double c) {
    Kernel fej = fejer_kernel();
    double fx = f.value_at(x);
    std::vector<double> errors;
    errors.reserve(n_sequence.size());
    for (long long n : n_sequence) {
        if (n < 1) throw std::invalid_argument("fejer_shift_check needs n >= 1");
        RadialParam r = RadialParam::from_eps(1.0 / (static_cast<double>(n) + 1.0));
        double v = convolve_point(fej, r, f, x + c / static_cast<double>(n));
        errors.push_back(std::fabs(v - fx));
    }
    return errors;
}

GridFunction preset_function(const std::string& name, int N) {
    if (name == "const") return GridFunction(N, 1.0);
    if (name == "step") return GridFunction::indicator(N, ArcSet::interval(0.0, pi));
    if (name == "cos") return GridFunction::sample(N, [](double t) { return std::cos(t); });
    if (name == "bump") {
        // unit-mass bump: 8 cells wide, centered at 0
        GridFunction g(N);
        double h = g.step();
        double width = 8.0 * h;
        for (int k = 0; k < N; ++k)
            if (Angle::distance(g.theta(k), 0.0) < width / 2) g[k] = 1.0 / width;
        return g;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

} // namespace tangentscope
