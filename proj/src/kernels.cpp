#include "tangentscope/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "tangentscope/csv_io.hpp"

namespace tangentscope {

namespace quad {

namespace {
double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double fm, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, fa, m, fm, flm);
    double right = simpson(f, m, fm, b, fb, frm);
    double err = (left + right - whole) / 15.0;
    if (depth <= 0 || std::fabs(err) <= tol) return left + right + err;
    return adaptive_rec(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1) +
           adaptive_rec(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1);
}
} // namespace

double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                int max_depth) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = simpson(f, a, fa, b, fb, fm);
    return adaptive_rec(f, a, fa, b, fb, fm, whole, tol, max_depth);
}

} // namespace quad

double Kernel::integral(RadialParam r, double a, double b, double tol) const {
    if (b <= a) return 0.0;
    if (closed_integral) return closed_integral(r, a, b);
    // Split at eps-scaled breakpoints around 0 so the quadrature sees the
    // peak; kernels are 2pi-periodic, reduce the window into one period.
    double len = b - a;
    if (len > two_pi) throw std::invalid_argument("integration window longer than 2pi");
    auto g = [&](double t) { return evaluate(r, t); };
    double w = peak_width ? peak_width(r) : r.eps;
    std::vector<double> cuts{a};
    for (double scale = w; scale < len; scale *= 8.0) {
        // breakpoints at +-scale around each multiple of 2pi inside [a,b]
        for (double center = std::ceil(a / two_pi) * two_pi - two_pi; center < b + two_pi;
             center += two_pi) {
            for (double s : {center - scale, center + scale})
                if (s > a && s < b) cuts.push_back(s);
        }
        if (scale > two_pi) break;
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += quad::adaptive(g, cuts[i], cuts[i + 1], tol / cuts.size());
    return total;
}

namespace {

// Poisson kernel in eps-space: num = eps(2-eps), den = eps^2 + 4(1-eps)sin^2(t/2).
double poisson_value(RadialParam r, double t) {
    double e = r.eps;
    double s = std::sin(0.5 * t);
    double den = e * e + 4.0 * (1.0 - e) * s * s;
    return e * (2.0 - e) / (two_pi * den);
}

// Antiderivative of the normalized Poisson kernel: I(t) with I(b) - I(a)
// equal to the integral; one full period contributes exactly 1.
double poisson_antiderivative(RadialParam r, double t) {
    double s = std::remainder(t, two_pi); // (-pi, pi]
    double m = std::round((t - s) / two_pi);
    double a = (2.0 - r.eps) / r.eps;
    double f;
    if (s == pi)
        f = 0.5;
    else
        f = std::atan(a * std::tan(0.5 * s)) / pi;
    return m + f;
}

struct FracPoissonCache {
    std::map<double, double> c_by_eps;
    std::mutex mu;
};

double sqrt_unnormalized_poisson(RadialParam r, double t) {
    double e = r.eps;
    double s = std::sin(0.5 * t);
    double den = e * e + 4.0 * (1.0 - e) * s * s;
    return std::sqrt(e * (2.0 - e) / den);
}

} // namespace

double frac_poisson_c(RadialParam r) {
    static FracPoissonCache cache;
    {
        std::lock_guard<std::mutex> lk(cache.mu);
        auto it = cache.c_by_eps.find(r.eps);
        if (it != cache.c_by_eps.end()) return it->second;
    }
    auto f = [&](double t) { return sqrt_unnormalized_poisson(r, t); };
    // Even integrand; geometric panels resolve the peak at 0.
    std::vector<double> cuts{0.0};
    for (double s = std::min(r.eps, pi / 2); s < pi; s *= 4.0) cuts.push_back(s);
    cuts.push_back(pi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double half = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        half += quad::adaptive(f, cuts[i], cuts[i + 1], 1e-10 / cuts.size());
    double c = 2.0 * half;
    std::lock_guard<std::mutex> lk(cache.mu);
    cache.c_by_eps[r.eps] = c;
    return c;
}

long long fejer_order(RadialParam r) {
    double n = std::round(1.0 / r.eps) - 1.0;
    if (n < 0.0) n = 0.0;
    if (n > 9e15) throw std::invalid_argument("fejer order out of range");
    return static_cast<long long>(n);
}

double fejer_value(long long n, double t) {
    double s = std::sin(0.5 * t);
    double np1 = static_cast<double>(n + 1);
    if (std::fabs(s) < 1e-300) return np1 / two_pi;
    double num = std::sin(0.5 * np1 * t);
    double ratio = num / s;
    return ratio * ratio / (two_pi * np1);
}

namespace {

double fejer_antiderivative(long long n, double t) {
    // (1/2pi)(t + 2 sum_{j=1}^n (1 - j/(n+1)) sin(jt)/j); an entire
    // antiderivative on R, so differences handle wraps for free.
    double np1 = static_cast<double>(n + 1);
    double acc = t;
    for (long long j = 1; j <= n; ++j) {
        double jd = static_cast<double>(j);
        acc += 2.0 * (1.0 - jd / np1) * std::sin(jd * t) / jd;
    }
    return acc / two_pi;
}

void check_r(RadialParam r) {
    if (!r.valid()) throw std::invalid_argument("radial parameter outside (0,1)");
}

} // namespace

Kernel poisson_kernel() {
    Kernel k;
    k.name = "poisson";
    k.evaluate = [](RadialParam r, double t) {
        check_r(r);
        return poisson_value(r, t);
    };
    k.closed_integral = [](RadialParam r, double a, double b) {
        check_r(r);
        return poisson_antiderivative(r, b) - poisson_antiderivative(r, a);
    };
    k.peak_width = [](RadialParam r) { return r.eps; };
    return k;
}

Kernel frac_poisson_kernel() {
    Kernel k;
    k.name = "frac_poisson";
    k.evaluate = [](RadialParam r, double t) {
        check_r(r);
        return sqrt_unnormalized_poisson(r, t) / frac_poisson_c(r);
    };
    k.peak_width = [](RadialParam r) { return r.eps; };
    return k;
}

Kernel fejer_kernel() {
    Kernel k;
    k.name = "fejer";
    k.evaluate = [](RadialParam r, double t) {
        check_r(r);
        return fejer_value(fejer_order(r), t);
    };
    k.closed_integral = [](RadialParam r, double a, double b) {
        check_r(r);
        long long n = fejer_order(r);
        return fejer_antiderivative(n, b) - fejer_antiderivative(n, a);
    };
    k.peak_width = [](RadialParam r) {
        return two_pi / (static_cast<double>(fejer_order(r)) + 1.0);
    };
    return k;
}

Kernel constant_kernel() {
    Kernel k;
    k.name = "const";
    k.evaluate = [](RadialParam, double) { return 1.0 / two_pi; };
    k.closed_integral = [](RadialParam, double a, double b) { return (b - a) / two_pi; };
    k.peak_width = [](RadialParam) { return pi; };
    return k;
}

Kernel tabulated_kernel(const std::string& manifest_path) {
    auto table = csv::read_kernel_manifest(manifest_path);
    auto shared = std::make_shared<std::vector<std::pair<double, GridFunction>>>(std::move(table));
    Kernel k;
    k.name = "table";
    k.evaluate = [shared](RadialParam r, double t) {
        check_r(r);
        for (const auto& [eps, g] : *shared)
            if (std::fabs(eps - r.eps) <= 1e-12 * std::max(1.0, std::fabs(eps)))
                return g.value_at(t);
        throw std::invalid_argument("tabulated kernel has no entry for this r");
    };
    k.peak_width = [](RadialParam r) { return r.eps; };
    return k;
}

Kernel kernel_by_name(const std::string& spec) {
    if (spec == "poisson") return poisson_kernel();
    if (spec == "frac_poisson") return frac_poisson_kernel();
    if (spec == "fejer") return fejer_kernel();
    if (spec == "const") return constant_kernel();
    if (spec.rfind("table:", 0) == 0) return tabulated_kernel(spec.substr(6));
    throw std::invalid_argument("unknown kernel: " + spec);
}

GridFunction majorant(const Kernel& k, RadialParam r, int N) {
    if (N < 4 || N % 2 != 0) throw std::invalid_argument("majorant needs even N >= 4");
    const int half = N / 2;
    std::vector<double> side(half + 1);
    for (int j = 0; j <= half; ++j) {
        double t = two_pi * j / N;
        double pos = std::fabs(k.evaluate(r, t));
        double neg = std::fabs(k.evaluate(r, -t));
        side[j] = std::max(pos, neg);
    }
    for (int j = half - 1; j >= 0; --j) side[j] = std::max(side[j], side[j + 1]);
    GridFunction g(N);
    for (int idx = 0; idx < N; ++idx) g[idx] = side[std::min(idx, N - idx)];
    return g;
}

double majorant_l1_refined(const Kernel& k, RadialParam r, int N) {
    // Abscissas on (0, pi]: coarse grid plus 16 points per octave down to
    // pi * 2^-64; suffix max from pi inward gives the majorant at each point.
    std::vector<double> xs;
    const int half = N / 2;
    xs.reserve(half + 16 * 64 + 2);
    for (int j = 1; j <= half; ++j) xs.push_back(two_pi * j / N);
    for (int i = 0; i <= 16 * 64; ++i) xs.push_back(pi * std::pow(2.0, -i / 16.0));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    const std::size_t m = xs.size();
    std::vector<double> maj(m);
    double run = 0.0;
    for (std::size_t i = m; i-- > 0;) {
        double t = xs[i];
        run = std::max(run, std::max(std::fabs(k.evaluate(r, t)), std::fabs(k.evaluate(r, -t))));
        maj[i] = run;
    }
    double half_integral = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i)
        half_integral += 0.5 * (maj[i] + maj[i + 1]) * (xs[i + 1] - xs[i]);
    double sup0 = std::max(run, std::fabs(k.evaluate(r, 0.0)));
    half_integral += xs.front() * 0.5 * (maj.front() + sup0);
    return 2.0 * half_integral;
}

KernelStats kernel_stats(const Kernel& k, RadialParam r, int N) {
    check_r(r);
    if (N < 4) throw std::invalid_argument("kernel_stats needs N >= 4");
    KernelStats st;
    st.r = r;
    st.majorant = majorant(k, r, N);
    st.sup_norm = st.majorant[0];
    GridFunction raw = GridFunction::sample(N, [&](double t) { return k.evaluate(r, t); });
    st.l1_norm = lp_norm(raw, 1.0);
    double ps = 0.0;
    for (int idx = 0; idx < N; ++idx) {
        double x = std::fabs(Angle::signed_rep(two_pi * idx / N));
        ps = std::max(ps, x * st.majorant[idx]);
    }
    st.phi_star = ps;
    st.majorant_l1 = majorant_l1_refined(k, r, N);
    return st;
}

double kernel_lq_norm(const Kernel& k, RadialParam r, int N, double q) {
    GridFunction raw = GridFunction::sample(N, [&](double t) { return k.evaluate(r, t); });
    if (std::isinf(q)) return lp_norm_inf(raw);
    return lp_norm(raw, q);
}

double KernelStats::lq_norm(const Kernel& k, int N, double q) const {
    return kernel_lq_norm(k, r, N, q);
}

namespace {

// decay toward 0: monotone (with slack) over the later half of the sequence
// and at least halved overall; small-n preasymptotics in the head are fine
bool decays(const std::vector<double>& seq) {
    if (seq.size() < 2) return false;
    for (std::size_t i = seq.size() / 2; i + 1 < seq.size(); ++i)
        if (seq[i + 1] > seq[i] * 1.10 + 1e-300) return false;
    return seq.back() <= 0.5 * seq.front() + 1e-300;
}

} // namespace

AxiomsReport axioms_check(const Kernel& k, const std::vector<RadialParam>& rs, int N,
                          double tol, double phi3_bound) {
    AxiomsReport rep;
    rep.offsets = {pi / 8, pi / 4, pi / 2};
    rep.majorant_at_offsets.assign(rep.offsets.size(), {});
    for (RadialParam r : rs) {
        rep.r_eps.push_back(r.eps);
        double mass = k.integral(r, -pi, pi, 1e-10);
        rep.phi1_deviation.push_back(std::fabs(mass - 1.0));
        GridFunction mj = majorant(k, r, N);
        for (std::size_t oi = 0; oi < rep.offsets.size(); ++oi)
            rep.majorant_at_offsets[oi].push_back(mj.value_at(rep.offsets[oi]));
        rep.majorant_l1.push_back(majorant_l1_refined(k, r, N));
    }
    rep.phi1_max_deviation =
        rep.phi1_deviation.empty()
            ? 0.0
            : *std::max_element(rep.phi1_deviation.begin(), rep.phi1_deviation.end());
    rep.phi1_ok = rep.phi1_max_deviation <= tol;
    rep.phi2_ok = true;
    for (const auto& seq : rep.majorant_at_offsets)
        if (!decays(seq)) rep.phi2_ok = false;
    rep.phi3_sup =
        rep.majorant_l1.empty() ? 0.0
                                : *std::max_element(rep.majorant_l1.begin(), rep.majorant_l1.end());
    rep.phi3_bound = phi3_bound;
    rep.phi3_ok = phi3_bound <= 0.0 || rep.phi3_sup <= phi3_bound;
    return rep;
}

bool regularity_check(const Kernel& k, RadialParam r, int N) {
    if (N < 4 || N % 2 != 0) throw std::invalid_argument("regularity_check needs even N >= 4");
    const int half = N / 2;
    double prev_pos = k.evaluate(r, 0.0);
    double prev_neg = prev_pos;
    if (prev_pos < 0.0) return false;
    for (int j = 1; j <= half; ++j) {
        double t = two_pi * j / N;
        double vp = k.evaluate(r, t);
        double vn = k.evaluate(r, -t);
        if (vp < 0.0 || vn < 0.0) return false;
        if (vp > prev_pos * (1.0 + 1e-12) + 1e-300) return false;
        if (vn > prev_neg * (1.0 + 1e-12) + 1e-300) return false;
        prev_pos = vp;
        prev_neg = vn;
    }
    return true;
}

} // namespace tangentscope
