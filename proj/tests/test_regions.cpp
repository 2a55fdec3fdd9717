#include <doctest.h>

#include <cmath>

#include "tangentscope/regions.hpp"

using namespace tangentscope;

TEST_CASE("trend classification") {
    CHECK(classify_trend({1.0, 1.0, 1.0, 1.0, 1.0, 1.0}) == Trend::plateau);
    CHECK(classify_trend({1, 2, 4, 8, 16, 32, 64, 128, 256}) == Trend::increasing);
    CHECK(classify_trend({256, 128, 64, 32, 16, 8, 4, 2, 1}) == Trend::decreasing);
    std::vector<double> conv{1.0, 1.5, 1.8, 1.95, 2.0, 2.01, 2.01, 2.01, 2.01};
    CHECK(classify_trend(conv) == Trend::plateau);
}

TEST_CASE("pi_plain on the poisson kernel") {
    Kernel pk = poisson_kernel();
    auto rs = default_r_sequence(20);
    LimsupEstimate nt = pi_plain(pk, ApproachCurve::nontangential(1.0), rs, 1 << 12);
    // samples are (2 - eps)/(2 pi); the tail approaches 1/pi
    CHECK(std::fabs(nt.tail_max - 1.0 / pi) < 1e-3);
    CHECK(nt.trend == Trend::plateau);

    LimsupEstimate sq = pi_plain(pk, ApproachCurve::power(1.0, 0.5), rs, 1 << 12);
    CHECK(sq.trend == Trend::increasing);
    CHECK(sq.tail_max > 10.0);

    // a curve scaled so lambda * sup_norm == 1 gives constant samples
    std::vector<std::pair<double, double>> tab;
    for (RadialParam r : rs)
        tab.emplace_back(r.eps, two_pi * r.eps / (2.0 - r.eps));
    LimsupEstimate flat = pi_plain(pk, ApproachCurve::table(tab), rs, 1 << 12);
    for (double v : flat.samples) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pi_p collapses to pi_plain at p = 1 and rejects p < 1") {
    Kernel pk = poisson_kernel();
    auto rs = default_r_sequence(10);
    ApproachCurve curve = ApproachCurve::nontangential(1.0);
    LimsupEstimate a = pi_plain(pk, curve, rs, 1 << 10);
    LimsupEstimate b = pi_p(pk, curve, 1.0, rs, 1 << 10, PiMode::limsup);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        CHECK(a.samples[i] == doctest::Approx(b.samples[i]).epsilon(1e-12));
    CHECK_THROWS_AS(pi_p(pk, curve, 0.5, rs, 1 << 10, PiMode::sup), std::invalid_argument);
}

TEST_CASE("pi_p admits the log-tangential region for the square-root kernel") {
    Kernel fp = frac_poisson_kernel();
    std::vector<RadialParam> rs;
    for (int k = 2; k <= 16; ++k) rs.push_back(RadialParam::from_eps(std::ldexp(1.0, -k)));
    const double p = 2.0;
    LimsupEstimate at_p =
        pi_p(fp, ApproachCurve::log_tangential(1.0, p), p, rs, 1 << 12, PiMode::limsup);
    CHECK(at_p.tail_max <= 50.0);
    LimsupEstimate above =
        pi_p(fp, ApproachCurve::log_tangential(1.0, p + 1.0), p, rs, 1 << 12, PiMode::limsup);
    CHECK(above.trend == Trend::increasing);
    CHECK(above.tail_max > at_p.tail_max);
}

TEST_CASE("pi_infty / pi_star dichotomy for the poisson kernel") {
    Kernel pk = poisson_kernel();
    auto deltas = default_delta_sequence(10);
    auto rs = default_r_sequence(deep_rmax_exponent);

    PiMatrix inf_nt = pi_infty(pk, ApproachCurve::nontangential(1.0), deltas, rs);
    CHECK(inf_nt.estimate <= 0.05);
    // each cell is (2/pi) atan applied to a delta-scaled argument
    double expect = 2.0 / pi * std::atan(deltas.back());
    CHECK(inf_nt.estimate == doctest::Approx(expect).epsilon(1e-2));

    PiMatrix star_sq = pi_star(pk, ApproachCurve::power(1.0, 0.5), deltas, rs);
    CHECK(star_sq.estimate >= 0.95);
    PiMatrix inf_sq = pi_infty(pk, ApproachCurve::power(1.0, 0.5), deltas, rs);
    CHECK(inf_sq.estimate >= 0.95);

    // liminf surrogate is cell-wise below the limsup surrogate
    PiMatrix star_nt = pi_star(pk, ApproachCurve::nontangential(1.0), deltas, rs);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        CHECK(star_nt.per_delta[j] <= inf_nt.per_delta[j] + 1e-15);
        for (std::size_t i = 0; i < rs.size(); ++i)
            CHECK(star_nt.cells[j][i] == doctest::Approx(inf_nt.cells[j][i]));
    }

    // per-delta statistics shrink with delta for the bounded curve
    for (std::size_t j = 0; j + 1 < deltas.size(); ++j)
        CHECK(inf_nt.per_delta[j + 1] <= inf_nt.per_delta[j] + 1e-15);
}

TEST_CASE("carlsson bound") {
    Kernel pk = poisson_kernel();
    auto rs = default_r_sequence(12);
    ApproachCurve nt = ApproachCurve::nontangential(1.0);
    LimsupEstimate c1 = carlsson_bound(pk, nt, 1.0, rs, 1 << 12);
    LimsupEstimate plain = pi_plain(pk, nt, rs, 1 << 12);
    for (std::size_t i = 0; i < c1.samples.size(); ++i)
        CHECK(c1.samples[i] == doctest::Approx(plain.samples[i]).epsilon(1e-12));

    // rho(r) = ||phi_r||_2^{-2} makes every sample 1 by definition
    std::vector<std::pair<double, double>> tab;
    for (RadialParam r : rs) {
        double l2 = kernel_lq_norm(pk, r, 1 << 12, 2.0);
        tab.emplace_back(r.eps, 1.0 / (l2 * l2));
    }
    LimsupEstimate flat = carlsson_bound(pk, ApproachCurve::table(tab), 2.0, rs, 1 << 12);
    for (double v : flat.samples) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

    LimsupEstimate grow = carlsson_bound(pk, ApproachCurve::power(1.0, 0.5), 2.0, rs, 1 << 12);
    CHECK(grow.trend == Trend::increasing);
    CHECK_THROWS_AS(carlsson_bound(pk, nt, 0.9, rs, 1 << 12), std::invalid_argument);
}

TEST_CASE("functionals are monotone in the curve") {
    Kernel pk = poisson_kernel();
    auto rs = default_r_sequence(10);
    ApproachCurve lo = ApproachCurve::nontangential(0.5);
    ApproachCurve hi = ApproachCurve::nontangential(1.0);
    auto a = pi_plain(pk, lo, rs, 1 << 10);
    auto b = pi_plain(pk, hi, rs, 1 << 10);
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] <= b.samples[i]);
    auto deltas = default_delta_sequence(6);
    auto mi = pi_infty(pk, lo, deltas, rs);
    auto ma = pi_infty(pk, hi, deltas, rs);
    for (std::size_t j = 0; j < deltas.size(); ++j)
        for (std::size_t i = 0; i < rs.size(); ++i)
            CHECK(mi.cells[j][i] <= ma.cells[j][i] + 1e-15);
}

TEST_CASE("condition ordering across p") {
    // samples for p2 are bounded by samples for p1 times (majorant_l1 + eps)^{p2-p1}
    Kernel pk = poisson_kernel();
    auto rs = default_r_sequence(8);
    ApproachCurve curve = ApproachCurve::nontangential(1.0);
    double p1 = 1.5, p2 = 2.5;
    auto e1 = pi_p(pk, curve, p1, rs, 1 << 10, PiMode::sup);
    auto e2 = pi_p(pk, curve, p2, rs, 1 << 10, PiMode::sup);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        KernelStats st = kernel_stats(pk, rs[i], 1 << 10);
        double cap = e1.samples[i] * std::pow(st.majorant_l1 + 1e-9, p2 - p1);
        CHECK(e2.samples[i] <= cap * (1.0 + 1e-9));
    }
}

TEST_CASE("approach curve behavior") {
    auto rs = default_r_sequence(16);
    CHECK(ApproachCurve::nontangential(2.0).validate(rs));
    CHECK(ApproachCurve::log_tangential(1.0, 2.0).validate(rs));
    CHECK(ApproachCurve::power(1.0, 0.5).validate(rs));
    ApproachCurve sq = ApproachCurve::power(1.0, 0.5);
    RadialParam solved = sq.solve_lambda(0.01, 1e-10, 0.5);
    CHECK(sq.lambda(solved) == doctest::Approx(0.01).epsilon(1e-10));
    ApproachCurve parsed = ApproachCurve::parse("log:c=2,p=3");
    CHECK(parsed.lambda(RadialParam::from_eps(0.01)) ==
          doctest::Approx(2.0 * 0.01 * std::pow(std::log(100.0), 3.0)));
    CHECK_THROWS_AS(ApproachCurve::parse("spiral:c=1"), std::invalid_argument);
}
