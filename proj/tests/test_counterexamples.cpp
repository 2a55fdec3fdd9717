#include <doctest.h>

#include <cmath>

#include "tangentscope/counterexamples.hpp"
#include "tangentscope/operators.hpp"
#include "tangentscope/regions.hpp"

using namespace tangentscope;

TEST_CASE("comb sets") {
    // n = 1, even, delta = 0.25: single arc (-pi/4, pi/4) mod 2pi
    ArcSet one = comb_set({1, 0.25, CombSpec::Phase::even_centers});
    CHECK(one.measure() == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(one.contains(0.1));
    CHECK(one.contains(two_pi - 0.1));
    CHECK_FALSE(one.contains(pi));

    ArcSet four = comb_set({4, 0.1, CombSpec::Phase::even_centers});
    CHECK(four.measure() == doctest::Approx(two_pi * 0.1).epsilon(1e-13));

    // even and odd phases are rotations of each other by pi/n
    ArcSet even = comb_set({6, 0.2, CombSpec::Phase::even_centers});
    ArcSet odd = comb_set({6, 0.2, CombSpec::Phase::odd_centers});
    ArcSet rotated = even.rotate(pi / 6.0);
    CHECK(rotated.symmetric_difference(odd).measure() < 1e-12);

    CHECK_THROWS_AS(comb_set({4, 0.6, CombSpec::Phase::even_centers}), std::invalid_argument);
    CHECK_THROWS_AS(comb_set({0, 0.1, CombSpec::Phase::even_centers}), std::invalid_argument);

    // membership by phase arithmetic matches the materialized arcs
    for (int i = 0; i < 1000; ++i) {
        double x = two_pi * (i + 0.5) / 1000;
        CHECK(comb_contains(6, 0.2, CombSpec::Phase::odd_centers, x) == odd.contains(x));
        CHECK(comb_contains(6, 0.2, CombSpec::Phase::even_centers, x) == even.contains(x));
    }
}

TEST_CASE("littlewood set at depth one is the first comb") {
    Kernel pk = poisson_kernel();
    ApproachCurve sq = ApproachCurve::power(1.0, 0.5);
    LittlewoodBuild b = littlewood_set(pk, sq, 1, 16, 7);
    REQUIRE(b.stages.size() == 1);
    const auto& st = b.stages[0];
    double lam_u = sq.lambda(RadialParam::from_eps(st.eps_u));
    CHECK(st.n_k == static_cast<long long>(std::floor(5.0 * pi / lam_u)));
    CHECK(b.set.measure() == doctest::Approx(two_pi * 5.0 * st.delta_k).epsilon(1e-9));
    CHECK(st.mass > b.pi_star_estimate * 0.5);
    CHECK(st.delta_k < std::ldexp(1.0, -6));
}

TEST_CASE("littlewood stage schedule and witnesses") {
    Kernel pk = poisson_kernel();
    ApproachCurve sq = ApproachCurve::power(1.0, 0.5);
    LittlewoodBuild b = littlewood_set(pk, sq, 3, 64, 11);
    REQUIRE(b.stages.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& st = b.stages[k];
        CHECK(st.delta_k < std::ldexp(1.0, -static_cast<int>(k) - 6));
        CHECK(st.mass > b.pi_star_estimate * (1.0 - std::ldexp(1.0, -static_cast<int>(k) - 1)));
        double lam_u = sq.lambda(RadialParam::from_eps(st.eps_u));
        double lam_v = sq.lambda(RadialParam::from_eps(st.eps_v));
        CHECK(3.0 * lam_v <= lam_u * (1 + 1e-12));
        CHECK(lam_u < pi);
        if (k > 0) {
            CHECK(st.delta_k < b.stages[k - 1].delta_k);
            CHECK(st.eps_u < b.stages[k - 1].eps_u);
            CHECK(st.n_k > b.stages[k - 1].n_k);
        }
    }
    // witness r' solves lambda(r') = 2 pi j0/n_k - x inside [v_k, u_k]
    for (std::size_t k = 0; k < 3; ++k) {
        for (const WitnessPoint& w : b.witnesses[k]) {
            double target =
                two_pi * static_cast<double>(w.j0) / static_cast<double>(b.stages[k].n_k) - w.x;
            CHECK(sq.lambda(RadialParam::from_eps(w.eps_r1)) ==
                  doctest::Approx(target).epsilon(1e-9));
            CHECK(w.eps_r1 <= b.stages[k].eps_u * (1 + 1e-12));
            CHECK(w.eps_r1 >= b.stages[k].eps_v * (1 - 1e-12));
        }
    }
    auto osc = littlewood_oscillation(pk, sq, b);
    int good = 0;
    for (double v : osc) good += v >= 0.5;
    CHECK(good >= static_cast<int>(0.9 * osc.size()));
}

TEST_CASE("littlewood refuses the nontangential curve") {
    Kernel pk = poisson_kernel();
    try {
        littlewood_set(pk, ApproachCurve::nontangential(1.0), 2, 8, 1);
        FAIL("expected construction_refused");
    } catch (const construction_refused& e) {
        CHECK(e.condition == "pi_star");
        CHECK(e.estimate <= 0.5);
        CHECK(e.threshold == 0.5);
    }
}

TEST_CASE("alternating set") {
    Kernel pk = poisson_kernel();
    ApproachCurve sq = ApproachCurve::power(1.0, 0.5);
    AlternatingBuild one = alternating_set(pk, sq, 1);
    // depth one: E is the first odd comb
    CHECK(one.set.measure() ==
          doctest::Approx(two_pi * one.stages[0].delta_k).epsilon(1e-12));

    AlternatingBuild b = alternating_set(pk, sq, 2);
    REQUIRE(b.stages.size() == 2);
    // |E_k \triangle E_{k-1}| = |U_k| exactly
    double d = b.partial[1].symmetric_difference(b.partial[0]).measure();
    CHECK(d == doctest::Approx(two_pi * b.stages[1].delta_k).epsilon(1e-9));
    // Eq 1.3-16 discipline at finite depth
    CHECK(b.stages[1].delta_k <=
          b.pi_infty_estimate / (std::ldexp(1.0, 7) * b.stages[0].sup_norm) * (1 + 1e-12));

    auto samples = sample_points(64, 5);
    auto osc = alternating_oscillation(pk, sq, b, samples);
    for (std::size_t k = 0; k < osc.size(); ++k) {
        double bound = b.pi_infty_estimate / 8.0 - 16.0 * b.stages[k].delta_k;
        int good = 0;
        for (double v : osc[k]) good += v >= bound;
        CHECK(good >= static_cast<int>(0.9 * osc[k].size()));
    }
}

TEST_CASE("l1 divergent function") {
    Kernel pk = poisson_kernel();
    ApproachCurve sq = ApproachCurve::power(1.0, 0.5);

    L1DivergentBuild k1 = l1_divergent_function(pk, sq, 1, 1 << 10);
    CHECK(k1.l1_norm == 0.5);
    CHECK(step_l1_norm(k1.f) == doctest::Approx(0.5).epsilon(1e-12));

    L1DivergentBuild b = l1_divergent_function(pk, sq, 3, 1 << 12);
    CHECK(b.l1_norm == 0.875);
    // the event sweep carries float noise over ~3e5 pieces
    CHECK(step_l1_norm(b.f) == doctest::Approx(0.875).epsilon(1e-8));
    double max_inv = 0.0;
    for (std::size_t k = 0; k < b.stages.size(); ++k) {
        const auto& st = b.stages[k];
        RadialParam r = RadialParam::from_eps(st.eps_k);
        double lam = sq.lambda(r);
        // growth condition of the stage schedule
        double lhs = lam * (2.0 - st.eps_k) / (two_pi * st.eps_k);
        CHECK(lhs >= std::ldexp(1.0, static_cast<int>(k) + 4) * (1.0 + (k + 1) + max_inv) *
                         (1 - 1e-9));
        max_inv = std::max(max_inv, 1.0 / st.delta_measure);
        CHECK(st.delta_r <= 0.25 * lam);
    }

    auto xs = sample_points(64, 2025);
    auto part = l1div_witness_values(pk, sq, b, xs, false);
    for (std::size_t k = 0; k < part.size(); ++k) {
        int good = 0;
        for (double v : part[k]) good += v >= b.stages[k].witness_bound;
        CHECK(good >= static_cast<int>(0.9 * part[k].size()));
    }
    auto full = l1div_witness_values(pk, sq, b, xs, true);
    int grow = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        bool ok = true;
        for (std::size_t k = 1; k < full.size(); ++k)
            ok = ok && full[k][i] >= static_cast<double>(k + 1) * full[0][i];
        grow += ok;
    }
    CHECK(grow >= static_cast<int>(0.9 * xs.size()));

    CHECK_THROWS_AS(l1_divergent_function(pk, ApproachCurve::nontangential(1.0), 2, 1 << 10),
                    construction_refused);
}

TEST_CASE("finite blaschke factors") {
    // z^n = 1: (1 - rho^n)/(rho^n - 1) = -1
    auto at_zero = finite_blaschke(8, 1e-2, 0.0);
    CHECK(std::abs(at_zero + 1.0) < 1e-12);
    // odd n x = pi: z^n = -1 gives +1
    auto at_gap = finite_blaschke(5, 1e-2, pi / 5.0);
    CHECK(std::abs(at_gap - 1.0) < 1e-12);
    for (double x : {0.1, 0.9, 2.7, 5.5})
        for (double d : {1e-2, 1e-4})
            CHECK(std::fabs(std::abs(finite_blaschke(16, d, x)) - 1.0) < 1e-12);
    CHECK_THROWS_AS(finite_blaschke(0, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("blaschke factor bounds") {
    for (long long n : {8LL, 32LL}) {
        for (double d : {1e-2, 1e-4}) {
            auto [on, off] = blaschke_bounds_check(n, d, 1 << 12);
            CHECK(on <= 100.0 * std::sqrt(d));
            CHECK(off <= 100.0 * std::sqrt(std::sqrt(d)));
        }
    }
    // shrinking delta by 100 shrinks the on-comb bound by about 10
    auto [on_hi, off_hi] = blaschke_bounds_check(8, 1e-2, 1 << 12);
    auto [on_lo, off_lo] = blaschke_bounds_check(8, 1e-4, 1 << 12);
    double ratio = on_hi / on_lo;
    CHECK(ratio >= 5.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("blaschke product construction") {
    Kernel pk = poisson_kernel();
    ApproachCurve sq = ApproachCurve::power(1.0, 0.5);
    BlaschkeBuild b = blaschke_product(pk, sq, 2, 1 << 12, 32, 3);
    REQUIRE(b.stages.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        double bound = std::ldexp(1.0, -static_cast<int>(k) - 1);
        CHECK(b.stages[k].on_comb_max < bound);
        CHECK(b.stages[k].off_comb_max < bound);
        CHECK(b.stages[k].mass >
              b.pi_star_estimate * (1.0 - bound) * (1 - 1e-12));
        if (k > 0) {
            CHECK(b.stages[k].delta_k < b.stages[k - 1].delta_k);
            CHECK(b.stages[k].n_k > b.stages[k - 1].n_k);
        }
    }
    // boundary values stay unimodular after the product
    double drift = 0.0;
    for (int i = 0; i < 1 << 12; ++i)
        drift = std::max(drift, std::fabs(std::abs(b.eval(two_pi * i / (1 << 12))) - 1.0));
    CHECK(drift <= 1e-9);

    auto gaps = blaschke_witness_gaps(pk, sq, b, 1);
    int good = 0;
    for (double g : gaps) good += g >= 0.5;
    CHECK(good >= static_cast<int>(0.9 * gaps.size()));

    try {
        blaschke_product(pk, ApproachCurve::nontangential(1.0), 2, 1 << 10, 8, 1);
        FAIL("expected construction_refused");
    } catch (const construction_refused& e) {
        CHECK(e.condition == "pi_star");
        CHECK(e.threshold == 0.95);
    }
}
