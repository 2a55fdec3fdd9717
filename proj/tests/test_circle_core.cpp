#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "tangentscope/arc_set.hpp"
#include "tangentscope/counterexamples.hpp"
#include "tangentscope/grid_function.hpp"
#include "tangentscope/kernels.hpp"
#include "tangentscope/signed_measure.hpp"

using namespace tangentscope;

namespace {

// brute-force membership comparison on a dense grid
bool sets_agree(const ArcSet& got, const std::function<bool(double)>& expect, int grid = 10000) {
    for (int i = 0; i < grid; ++i) {
        double x = two_pi * (i + 0.5) / grid;
        if (got.contains(x) != expect(x)) return false;
    }
    return true;
}

} // namespace

TEST_CASE("angle reduction and distance") {
    CHECK(Angle::reduce(Angle::reduce(7.5)) == Angle::reduce(7.5));
    CHECK(Angle::reduce(-1e-18) >= 0.0);
    CHECK(Angle::reduce(two_pi) == 0.0);
    CHECK(Angle::distance(0.1, two_pi - 0.1) == doctest::Approx(0.2));
    for (double x : {0.0, 1.0, 3.0, 6.0})
        for (double y : {0.5, 2.5, 5.5}) {
            double d = Angle::distance(x, y);
            CHECK(d >= 0.0);
            CHECK(d <= pi + 1e-15);
        }
}

TEST_CASE("arc measure basics") {
    CHECK(ArcSet{}.measure() == 0.0);
    CHECK(ArcSet::full_circle().measure() == doctest::Approx(two_pi));
    // U(4, 0.5) built arc by arc: 4 arcs of length 2*pi*0.5/4 each
    ArcSet comb;
    for (int jj = 0; jj < 4; ++jj) {
        double lo = pi * (2.0 * jj - 0.5) / 4.0;
        comb = comb.unite(ArcSet::interval(lo, lo + pi / 4.0));
    }
    double summed = 0.0;
    for (const Arc& a : comb.arcs()) summed += a.length();
    CHECK(comb.measure() == doctest::Approx(pi).epsilon(1e-12));
    CHECK(summed == doctest::Approx(comb.measure()));
}

TEST_CASE("symmetric difference examples") {
    ArcSet a = ArcSet::interval(0.0, 1.0);
    CHECK(a.symmetric_difference(a).empty());
    ArcSet same = a.symmetric_difference(ArcSet{});
    CHECK(same.measure() == doctest::Approx(1.0));
    CHECK(sets_agree(same, [](double x) { return x < 1.0; }));

    ArcSet b = ArcSet::interval(0.5, 1.5);
    ArcSet d = a.symmetric_difference(b);
    CHECK(d.measure() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sets_agree(d, [](double x) { return (x >= 0.0 && x < 0.5) || (x >= 1.0 && x < 1.5); }));
}

TEST_CASE("arc algebra is a boolean algebra (randomized vs brute force)") {
    std::mt19937_64 rng(7);
    auto rand_set = [&]() {
        ArcSet s;
        int pieces = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < pieces; ++i) {
            double a = two_pi * (rng() >> 11) * 0x1p-53;
            double len = 1.5 * (rng() >> 11) * 0x1p-53;
            s = s.unite(ArcSet::interval(a, a + len));
        }
        return s;
    };
    for (int trial = 0; trial < 20; ++trial) {
        ArcSet A = rand_set(), B = rand_set();
        ArcSet AB = A.symmetric_difference(B);
        ArcSet BA = B.symmetric_difference(A);
        CHECK(sets_agree(AB, [&](double x) { return A.contains(x) != B.contains(x); }, 2000));
        CHECK(AB.measure() == doctest::Approx(BA.measure()));
        // (A ^ B) ^ B == A
        ArcSet back = AB.symmetric_difference(B);
        CHECK(sets_agree(back, [&](double x) { return A.contains(x); }, 2000));
        // additivity over the disjoint pieces A\B, B\A, A&B
        double u = A.unite(B).measure();
        double split = A.subtract(B).measure() + B.subtract(A).measure() +
                       A.intersect(B).measure();
        CHECK(u == doctest::Approx(split).epsilon(1e-12));
        CHECK(AB.measure() ==
              doctest::Approx(A.measure() + B.measure() - 2 * A.intersect(B).measure())
                  .epsilon(1e-9));
    }
}

TEST_CASE("integrate on grid functions") {
    CHECK(integrate(GridFunction(257, 1.0)) == doctest::Approx(two_pi));
    for (int k = 4; k <= 12; k += 4) {
        int n = 1 << k;
        GridFunction ind = GridFunction::indicator(n, ArcSet::interval(0.0, pi));
        CHECK(integrate(ind) == doctest::Approx(pi).epsilon(1e-15));
    }
    GridFunction c = GridFunction::sample(1024, [](double t) { return std::cos(t); });
    CHECK(std::fabs(integrate(c)) < 1e-12);
}

TEST_CASE("lp norms") {
    GridFunction one(512, 1.0);
    CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(two_pi)));
    GridFunction ind = GridFunction::indicator(1 << 12, ArcSet::interval(0.0, 1.0));
    CHECK(lp_norm(ind, 1.0) == doctest::Approx(1.0).epsilon(1e-3));
    GridFunction c(64, -3.5);
    CHECK(lp_norm_inf(c) == doctest::Approx(3.5));
    CHECK_THROWS_AS(lp_norm(one, 0.5), std::invalid_argument);

    // scaled monotonicity in p for |f| <= 1
    std::mt19937_64 rng(11);
    GridFunction f(256);
    for (int i = 0; i < 256; ++i) f[i] = (rng() >> 11) * 0x1p-53;
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 4.0, 8.0}) {
        double scaled = lp_norm(f, p) / std::pow(two_pi, 1.0 / p);
        if (p > 1.0) CHECK(scaled >= prev - 1e-12);
        prev = scaled;
    }
}

TEST_CASE("lebesgue defect") {
    GridFunction c(256, 4.0);
    CHECK(lebesgue_defect(c, 1.0, 0.3) == 0.0);
    GridFunction step = GridFunction::indicator(1 << 12, ArcSet::interval(0.0, pi));
    CHECK(lebesgue_defect(step, pi / 2, 0.1) == 0.0);
    double at_jump = lebesgue_defect(step, 0.0, 0.1);
    // half the window disagrees, up to one grid cell
    CHECK(at_jump == doctest::Approx(0.5).epsilon(0.02));
    CHECK_THROWS_AS(lebesgue_defect(step, 0.0, 4.0), std::invalid_argument);
}

TEST_CASE("convolution against measures") {
    Kernel pk = poisson_kernel();
    RadialParam r = RadialParam::from_r(0.7);
    SignedMeasure atom{{Atom{1.0, 1.0}}, std::nullopt};
    CHECK(convolve_measure_point(pk, r, atom, 2.5) ==
          doctest::Approx(pk.evaluate(r, 1.5)).epsilon(1e-15));

    SignedMeasure zero{};
    CHECK(convolve_measure_point(pk, r, zero, 0.3) == 0.0);

    // odd cancellation: +-1 atoms symmetric around x, even kernel
    SignedMeasure pm{{Atom{1.0, 1.0}, Atom{Angle::reduce(-1.0), -1.0}}, std::nullopt};
    CHECK(std::fabs(convolve_measure_point(pk, r, pm, 0.0)) < 1e-15);

    // total variation combines atoms and density
    SignedMeasure mixed{{Atom{0.5, -2.0}}, GridFunction(128, 0.25)};
    CHECK(mixed.total_variation() == doctest::Approx(2.0 + 0.25 * two_pi));
}
