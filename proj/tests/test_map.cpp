#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "escomp/map.hpp"
#include "escomp/rng.hpp"

using namespace escomp;
using Catch::Approx;

namespace {
MapSpec exp_map(double a = 2.0) { return make_map(a, {{1.0, 1.0}}); }
MapSpec linear_map(double a = 2.0) { return make_map(a, {}); }
} // namespace

TEST_CASE("make_map validates the catalog") {
    const MapSpec m = exp_map();
    CHECK(m.theorem_hypotheses_met());
    CHECK(linear_map().theorem_hypotheses_met() == false);
    CHECK_THROWS_AS(make_map(1.0, {{1.0, 1.0}}), std::domain_error);
    CHECK_THROWS_AS(make_map(0.5, {}), std::domain_error);
    CHECK_THROWS_AS(make_map(2.0, {{-1.0, 1.0}}), std::domain_error);
    CHECK_THROWS_AS(make_map(2.0, {{1.0, 0.0}}), std::domain_error);
}

TEST_CASE("f_eval on the exponential catalog") {
    const MapSpec m = exp_map();
    CHECK(f_eval(m, {0.0, 0.0}) == cplx{1.0, 0.0});
    // oracle: high-precision e^-5 = 0.00673794699908546709663604842...
    CHECK(f_eval(m, {5.0, 0.0}).real() == Approx(0.0067379469990854671).epsilon(1e-15));
    CHECK(f_eval(linear_map(), {123.0, -4.0}) == cplx{0.0, 0.0});
    // oscillation: e^{-(x+iy)} = e^-x (cos y - i sin y)
    const cplx v = f_eval(m, {1.0, 3.14159265358979323846});
    CHECK(v.real() == Approx(-std::exp(-1.0)).margin(1e-15));
    // deep left half-plane overflows to the sentinel, not to inf
    CHECK_FALSE(is_finite(f_eval(m, {-1e6, 0.0})));
}

TEST_CASE("f_sup_bound certifies the half-plane sup") {
    CHECK(f_sup_bound(exp_map(), 5.0) == Approx(std::exp(-5.0)).epsilon(1e-15));
    CHECK(f_sup_bound(linear_map(), -100.0) == 0.0);
    const MapSpec two = make_map(2.0, {{2.0, 1.0}, {1.0, 3.0}});
    // direct sum oracle: 2 e^-1 + e^-3 = 0.78554595071074859
    CHECK(f_sup_bound(two, 1.0) == Approx(2.0 * std::exp(-1.0) + std::exp(-3.0)).epsilon(1e-15));
    CHECK(f_sup_bound(two, 1.0) == Approx(0.78554595071074859).epsilon(1e-15));

    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double r1 = rng.uniform(-5.0, 20.0);
        const double r2 = r1 + rng.uniform(0.0, 10.0);
        CHECK(f_sup_bound(two, r2) <= f_sup_bound(two, r1));
    }
    // sampled |f| never exceeds the bound on its half-plane
    for (int i = 0; i < 500; ++i) {
        const double R = rng.uniform(-2.0, 10.0);
        const cplx z{R + rng.uniform(1e-12, 30.0), rng.uniform(-50.0, 50.0)};
        CHECK(std::abs(f_eval(two, z)) <= f_sup_bound(two, R) * (1.0 + 1e-15));
    }
}

TEST_CASE("apply matches the closed form") {
    const MapSpec m = exp_map();
    const Point q = apply(m, {{5.0, 0.0}, {5.0, 0.0}});
    CHECK(q.z.real() == Approx(10.0 + std::exp(-5.0)).epsilon(1e-16));
    CHECK(q.z.imag() == 0.0);
    CHECK(q.w == cplx{5.0, 0.0});

    const Point lin = apply(linear_map(), {{1.0, 2.0}, {3.0, -4.0}});
    CHECK(lin.z == cplx{6.0, -8.0});
    CHECK(lin.w == cplx{1.0, 2.0});
}

TEST_CASE("apply_inverse inverts apply") {
    const MapSpec m = exp_map();
    CHECK(apply_inverse(linear_map(), {{6.0, -8.0}, {1.0, 2.0}}).w == cplx{3.0, -4.0});

    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        // right-of-axis samples keep |f| of the same scale as the point, so
        // the algebraic cancellation in the inverse is benign
        const Point p{{rng.uniform(0.0, 1e6), rng.uniform(-1e6, 1e6)},
                      {rng.uniform(0.0, 1e6), rng.uniform(-1e6, 1e6)}};
        const Point back = apply_inverse(m, apply(m, p));
        CHECK(distance(back, p) <= 1e-12 * (1.0 + norm(p)));
    }

    // k-fold composition F^-k after F^k
    Point p{{6.0, 0.0}, {7.0, 0.0}};
    const Point round = apply_inverse_n(m, apply_n(m, p, 10), 10);
    CHECK(distance(round, p) < 1e-9);
}

TEST_CASE("iterate_orbit") {
    const MapSpec m = exp_map();
    SECTION("n = 0 is the bare starting point") {
        const Orbit o = iterate_orbit(m, {{5.0, 1.0}, {4.0, 2.0}}, 0);
        REQUIRE(o.size() == 1);
        CHECK_FALSE(o.stop_index.has_value());
    }
    SECTION("linear z-recursion z_{n+1} = 2 z_{n-1}") {
        const Orbit o = iterate_orbit(linear_map(), {{1.0, 0.0}, {1.0, 0.0}}, 4);
        REQUIRE(o.size() == 5);
        const double expect[] = {1.0, 2.0, 2.0, 4.0, 4.0};
        for (std::size_t n = 0; n < 5; ++n) CHECK(o.re_z(n) == expect[n]);
    }
    SECTION("second coordinate is the shift of the first, bitwise") {
        const Orbit o = iterate_orbit(m, {{5.0, 3.0}, {5.0, -2.0}}, 40);
        REQUIRE(o.size() == 41);
        for (std::size_t n = 0; n + 1 < o.size(); ++n)
            CHECK(o.points[n + 1].w == o.points[n].z);
    }
    SECTION("overflow truncates with a recorded stop index") {
        // alternating blow-up through f: e^{-z} with Re z very negative
        const Orbit o = iterate_orbit(m, {{-300.0, 0.0}, {-300.0, 0.0}}, 50);
        REQUIRE(o.stop_index.has_value());
        CHECK(o.size() == *o.stop_index + 1);
        CHECK(o.size() < 51);
        for (const Point& p : o.points) CHECK(p.valid());
    }
}

TEST_CASE("in_region is strict and ignores imaginary parts") {
    const Region W{5.0};
    CHECK(in_region({{6.0, 0.0}, {6.0, 0.0}}, W));
    CHECK_FALSE(in_region({{5.0, 0.0}, {6.0, 0.0}}, W));
    CHECK(in_region({{6.0, 10.0}, {5.0001, 0.0}}, W));
    CHECK_FALSE(in_region(Point::overflow(), W));
    CHECK_THROWS_AS(Region{0.0}, std::domain_error);
}

TEST_CASE("admissible_R solves the invariance inequality") {
    SECTION("linear case has the closed form eps/(a-1)") {
        CHECK(admissible_R(linear_map(), 0.1) == Approx(0.1).margin(2e-9));
        CHECK(admissible_R(linear_map(4.0), 0.3) == Approx(0.1).margin(2e-9));
    }
    SECTION("exponential case matches the bisection oracle") {
        const double R = admissible_R(exp_map(), 0.1);
        // oracle: root of g(R) = R - 0.1 - e^-R, solved independently to
        // 30 digits: R* = 0.63169161977901768...
        CHECK(R == Approx(0.63169161977901768).margin(2e-9));
        CHECK(std::abs(std::exp(-R) - (R - 0.1)) < 1e-8);
        CHECK(is_admissible(exp_map(), R, 0.1));
        // monotonicity: anything larger is admissible too
        CHECK(is_admissible(exp_map(), R + 0.5, 0.1));
        CHECK(is_admissible(exp_map(), 5.0, 0.1)); // e^-5 < 4.9
        CHECK_FALSE(is_admissible(exp_map(), R - 1e-3, 0.1));
    }
    SECTION("bracket extension covers a close to 1") {
        const MapSpec slow = make_map(1.05, {});
        CHECK(admissible_R(slow, 2.0) == Approx(40.0).margin(2e-9));
    }
    CHECK_THROWS_AS(admissible_R(exp_map(), 0.0), std::domain_error);
}

TEST_CASE("forward invariance of W_R with escape margin") {
    struct Config {
        MapSpec m;
        double R, eps;
    };
    const Config configs[] = {{exp_map(), 5.0, 0.1},
                              {make_map(3.0, {{2.0, 1.0}, {1.0, 3.0}}), 2.0, 0.2},
                              {linear_map(), 1.0, 0.5}};
    for (const auto& cfg : configs) {
        REQUIRE(is_admissible(cfg.m, cfg.R, cfg.eps));
        Rng rng(99);
        for (int i = 0; i < 1000; ++i) {
            const Point p = sample_region_box(rng, cfg.R, 1e3, 1e3);
            REQUIRE(in_region(p, Region{cfg.R}));
            const Point q = apply(cfg.m, p);
            CHECK(in_region(q, Region{cfg.R}));
            CHECK(q.z.real() > cfg.R + cfg.eps);
        }
    }
}

TEST_CASE("escape is monotone along parity strands") {
    // Re z_{n+2} = a Re z_n + Re f(z_{n+1}) > Re z_n + eps in W_R; consecutive
    // indices interleave two geometric strands and need not be ordered.
    const MapSpec m = exp_map();
    const double R = 5.0, eps = 0.1;
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Point p = sample_region_box(rng, R, 10.0, 10.0);
        const Orbit o = iterate_orbit(m, p, 80);
        REQUIRE(o.size() == 81);
        for (std::size_t n = 0; n + 2 < o.size(); ++n)
            CHECK(o.re_z(n + 2) > o.re_z(n) + eps);
        CHECK(o.re_z(80) > 1e6); // -> infinity witness
    }
}

TEST_CASE("linear oracle for the iterates") {
    const MapSpec m = linear_map();
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        const Point p{{rng.uniform(-9.0, 9.0), rng.uniform(-9.0, 9.0)},
                      {rng.uniform(-9.0, 9.0), rng.uniform(-9.0, 9.0)}};
        const Orbit o = iterate_orbit(m, p, 41);
        for (std::size_t n = 0; 2 * n + 1 < o.size(); ++n) {
            const double s = std::pow(2.0, static_cast<double>(n));
            CHECK(std::abs(o.points[2 * n].z - s * p.z) <= 1e-12 * s * std::abs(p.z));
            CHECK(std::abs(o.points[2 * n + 1].z - 2.0 * s * p.w) <= 1e-12 * 2.0 * s * std::abs(p.w));
        }
    }
}

TEST_CASE("map spec string round trip is lossless") {
    const MapSpec awkward = make_map(2.0000000000000004, {{0.1, 3.0000000000000004}, {1.0 / 3.0, 7.25}});
    const MapSpec parsed = map_from_string(format_map(awkward));
    CHECK(parsed.a == awkward.a);
    REQUIRE(parsed.f_terms.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(parsed.f_terms[i].amp == awkward.f_terms[i].amp);
        CHECK(parsed.f_terms[i].rate == awkward.f_terms[i].rate);
    }

    CHECK(format_map(linear_map()) == "a=2;f=0");
    CHECK(map_from_string("a=2;f=0").linear());
    CHECK(map_from_string("a=2;f=1,1").f_terms.size() == 1);
    CHECK(map_from_string("a=2.5;f=1,1+0.5,3").f_terms.size() == 2);

    CHECK_THROWS_AS(map_from_string("a=2"), std::invalid_argument);
    CHECK_THROWS_AS(map_from_string("b=2;f=0"), std::invalid_argument);
    CHECK_THROWS_AS(map_from_string("a=2;f=1"), std::invalid_argument);
    CHECK_THROWS_AS(map_from_string("a=2;f=1,1,1"), std::invalid_argument);
    CHECK_THROWS_AS(map_from_string("a=x;f=0"), std::invalid_argument);
    CHECK_THROWS_AS(map_from_string("a=1;f=1,1"), std::domain_error); // parses, fails validation
}
