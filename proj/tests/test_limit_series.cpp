#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "escomp/bounded.hpp"
#include "escomp/limit_series.hpp"
#include "escomp/map.hpp"
#include "escomp/rng.hpp"

using namespace escomp;
using Catch::Approx;

namespace {
MapSpec exp_map(double a = 2.0) { return make_map(a, {{1.0, 1.0}}); }
MapSpec linear_map(double a = 2.0) { return make_map(a, {}); }

// Independent long-sum oracle: iterate the map in extended precision with its
// own loop and sum `terms` series coefficients directly.
std::pair<std::complex<long double>, std::complex<long double>> k_oracle(const MapSpec& m, Point p,
                                                                          int terms) {
    using lcplx = std::complex<long double>;
    const long double a = m.a;
    lcplx z = p.z, w = p.w;
    const auto f = [&](lcplx v) {
        lcplx s{0.0L, 0.0L};
        for (const auto& t : m.f_terms)
            s += static_cast<long double>(t.amp) * std::exp(-static_cast<long double>(t.rate) * v);
        return s;
    };
    lcplx k1{0.0L, 0.0L}, k2{0.0L, 0.0L};
    long double aj = 1.0L;
    // z_n indexing: k1 takes odd indices 2j-1, k2 even indices 2j-2
    std::vector<lcplx> zs{z};
    for (int n = 0; n < 2 * terms; ++n) {
        const lcplx zn = a * w + f(z);
        w = z;
        z = zn;
        zs.push_back(z);
    }
    for (int j = 1; j <= terms; ++j) {
        aj /= a;
        k1 += aj * f(zs[2 * j - 1]);
        k2 += aj * f(zs[2 * j - 2]);
    }
    return {k1, k2};
}
} // namespace

TEST_CASE("Bounded arithmetic propagates radii conservatively") {
    Rng rng(41);
    for (int i = 0; i < 300; ++i) {
        const cplx x{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        const cplx y{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        const double ex = rng.uniform(0.0, 0.1), ey = rng.uniform(0.0, 0.1);
        const double phix = rng.uniform(0.0, 6.28), phiy = rng.uniform(0.0, 6.28);
        const cplx px = ex * rng.next_unit() * cplx{std::cos(phix), std::sin(phix)};
        const cplx py = ey * rng.next_unit() * cplx{std::cos(phiy), std::sin(phiy)};
        const Bounded bx{x, ex}, by{y, ey};

        CHECK(std::abs((x + px) + (y + py) - (bx + by).value) <= (bx + by).err + 1e-14);
        CHECK(std::abs((x + px) * (y + py) - (bx * by).value) <= (bx * by).err + 1e-14);
        const Bounded q = bx / by;
        if (q.ok) CHECK(std::abs((x + px) / (y + py) - q.value) <= q.err * (1.0 + 1e-12) + 1e-14);
    }
    SECTION("quotient by a possibly-zero denominator is invalid") {
        const Bounded q = Bounded{cplx{1.0, 0.0}, 0.0} / Bounded{cplx{0.5, 0.0}, 0.6};
        CHECK_FALSE(q.ok);
        CHECK_FALSE((Bounded::invalid() + Bounded{cplx{1, 0}, 0.0}).ok);
    }
}

TEST_CASE("delta_bound closed forms") {
    CHECK(delta_bound(make_map(4.0, {}), 1.0) == 0.0);
    CHECK(delta_bound(make_map(4.0, {{1.0, 1.0}}), 5.0) == Approx(std::exp(-5.0)).epsilon(1e-15));
    CHECK(delta_bound(exp_map(), 5.0) ==
          Approx(std::exp(-5.0) / (std::sqrt(2.0) - 1.0)).epsilon(1e-15));
    CHECK(delta_bound(exp_map(), 5.0) == Approx(0.016266843027743231).epsilon(1e-14));
    CHECK_THROWS_AS(delta_bound(exp_map(), 0.1), std::domain_error); // not admissible
}

TEST_CASE("tail_bound is the exact geometric tail") {
    CHECK(tail_bound(exp_map(), 5.0, 0) == Approx(std::exp(-5.0)).epsilon(1e-15));
    for (std::size_t n = 0; n < 20; ++n) CHECK(tail_bound(linear_map(), 1.0, n) == 0.0);
    for (std::size_t n = 0; n < 30; ++n)
        CHECK(tail_bound(exp_map(), 5.0, n + 1) == Approx(0.5 * tail_bound(exp_map(), 5.0, n)).epsilon(1e-15));
}

TEST_CASE("k_sums partial sums against the long-sum oracle") {
    const MapSpec m = exp_map();
    const Point p{{5.0, 0.0}, {5.0, 0.0}};

    SECTION("linear map sums vanish with zero radius") {
        const auto [k1, k2] = k_sums(linear_map(), {{4.0, 0.0}, {2.0, 0.0}}, 1.0, 20);
        CHECK(k1.value == cplx{0.0, 0.0});
        CHECK(k2.value == cplx{0.0, 0.0});
        CHECK(k1.err == 0.0);
        CHECK(k2.err == 0.0);
    }
    SECTION("first k2 term is a^-1 f(z_0)") {
        const auto [k1, k2] = k_sums(m, p, 4.9, 1);
        CHECK(k2.value.real() == Approx(0.5 * std::exp(-5.0)).epsilon(1e-15));
        CHECK(k2.value.imag() == 0.0);
    }
    SECTION("N = 30 matches a 200-term extended-precision sum within the tail radius") {
        const auto [k1, k2] = k_sums(m, p, 4.9, 30);
        const auto [o1, o2] = k_oracle(m, p, 200);
        CHECK(std::abs(k1.value - cplx{static_cast<double>(o1.real()), static_cast<double>(o1.imag())}) <=
              tail_bound(m, 4.9, 30));
        CHECK(std::abs(k2.value - cplx{static_cast<double>(o2.real()), static_cast<double>(o2.imag())}) <=
              tail_bound(m, 4.9, 30));
        CHECK(k1.err == tail_bound(m, 4.9, 30));
        CHECK(k2.err == tail_bound(m, 4.9, 30));
    }
    SECTION("outside W_R is rejected") {
        CHECK_THROWS_AS(k_sums(m, {{4.0, 0.0}, {6.0, 0.0}}, 5.0, 8), std::domain_error);
    }
}

TEST_CASE("certification soundness: longer truncations stay inside the radius") {
    const MapSpec m = exp_map();
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const Point p = sample_region_box(rng, 5.0, 10.0, 10.0);
        const auto [s1, s2] = k_sums(m, p, 5.0, 12);
        const auto [l1, l2] = k_sums(m, p, 5.0, 120);
        CHECK(std::abs(l1.value - s1.value) <= s1.err);
        CHECK(std::abs(l2.value - s2.value) <= s2.err);
    }
}

TEST_CASE("limit_pair") {
    const MapSpec m = exp_map();
    SECTION("linear case is exact") {
        const LimitPair lp = limit_pair(linear_map(), {{4.0, 0.0}, {2.0, 0.0}}, 1.0, 1e-12);
        CHECK(lp.h1.value == cplx{2.0, 0.0});
        CHECK(lp.h1.err == 0.0);
        CHECK(lp.h2.value == cplx{1.0, 0.0});
        CHECK(lp.h2.err == 0.0);
    }
    SECTION("product identity h1 h2 = a within the propagated radius") {
        Rng rng(5);
        for (int i = 0; i < 200; ++i) {
            const Point p = sample_region_box(rng, 5.0, 10.0, 10.0);
            const LimitPair lp = limit_pair(m, p, 5.0, 1e-10);
            const Bounded prod = lp.h1 * lp.h2;
            CHECK(std::abs(prod.value - cplx{2.0, 0.0}) <= prod.err);
            CHECK(std::abs(prod.value - cplx{2.0, 0.0}) <= 1e-9);
            // h2 agrees with a / h1 within the radii
            const Bounded alt = Bounded{cplx{2.0, 0.0}, 0.0} / lp.h1;
            CHECK(std::abs(alt.value - lp.h2.value) <= alt.err + lp.h2.err + 1e-14);
        }
    }
    SECTION("iterate-ratio oracle at n = 50") {
        const Point p{{5.0, 0.0}, {5.0, 1.0}};
        const LimitPair lp = limit_pair(m, p, 4.9, 1e-10);
        const Orbit o = iterate_orbit(m, p, 101);
        CHECK(std::abs(o.ratio(100) - lp.h1.value) <= lp.h1.err + 1e-8);
        CHECK(std::abs(o.ratio(101) - lp.h2.value) <= lp.h2.err + 1e-8);
    }
    SECTION("requested radius is honored") {
        const LimitPair lp = limit_pair(m, {{5.0, 0.0}, {5.0, 0.0}}, 4.9, 1e-10);
        CHECK(lp.h1.err <= 1e-10);
        CHECK(lp.h2.err <= 1e-10);
        CHECK(lp.n_used >= 8);
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(limit_pair(m, {{4.0, 0.0}, {6.0, 0.0}}, 5.0, 1e-10), std::domain_error);
        CHECK_THROWS_AS(limit_pair(m, {{6.0, 0.0}, {6.0, 0.0}}, 5.0, 0.0), std::domain_error);
        // a barely above 1: the geometric tail cannot reach 1e-12 within the
        // truncation cap
        const MapSpec slow = make_map(1.0001, {{1.0, 1.0}});
        REQUIRE(is_admissible(slow, 15.0, 0.0));
        CHECK_THROWS_AS(limit_pair(slow, {{16.0, 0.0}, {16.0, 0.0}}, 15.0, 1e-12),
                        std::runtime_error);
    }
}

TEST_CASE("ratio_sequence") {
    SECTION("linear ratios alternate between h1 and h2 exactly") {
        const auto r = ratio_sequence(linear_map(), {{4.0, 0.0}, {2.0, 0.0}}, 11);
        for (std::size_t k = 0; k <= 11; ++k)
            CHECK(r[k] == (k % 2 == 0 ? cplx{2.0, 0.0} : cplx{1.0, 0.0}));
    }
    SECTION("even subsequence is Cauchy with geometric gap") {
        const auto r = ratio_sequence(exp_map(), {{5.0, 0.0}, {5.0, 0.0}}, 62);
        for (std::size_t n = 0; 2 * n + 2 <= 40; ++n)
            CHECK(std::abs(r[2 * n + 2] - r[2 * n]) <= 1.0 * std::pow(2.0, -static_cast<double>(n)));
        // odd-limit times even-limit converges to a
        CHECK(std::abs(r[60] * r[61] - cplx{2.0, 0.0}) <= 1e-8);
    }
    SECTION("sentinel where w = 0") {
        const auto r = ratio_sequence(linear_map(), {{1.0, 0.0}, {0.0, 0.0}}, 1);
        CHECK_FALSE(is_finite(r[0]));
        CHECK(is_finite(r[1])); // w_1 = z_0 = 1
    }
}

TEST_CASE("limit functions separate points and parities") {
    const MapSpec m = exp_map();
    const double R = 5.0;
    const double D = delta_bound(m, R);
    SECTION("nonconstancy across a 10-delta shift") {
        const Point p{{5.5, 0.5}, {5.5, -0.5}};
        const Point q{{5.5 + 10.0 * D, 0.5}, {5.5, -0.5}};
        const LimitPair lp = limit_pair(m, p, R, 1e-10);
        const LimitPair lq = limit_pair(m, q, R, 1e-10);
        CHECK(std::abs(lp.h1.value - lq.h1.value) > 2.0 * (lp.h1.err + lq.h1.err));
    }
    SECTION("the two limits are distinct at generic points") {
        const LimitPair lp = limit_pair(m, {{5.5, 0.0}, {5.5, 0.0}}, R, 1e-10);
        CHECK(std::abs(lp.h1.value - lp.h2.value) > lp.h1.err + lp.h2.err);
    }
}
