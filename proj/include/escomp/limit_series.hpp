#ifndef ESCOMP_LIMIT_SERIES_HPP
#define ESCOMP_LIMIT_SERIES_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "escomp/bounded.hpp"
#include "escomp/map.hpp"

namespace escomp {

/// Uniform bound over W_R for both limit sums
///   k1 = sum_{j>=1} a^-j f(z_{2j-1}),   k2 = sum_{j>=1} a^-j f(z_{2j-2}):
/// sup_{Re z > R} |f| * sum_{j>=1} a^{-j/2} = f_sup_bound / (sqrt(a) - 1).
/// The half-step geometric ratio absorbs the parity mixing of the orbit
/// indices, so one constant bounds both sums.
inline double delta_bound(const MapSpec& m, double R) {
    require_admissible(m, R);
    return f_sup_bound(m, R) / (std::sqrt(m.a) - 1.0);
}

/// Certified bound on the tail |sum_{j>N} a^-j f(z_...)| for orbits starting
/// anywhere in W_R, both parities: f_sup * a^-N / (a-1). Exact geometric
/// ratio 1/a, tighter than the sqrt(a) mixed bound used for delta_bound.
inline double tail_bound(const MapSpec& m, double R, std::size_t N) {
    require_admissible(m, R);
    return f_sup_bound(m, R) * std::pow(m.a, -static_cast<double>(N)) / (m.a - 1.0);
}

inline void require_in_region(const Point& p, double R) {
    if (!in_region(p, Region{R}))
        throw std::domain_error("point is outside W_R; series certification needs the invariant region");
}

namespace detail {
// Partial sums to j = N over a precomputed orbit (needs z up to index
// 2N-1 for parity 1 and 2N-2 for parity 0). Orbit points past truncation
// would only contribute underflowed-to-zero terms.
inline cplx partial_k(const MapSpec& m, const Orbit& o, std::size_t N, int parity) {
    cplx sum{0.0, 0.0};
    double aj = 1.0;
    for (std::size_t j = 1; j <= N; ++j) {
        aj /= m.a;
        const std::size_t idx = 2 * j - (parity ? 1 : 2);
        if (idx >= o.points.size()) break;
        sum += aj * f_eval(m, o.points[idx].z);
    }
    return sum;
}
} // namespace detail

/// Truncated limit sums (k1, k2) with the certified tail radius attached.
inline std::pair<Bounded, Bounded> k_sums(const MapSpec& m, const Point& p, double R, std::size_t N) {
    require_admissible(m, R);
    require_in_region(p, R);
    const Orbit o = iterate_orbit(m, p, N == 0 ? 0 : 2 * N - 1);
    const double tail = tail_bound(m, R, N);
    return {Bounded{detail::partial_k(m, o, N, 1), tail},
            Bounded{detail::partial_k(m, o, N, 0), tail}};
}

/// The two limit ratios with certified radii. h1 is the limit of the even
/// iterate ratios z_2n/w_2n, h2 of the odd ones; h1*h2 == a identically.
struct LimitPair {
    Bounded h1;
    Bounded h2;
    std::size_t n_used = 0;
};

/// Evaluate h1 = (z0 + k1)/(w0 + k2) and, independently, the odd-parity form
/// h2 = a (w0 + k2')/(z0 + k1) where k2' carries one extra term. The
/// truncation order doubles from 8 until both propagated quotient radii are
/// within tol (cap 10^4). The agreement of h2 with a/h1 is a correctness
/// check, not a definition.
inline LimitPair limit_pair(const MapSpec& m, const Point& p, double R, double tol) {
    if (!(tol > 0.0)) throw std::domain_error("limit_pair: requires tol > 0");
    require_admissible(m, R);
    require_in_region(p, R);
    bool denominator_uncertified = false;
    for (std::size_t N = 8; N <= 10000; N *= 2) {
        const Orbit o = iterate_orbit(m, p, 2 * N);
        const double tail = tail_bound(m, R, N);
        const Bounded k1{detail::partial_k(m, o, N, 1), tail};
        const Bounded k2{detail::partial_k(m, o, N, 0), tail};
        const Bounded k2x{detail::partial_k(m, o, N + 1, 0), tail_bound(m, R, N + 1)};
        const Bounded num1 = p.z + k1;
        const Bounded den1 = p.w + k2;
        const Bounded h1 = num1 / den1;
        const Bounded h2 = (m.a * (p.w + k2x)) / num1;
        if (!h1.ok || !h2.ok) {
            denominator_uncertified = true;
            continue; // radii shrink with N; retry before giving up
        }
        if (h1.err <= tol && h2.err <= tol) return {h1, h2, N};
    }
    if (denominator_uncertified)
        throw std::domain_error("limit_pair: denominator not certifiably nonzero");
    throw std::runtime_error("limit_pair: tolerance unreachable");
}

/// Ratios z_k/w_k for k = 0..n; sentinel entries where w_k == 0 or past an
/// orbit overflow.
inline std::vector<cplx> ratio_sequence(const MapSpec& m, const Point& p, std::size_t n) {
    const Orbit o = iterate_orbit(m, p, n);
    std::vector<cplx> r(n + 1, overflow_value());
    for (std::size_t k = 0; k < o.points.size(); ++k) r[k] = o.ratio(k);
    return r;
}

} // namespace escomp

#endif
