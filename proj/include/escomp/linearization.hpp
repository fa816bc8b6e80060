#ifndef ESCOMP_LINEARIZATION_HPP
#define ESCOMP_LINEARIZATION_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "escomp/bounded.hpp"
#include "escomp/certificate.hpp"
#include "escomp/limit_series.hpp"
#include "escomp/map.hpp"
#include "escomp/rng.hpp"

namespace escomp {

/// L^n for the linear model L(z,w) = (aw, z), any integer n, in closed
/// parity-split form (no iteration):
///   n even:  (a^{n/2} z, a^{n/2} w)
///   n odd:   (a^{(n+1)/2} w, a^{(n-1)/2} z)
inline Point linear_apply(double a, const Point& p, long long n) {
    if (!p.valid()) return Point::overflow();
    cplx z1, w1;
    if (n % 2 == 0) {
        const double s = std::pow(a, static_cast<double>(n / 2));
        z1 = s * p.z;
        w1 = s * p.w;
    } else {
        z1 = std::pow(a, static_cast<double>((n + 1) / 2)) * p.w;
        w1 = std::pow(a, static_cast<double>((n - 1) / 2)) * p.z;
    }
    if (!is_finite(z1) || !is_finite(w1)) return Point::overflow();
    return {z1, w1};
}

/// phi_n = L^-n compose F^n, evaluated through the explicit partial-sum form
///   phi_2k(z,w)   = (z + sum_{j<=k} a^-j f(z_{2j-1}), w + sum_{j<=k} a^-j f(z_{2j-2}))
///   phi_2k+1(z,w) = (z + sum_{j<=k} a^-j f(z_{2j-1}), w + sum_{j<=k+1} a^-j f(z_{2j-2}))
/// rather than by composing the two maps numerically; the two routes agreeing
/// is itself a library test.
inline Point phi_n(const MapSpec& m, const Point& p, std::size_t n) {
    if (!p.valid()) return Point::overflow();
    const std::size_t k = n / 2;
    const std::size_t kw = (n % 2 == 0) ? k : k + 1;
    const Orbit o = iterate_orbit(m, p, n == 0 ? 0 : n - 1);
    const cplx z1 = p.z + detail::partial_k(m, o, k, 1);
    const cplx w1 = p.w + detail::partial_k(m, o, kw, 0);
    if (!is_finite(z1) || !is_finite(w1)) return Point::overflow();
    return {z1, w1};
}

/// Limit conjugacy phi = lim L^-n F^n with certified coordinate radii.
/// `extension_depth` is the number of forward steps taken before the orbit
/// entered W_R (0 when the input already lies there): outside W_R the value
/// is L^-k(phi(F^k(P))), with the radii scaled exactly by the same powers.
struct ConjugacyResult {
    Bounded z;
    Bounded w;
    std::size_t n_used = 0;
    std::size_t extension_depth = 0;

    Point value() const { return {z.value, w.value}; }
};

namespace detail {
inline std::size_t series_order_for(const MapSpec& m, double R, double tol) {
    for (std::size_t N = 8; N <= 10000; N *= 2)
        if (tail_bound(m, R, N) <= tol) return N;
    throw std::runtime_error("phi: tolerance unreachable");
}
} // namespace detail

inline ConjugacyResult phi(const MapSpec& m, const Point& p, double R, double tol,
                           std::size_t entry_n_max = 256) {
    if (!(tol > 0.0)) throw std::domain_error("phi: requires tol > 0");
    require_admissible(m, R);
    // Minimal k with F^k(P) in W_R, found by forward search: the absorbing
    // set has no finite backward description.
    Point q = p;
    std::size_t depth = 0;
    const Region W{R};
    while (!in_region(q, W)) {
        if (depth == entry_n_max || !q.valid())
            throw std::domain_error("phi: not in absorbing set within n_max");
        q = apply(m, q);
        ++depth;
    }
    const std::size_t N = m.linear() ? 0 : detail::series_order_for(m, R, tol);
    const Orbit o = iterate_orbit(m, q, N == 0 ? 0 : 2 * N - 1);
    const double tail = m.linear() ? 0.0 : tail_bound(m, R, N);
    Bounded bz{q.z + detail::partial_k(m, o, N, 1), tail};
    Bounded bw{q.w + detail::partial_k(m, o, N, 0), tail};
    if (depth > 0) {
        const long long n = static_cast<long long>(depth);
        const Point scaled = linear_apply(m.a, {bz.value, bw.value}, -n);
        if (n % 2 == 0) {
            const double s = std::pow(m.a, -static_cast<double>(n / 2));
            bz = Bounded{scaled.z, bz.err * s};
            bw = Bounded{scaled.w, bw.err * s};
        } else {
            const double sz = std::pow(m.a, -static_cast<double>((n - 1) / 2));
            const double sw = std::pow(m.a, -static_cast<double>((n + 1) / 2));
            // odd L^-n swaps coordinates, so the radii swap with them
            const double ez = bw.err * sz;
            const double ew = bz.err * sw;
            bz = Bounded{scaled.z, ez};
            bw = Bounded{scaled.w, ew};
        }
    }
    return {bz, bw, N, depth};
}

/// || phi(F(P)) - L(phi(P)) ||, the functional-equation residual. Zero for
/// the exact conjugacy; numerically bounded by the two certified radii.
inline double conjugacy_residual(const MapSpec& m, const Point& p, double R, double tol) {
    const ConjugacyResult lhs = phi(m, apply(m, p), R, tol);
    const ConjugacyResult rhs = phi(m, p, R, tol);
    const Point lp = linear_apply(m.a, rhs.value(), 1);
    return distance(lhs.value(), lp);
}

/// Checks the two-sided sandwich W_{R+D} subset phi(W_R) subset W_{R-D} with
/// D = delta_bound(m, R):
///  - forward half: sampled P in W_R must land with both certified disks of
///    phi(P) strictly right of R - D;
///  - surjective half: for sampled targets Q in W_{R+D} the fixed-point
///    iteration P <- Q - (k1(P), k2(P)) must converge to a preimage inside
///    W_R (the correction is a D-contraction, so convergence is geometric).
inline Certificate sandwich_phi_w(const MapSpec& m, double R, std::size_t samples,
                                  std::uint64_t seed = 1, double tol = 1e-12) {
    require_admissible(m, R);
    const double D = delta_bound(m, R);
    if (!(R > D)) throw std::domain_error("sandwich_phi_w: requires R > delta_bound");

    Certificate cert;
    cert.type = "sandwich";
    cert.map = m;
    cert.params = {{"R", R}, {"delta_bound", D}, {"tol", tol}};
    cert.samples = samples;
    cert.seed = seed;

    Rng rng(seed);
    const std::size_t N = m.linear() ? 0 : detail::series_order_for(m, R, tol);
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t max_fp_steps = 0;
    double max_solve_residual = 0.0;
    bool ok = true;

    for (std::size_t i = 0; i < samples; ++i) {
        const Point p = sample_region_box(rng, R, 10.0, 10.0);
        const ConjugacyResult cr = phi(m, p, R, tol);
        const double margin = std::min(cr.z.value.real() - cr.z.err, cr.w.value.real() - cr.w.err) - (R - D);
        min_margin = std::min(min_margin, margin);
        if (!(margin > 0.0)) {
            ok = false;
            if (cert.counterexamples.size() < 8) cert.counterexamples.push_back(p);
        }
    }

    for (std::size_t i = 0; i < samples; ++i) {
        const Point q = sample_region_box(rng, R + D, 10.0, 10.0);
        Point cur = q;
        std::size_t steps = 0;
        bool converged = false;
        while (steps < 64) {
            const auto [k1, k2] = k_sums(m, cur, R, N);
            const Point next{q.z - k1.value, q.w - k2.value};
            ++steps;
            const double move = distance(next, cur);
            cur = next;
            if (move <= 1e-12) {
                converged = true;
                break;
            }
        }
        max_fp_steps = std::max(max_fp_steps, steps);
        const ConjugacyResult back = phi(m, cur, R, tol);
        const double residual = distance(back.value(), q);
        max_solve_residual = std::max(max_solve_residual, residual);
        if (!converged || !in_region(cur, Region{R}) ||
            residual > back.z.err + back.w.err + 1e-10) {
            ok = false;
            if (cert.counterexamples.size() < 8) cert.counterexamples.push_back(q);
        }
    }

    cert.values = {{"min_forward_margin", min_margin},
                   {"max_fixed_point_steps", static_cast<double>(max_fp_steps)},
                   {"max_solve_residual", max_solve_residual}};
    cert.verdict = ok ? Verdict::pass : Verdict::fail;
    return cert;
}

} // namespace escomp

#endif
