#ifndef ESCOMP_CERTIFICATION_HPP
#define ESCOMP_CERTIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "escomp/certificate.hpp"
#include "escomp/limit_series.hpp"
#include "escomp/map.hpp"
#include "escomp/rng.hpp"

namespace escomp {

// ---------------------------------------------------------------------------
// Growth sandwich: log ||F^n(P)|| / n must settle into the band
// [log(m - eps), log(M + eps)] built from the sampled limit moduli, and the
// per-step ratios |z_n / z_{n-1}| into [m - eps, M + eps].

struct GrowthReport {
    double m_min = 0.0;   // min over samples of min(|h1|, |h2|)
    double M_max = 0.0;   // max over samples of max(|h1|, |h2|)
    double eps = 0.0;
    double band_lo = 0.0;
    double band_hi = 0.0;
    std::size_t n0 = 0;   // first index from which every sample's s_n stays in the band
    bool ratios_ok = false;
    Verdict verdict = Verdict::unknown;
    std::vector<std::vector<double>> s; // per sample, s_1..s_n_max
};

inline GrowthReport growth_check(const MapSpec& m, const std::vector<Point>& samples, double R,
                                 std::optional<double> eps_opt, std::size_t n_max) {
    require_admissible(m, R);
    if (samples.empty()) throw std::domain_error("growth_check: needs at least one sample");
    if (n_max < 2) throw std::domain_error("growth_check: needs n_max >= 2");

    GrowthReport rep;
    rep.m_min = std::numeric_limits<double>::infinity();
    rep.M_max = 0.0;
    for (const Point& p : samples) {
        require_in_region(p, R);
        const LimitPair lp = limit_pair(m, p, R, 1e-10);
        // h1 certifiably away from 0 and finite is implied by lp.ok; the
        // moduli feed the band
        const double a1 = std::abs(lp.h1.value);
        const double a2 = std::abs(lp.h2.value);
        rep.m_min = std::min(rep.m_min, std::min(a1, a2));
        rep.M_max = std::max(rep.M_max, std::max(a1, a2));
    }
    rep.eps = eps_opt.value_or(rep.m_min / 10.0);
    if (!(rep.eps > 0.0) || rep.eps >= rep.m_min)
        throw std::domain_error("growth_check: epsilon too large (needs 0 < eps < min |h_i|)");
    rep.band_lo = std::log(rep.m_min - rep.eps);
    rep.band_hi = std::log(rep.M_max + rep.eps);

    std::vector<Orbit> orbits;
    orbits.reserve(samples.size());
    for (const Point& p : samples) orbits.push_back(iterate_orbit(m, p, n_max));

    rep.s.assign(samples.size(), std::vector<double>(n_max, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t i = 0; i < orbits.size(); ++i)
        for (std::size_t n = 1; n < orbits[i].size(); ++n)
            rep.s[i][n - 1] = std::log(orbits[i].norm_at(n)) / static_cast<double>(n);

    // n0: first index from which every sample stays inside the band through
    // n_max. Missing entries (overflow-truncated orbits) cannot certify and
    // count as outside.
    std::size_t n0 = n_max + 1;
    for (std::size_t n = n_max; n >= 1; --n) {
        bool all_in = true;
        for (std::size_t i = 0; i < rep.s.size() && all_in; ++i) {
            const double sn = rep.s[i][n - 1];
            all_in = sn >= rep.band_lo && sn <= rep.band_hi; // NaN fails
        }
        if (!all_in) break;
        n0 = n;
    }
    rep.n0 = n0;

    rep.ratios_ok = n0 <= n_max;
    for (std::size_t i = 0; i < orbits.size() && rep.ratios_ok; ++i)
        for (std::size_t n = std::max<std::size_t>(n0, 1); n < orbits[i].size(); ++n) {
            const double r = std::abs(orbits[i].points[n].z) / std::abs(orbits[i].points[n - 1].z);
            if (!(r >= rep.m_min - rep.eps && r <= rep.M_max + rep.eps)) {
                rep.ratios_ok = false;
                break;
            }
        }

    rep.verdict = (n0 <= n_max / 2 && rep.ratios_ok) ? Verdict::pass : Verdict::fail;
    return rep;
}

// ---------------------------------------------------------------------------
// Forward invariance with escape margin: images of seeded samples of
// W_R (Re <= R + 1e3, |Im| <= 1e3) stay in W_R with Re z_1 > R + eps.

inline Certificate invariance_check(const MapSpec& m, double R, double eps, std::size_t samples,
                                    std::uint64_t seed) {
    if (!(eps > 0.0)) throw std::domain_error("invariance_check: requires eps > 0");
    require_admissible(m, R, eps);

    Certificate cert;
    cert.type = "invariance";
    cert.map = m;
    cert.params = {{"R", R}, {"eps", eps}};
    cert.samples = samples;
    cert.seed = seed;

    Rng rng(seed);
    double min_margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < samples; ++i) {
        const Point p = sample_region_box(rng, R, 1e3, 1e3);
        const Point q = apply(m, p);
        const double margin = q.z.real() - (R + eps);
        min_margin = std::min(min_margin, margin);
        if (!in_region(q, Region{R}) || !(margin > 0.0)) {
            ok = false;
            if (cert.counterexamples.size() < 8) cert.counterexamples.push_back(p);
        }
    }
    cert.values = {{"min_margin", min_margin}};
    cert.verdict = ok ? Verdict::pass : Verdict::fail;
    return cert;
}

// ---------------------------------------------------------------------------
// Disks inside W_R along the complex line L_c = {(cw, w)}.

/// The disk { (c w0, w0) + t (-1, conj(c)) : |t| < delta }, ambient radius
/// sqrt(1+|c|^2) * delta, centered on L_c.
struct DiskSpec {
    cplx c;
    cplx w0;
    double delta = 0.0;

    Point center() const { return {c * w0, w0}; }
    Point at(cplx t) const { return {c * w0 - t, w0 + std::conj(c) * t}; }
    // u in [0,1) walks the boundary circle once, counterclockwise
    Point boundary(double u) const {
        const double th = 2.0 * 3.14159265358979323846 * u;
        return at(delta * cplx{std::cos(th), std::sin(th)});
    }
    double ambient_radius() const { return std::sqrt(1.0 + std::norm(c)) * delta; }
};

/// Largest certified t-radius keeping the disk inside W_R: the minimum of the
/// distances from the center to the two boundary lines {Re z = R},
/// {Re w = R}, measured in the t parameter:
///   min( |Re w0 - R| / |c| , |Re c Re w0 - Im c Im w0 - R| ).
inline double lemma_disk_radius(cplx c, cplx w0, double R) {
    if (c == cplx{0.0, 0.0}) throw std::domain_error("lemma_disk_radius: requires c != 0");
    if (!in_region(Point{c * w0, w0}, Region{R}))
        throw std::domain_error("lemma_disk_radius: center (c w0, w0) must lie in W_R");
    const double d1 = std::abs(w0.real() - R) / std::abs(c);
    const double d2 = std::abs(c.real() * w0.real() - c.imag() * w0.imag() - R);
    return std::min(d1, d2);
}

/// The explicit disk used for the surjectivity certificate:
///   w0 = M+R + i((M+R) Re c - 2M - R)/Im c   when Im c != 0
///   w0 = 2M+R                                 when Im c == 0
///   delta = (M-1) min(|c|, 1/|c|)
/// Throws "M too small" whenever containment in W_R cannot be certified.
/// For Im c = 0 this needs (2M+R)|Re c| - R >= delta, which fails for every
/// M when Re c <= 0: the line L_c does not meet W_R at all, so no disk
/// centered on it exists (negative real targets are genuinely out of reach
/// of this construction).
inline DiskSpec rouche_disk(cplx c, double M, double R) {
    if (c == cplx{0.0, 0.0}) throw std::domain_error("rouche_disk: requires c != 0");
    if (!(M > 1.0)) throw std::domain_error("rouche_disk: requires M > 1");
    DiskSpec d;
    d.c = c;
    if (c.imag() != 0.0)
        d.w0 = cplx{M + R, ((M + R) * c.real() - 2.0 * M - R) / c.imag()};
    else
        d.w0 = cplx{2.0 * M + R, 0.0};
    d.delta = (M - 1.0) * std::min(std::abs(c), 1.0 / std::abs(c));
    if (!in_region(d.center(), Region{R}))
        throw std::domain_error("rouche_disk: M too small (disk center outside W_R)");
    if (d.delta > lemma_disk_radius(c, d.w0, R))
        throw std::domain_error("rouche_disk: M too small (disk exceeds the certified radius)");
    if (c.imag() == 0.0 && (2.0 * M + R) * std::abs(c.real()) - R < d.delta)
        throw std::domain_error("rouche_disk: M too small (real-axis containment bound fails)");
    return d;
}

// ---------------------------------------------------------------------------
// Winding numbers by the argument principle.

/// Integer winding of the closed curve u -> curve(u), u in [0,1), around c.
/// Sampling doubles until every consecutive argument step is below pi/2,
/// up to 2^20 points.
inline long winding_number(const std::function<cplx(double)>& curve, cplx c,
                           std::size_t m_samples = 256) {
    constexpr double pi = 3.14159265358979323846;
    for (std::size_t n = std::max<std::size_t>(m_samples, 8); n <= (1u << 20); n *= 2) {
        double total = 0.0;
        double prev = 0.0;
        bool fine = true;
        for (std::size_t i = 0; i <= n; ++i) {
            const cplx v = curve(static_cast<double>(i % n) / static_cast<double>(n)) - c;
            if (v == cplx{0.0, 0.0} || !is_finite(v))
                throw std::domain_error("winding_number: curve touches the target point");
            const double arg = std::arg(v);
            if (i > 0) {
                double step = arg - prev;
                while (step > pi) step -= 2.0 * pi;
                while (step < -pi) step += 2.0 * pi;
                if (std::abs(step) >= pi / 2.0) {
                    fine = false;
                    break;
                }
                total += step;
            }
            prev = arg;
        }
        if (fine) return std::lround(total / (2.0 * pi));
    }
    throw std::runtime_error("winding_number: curve too close to c");
}

// ---------------------------------------------------------------------------
// The surjectivity certificate: on a disk D in W_R centered on L_c the model
// ratio h0(z,w) = z/w winds around c, and |h1 - h0| stays below |h0 - c| on
// the boundary, which forces c into h1(D).

struct RoucheCertificate {
    DiskSpec disk;
    double M_param = 0.0;
    double A_min = 0.0; // min over boundary of |h0 - c|
    double B_max = 0.0; // max over boundary of |h1 - h0|, series radius included
    long winding_h0 = 0;
    long winding_h1 = 0;
    std::size_t boundary_samples = 0;
    Verdict verdict = Verdict::unknown;
    std::string note;

    bool passed() const { return verdict == Verdict::pass; }
};

namespace detail {
struct BoundaryExtrema {
    double a_min;
    double b_max;
};

inline BoundaryExtrema rouche_extrema(const MapSpec& m, const DiskSpec& d, cplx c, double R,
                                      std::size_t n, double tol) {
    BoundaryExtrema e{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = d.boundary(static_cast<double>(i) / static_cast<double>(n));
        const cplx h0 = p.z / p.w;
        const LimitPair lp = limit_pair(m, p, R, tol);
        e.a_min = std::min(e.a_min, std::abs(h0 - c));
        e.b_max = std::max(e.b_max, std::abs(lp.h1.value - h0) + lp.h1.err);
    }
    return e;
}
} // namespace detail

inline RoucheCertificate rouche_certificate(const MapSpec& m, cplx c, double R, double M,
                                            std::size_t m_samples = 256, double tol = 1e-10) {
    if (c == cplx{0.0, 0.0} || !is_finite(c))
        throw std::domain_error("rouche_certificate: target must be nonzero and finite");
    require_admissible(m, R);

    RoucheCertificate cert;
    cert.disk = rouche_disk(c, M, R);
    cert.M_param = M;

    // Boundary extrema with one refinement doubling when the coarse pass is
    // off by more than 1%; the final values take the conservative side of
    // both passes.
    const std::size_t n0 = std::max<std::size_t>(m_samples, 16);
    const auto coarse = detail::rouche_extrema(m, cert.disk, c, R, n0, tol);
    auto final_e = coarse;
    cert.boundary_samples = n0;
    const auto fine = detail::rouche_extrema(m, cert.disk, c, R, 2 * n0, tol);
    if (std::abs(fine.a_min - coarse.a_min) > 0.01 * coarse.a_min ||
        std::abs(fine.b_max - coarse.b_max) > 0.01 * std::max(coarse.b_max, 1e-300)) {
        cert.note = "boundary extrema refined once";
    }
    final_e.a_min = std::min(coarse.a_min, fine.a_min);
    final_e.b_max = std::max(coarse.b_max, fine.b_max);
    cert.boundary_samples = 2 * n0;
    cert.A_min = final_e.a_min;
    cert.B_max = final_e.b_max;

    const DiskSpec d = cert.disk;
    cert.winding_h0 = winding_number([&](double u) { const Point p = d.boundary(u); return p.z / p.w; },
                                     c, m_samples);
    cert.verdict = (cert.B_max < cert.A_min && cert.winding_h0 >= 1) ? Verdict::pass : Verdict::fail;
    if (cert.passed()) {
        // independent cross-check: wind the certified ratio itself
        cert.winding_h1 = winding_number(
            [&](double u) { return limit_pair(m, d.boundary(u), R, tol).h1.value; }, c, m_samples);
    }
    return cert;
}

/// Doubles M until the certificate passes; gives up past M = 2^10 R and
/// returns the last failure (with the reason in `note`).
inline RoucheCertificate rouche_certificate_auto_m(const MapSpec& m, cplx c, double R,
                                                   double M0 = 10.0, std::size_t m_samples = 256,
                                                   double tol = 1e-10) {
    RoucheCertificate last;
    last.verdict = Verdict::fail;
    for (double M = M0; M <= 1024.0 * R; M *= 2.0) {
        try {
            last = rouche_certificate(m, c, R, M, m_samples, tol);
        } catch (const std::domain_error& e) {
            last = RoucheCertificate{};
            last.M_param = M;
            last.verdict = Verdict::fail;
            last.note = e.what();
            continue;
        }
        if (last.passed()) return last;
    }
    if (last.note.empty()) last.note = "no passing M up to 1024*R";
    return last;
}

// ---------------------------------------------------------------------------
// Absorbing-set membership is semi-decidable: forward iteration either hits
// W_R (member, with the entry index) or the answer stays unknown.

struct AbsorbingVerdict {
    std::optional<std::size_t> entry_index;
    std::size_t checked = 0; // forward steps examined when unknown

    bool member() const { return entry_index.has_value(); }
};

inline AbsorbingVerdict absorbing_membership(const MapSpec& m, const Point& p, double R,
                                             std::size_t n_max) {
    require_admissible(m, R);
    const Region W{R};
    Point q = p;
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (!q.valid()) return {std::nullopt, n};
        if (in_region(q, W)) return {n, n};
        q = apply(m, q);
    }
    return {std::nullopt, n_max};
}

/// u_n = -Re z_n / n for n = 1..n_max, truncated at overflow. Bounded above
/// on the Fatou component; drops to -infinity along orbits that reach W_R,
/// at the doubly exponential rate -a^{floor(n/2)} (R - Delta)/n.
inline std::vector<double> u_n_diagnostics(const MapSpec& m, const Point& p, std::size_t n_max) {
    if (n_max < 1) throw std::domain_error("u_n_diagnostics: requires n_max >= 1");
    std::vector<double> u;
    u.reserve(n_max);
    Point q = p;
    for (std::size_t n = 1; n <= n_max; ++n) {
        q = apply(m, q);
        if (!q.valid()) break;
        u.push_back(-q.z.real() / static_cast<double>(n));
    }
    return u;
}

} // namespace escomp

#endif
