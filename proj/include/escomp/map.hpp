#ifndef ESCOMP_MAP_HPP
#define ESCOMP_MAP_HPP

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "escomp/rng.hpp"

namespace escomp {

using cplx = std::complex<double>;

inline bool is_finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// Overflow sentinel: NaN in both components, never equal to a valid value.
inline cplx overflow_value() {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
}

// 17 significant digits: enough to round-trip any double exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// One term A*exp(-k*z) of the nonlinear part, A > 0, k > 0.
struct ExpTerm {
    double amp;
    double rate;
};

/// The map family F(z,w) = (a*w + f(z), z) with a > 1 real and
/// f(z) = sum_i A_i exp(-k_i z), a finite sum with positive coefficients.
/// An empty term list means f == 0: the plain linear map, kept as an exact
/// oracle for tests. Only the nonlinear case satisfies the hypotheses under
/// which the escaping component and its two limit functions exist.
struct MapSpec {
    double a = 2.0;
    std::vector<ExpTerm> f_terms;

    bool theorem_hypotheses_met() const { return !f_terms.empty(); }
    bool linear() const { return f_terms.empty(); }
    double amp_total() const {
        double t = 0.0;
        for (const auto& term : f_terms) t += term.amp;
        return t;
    }
};

inline MapSpec make_map(double a, std::vector<ExpTerm> terms) {
    if (!(a > 1.0)) throw std::domain_error("make_map: requires a > 1");
    for (const auto& t : terms)
        if (!(t.amp > 0.0) || !(t.rate > 0.0))
            throw std::domain_error("make_map: every f term requires A > 0 and k > 0");
    return MapSpec{a, std::move(terms)};
}

/// A point of C^2. Valid points have finite coordinates; the overflow
/// sentinel (NaN coordinates) marks the result of a range overflow.
struct Point {
    cplx z;
    cplx w;

    bool valid() const { return is_finite(z) && is_finite(w); }
    static Point overflow() { return {overflow_value(), overflow_value()}; }
};

inline double norm(const Point& p) { return std::hypot(std::abs(p.z), std::abs(p.w)); }

inline double distance(const Point& p, const Point& q) {
    return std::hypot(std::abs(p.z - q.z), std::abs(p.w - q.w));
}

/// Product half-plane W_R = { Re z > R, Re w > R }, R > 0. Open set:
/// membership is strict.
struct Region {
    double R;
    explicit Region(double r) : R(r) {
        if (!(r > 0.0)) throw std::domain_error("Region: requires R > 0");
    }
};

inline bool in_region(const Point& p, const Region& W) {
    return p.valid() && p.z.real() > W.R && p.w.real() > W.R;
}

/// f(z) = sum_i A_i exp(-k_i z). Underflows to exact 0 far right; returns
/// the overflow sentinel when Re z is negative enough to overflow.
inline cplx f_eval(const MapSpec& m, cplx z) {
    cplx s{0.0, 0.0};
    for (const auto& t : m.f_terms) s += t.amp * std::exp(-t.rate * z);
    return is_finite(s) ? s : overflow_value();
}

/// Certified bound for sup |f| over the open half-plane Re z > R:
/// each |A exp(-k z)| < A exp(-k R).  Monotone nonincreasing in R.
inline double f_sup_bound(const MapSpec& m, double R) {
    if (!std::isfinite(R)) throw std::domain_error("f_sup_bound: R must be finite");
    double s = 0.0;
    for (const auto& t : m.f_terms) s += t.amp * std::exp(-t.rate * R);
    return s;
}

inline Point apply(const MapSpec& m, const Point& p) {
    if (!p.valid()) return Point::overflow();
    const cplx fz = f_eval(m, p.z);
    const cplx z1 = m.a * p.w + fz;
    if (!is_finite(fz) || !is_finite(z1)) return Point::overflow();
    return {z1, p.z};
}

inline Point apply_inverse(const MapSpec& m, const Point& p) {
    if (!p.valid()) return Point::overflow();
    const cplx fw = f_eval(m, p.w);
    const cplx w0 = (p.z - fw) / m.a;
    if (!is_finite(fw) || !is_finite(w0)) return Point::overflow();
    return {p.w, w0};
}

inline Point apply_n(const MapSpec& m, Point p, std::size_t n) {
    for (std::size_t i = 0; i < n && p.valid(); ++i) p = apply(m, p);
    return p;
}

inline Point apply_inverse_n(const MapSpec& m, Point p, std::size_t n) {
    for (std::size_t i = 0; i < n && p.valid(); ++i) p = apply_inverse(m, p);
    return p;
}

/// Forward orbit P_0..P_n. Always satisfies w_{k+1} == z_k bitwise.
/// On overflow the orbit is truncated and `stop_index` records the last
/// valid index; truncation is data, not an error.
struct Orbit {
    std::vector<Point> points;
    std::size_t requested = 0;
    std::optional<std::size_t> stop_index; // set iff truncated early

    std::size_t size() const { return points.size(); }
    double re_z(std::size_t n) const { return points[n].z.real(); }
    double norm_at(std::size_t n) const { return norm(points[n]); }
    // z_n / w_n; sentinel when w_n == 0 (cannot happen inside any W_R)
    cplx ratio(std::size_t n) const {
        const Point& p = points[n];
        if (p.w == cplx{0.0, 0.0}) return overflow_value();
        return p.z / p.w;
    }
};

inline Orbit iterate_orbit(const MapSpec& m, const Point& start, std::size_t n) {
    Orbit o;
    o.requested = n;
    o.points.reserve(n + 1);
    o.points.push_back(start);
    for (std::size_t k = 0; k < n; ++k) {
        Point next = apply(m, o.points.back());
        if (!next.valid()) {
            o.stop_index = o.points.size() - 1;
            break;
        }
        o.points.push_back(next);
    }
    return o;
}

/// True when sup_{Re z > R} |f| <= (a-1) R - eps, the inequality that makes
/// W_R forward invariant with escape margin eps on the first coordinate.
inline bool is_admissible(const MapSpec& m, double R, double eps) {
    return std::isfinite(R) && f_sup_bound(m, R) <= (m.a - 1.0) * R - eps;
}

inline void require_admissible(const MapSpec& m, double R, double eps = 0.0) {
    if (!(R > 0.0) || !is_admissible(m, R, eps))
        throw std::domain_error("region threshold R is not admissible for this map");
}

/// Smallest R > 0 with f_sup_bound(m,R) <= (a-1)R - eps, found by bisection
/// on the gap g(R) = (a-1)R - eps - f_sup_bound(m,R), which is continuous and
/// strictly increasing for this catalog. Bisection tolerance 1e-9; the upper
/// end of the final bracket is returned, so the result itself is admissible
/// and so is every larger R.
inline double admissible_R(const MapSpec& m, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("admissible_R: requires eps > 0");
    const auto gap = [&](double R) { return (m.a - 1.0) * R - eps - f_sup_bound(m, R); };
    double lo = 0.0;
    double hi = std::max(1.0, 2.0 * m.amp_total() / (m.a - 1.0)) + eps;
    while (gap(hi) < 0.0) hi *= 2.0; // extend the bracket when a is close to 1 or eps is large
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Textual form "a=<float>;f=<A1>,<k1>[+<A2>,<k2>...]", "f=0" for the linear
// map. Lossless round trip at 17 significant digits.

inline std::string format_map(const MapSpec& m) {
    std::string s = "a=" + fmt17(m.a) + ";f=";
    if (m.linear()) return s + "0";
    bool first = true;
    for (const auto& t : m.f_terms) {
        if (!first) s += "+";
        s += fmt17(t.amp) + "," + fmt17(t.rate);
        first = false;
    }
    return s;
}

namespace detail {
inline double parse_double_full(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("map string: empty number");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw std::invalid_argument("map string: malformed number '" + s + "'");
    return v;
}
} // namespace detail

inline MapSpec map_from_string(const std::string& s) {
    const auto semi = s.find(';');
    if (semi == std::string::npos || s.compare(0, 2, "a=") != 0 ||
        s.compare(semi + 1, 2, "f=") != 0)
        throw std::invalid_argument("map string: expected \"a=<float>;f=...\"");
    const double a = detail::parse_double_full(s.substr(2, semi - 2));
    const std::string body = s.substr(semi + 3);
    std::vector<ExpTerm> terms;
    if (body != "0") {
        std::size_t pos = 0;
        while (pos <= body.size()) {
            auto plus = body.find('+', pos);
            if (plus == std::string::npos) plus = body.size();
            const std::string item = body.substr(pos, plus - pos);
            const auto comma = item.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("map string: term must be \"<A>,<k>\"");
            terms.push_back({detail::parse_double_full(item.substr(0, comma)),
                             detail::parse_double_full(item.substr(comma + 1))});
            pos = plus + 1;
        }
    }
    return make_map(a, std::move(terms));
}

// ---------------------------------------------------------------------------
// Seeded sampling helpers. Re parts land in the half-open box (R, R+re_width],
// so samples are always strictly inside the open region.

inline Point sample_region_box(Rng& rng, double R, double re_width, double im_half) {
    const auto coord = [&] {
        const double re = R + (1.0 - rng.next_unit()) * re_width;
        const double im = -im_half + 2.0 * im_half * rng.next_unit();
        return cplx{re, im};
    };
    const cplx z = coord();
    const cplx w = coord();
    return {z, w};
}

} // namespace escomp

#endif
