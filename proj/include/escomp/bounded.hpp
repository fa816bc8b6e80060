#ifndef ESCOMP_BOUNDED_HPP
#define ESCOMP_BOUNDED_HPP

#include <cmath>
#include <complex>

#include "escomp/map.hpp"

namespace escomp {

/// A complex value with a certified absolute error radius: the true quantity
/// lies in the closed disk of radius `err` around `value`. Arithmetic
/// propagates radii conservatively. A quotient is certifiable only when the
/// denominator disk excludes zero; otherwise the result is marked invalid
/// (`ok == false`) and invalidity is sticky through further arithmetic.
struct Bounded {
    cplx value{0.0, 0.0};
    double err = 0.0;
    bool ok = true;

    Bounded() = default;
    Bounded(cplx v, double e, bool o = true) : value(v), err(e), ok(o && e >= 0.0 && std::isfinite(e) && is_finite(v)) {}
    explicit Bounded(double v) : value(v, 0.0) {}

    static Bounded exact(cplx v) { return Bounded{v, 0.0}; }
    static Bounded invalid() { return Bounded{overflow_value(), 0.0, false}; }

    /// True when the disk excludes zero, i.e. the value is certifiably nonzero.
    bool nonzero() const { return ok && std::abs(value) > err; }
};

inline Bounded operator+(const Bounded& a, const Bounded& b) {
    return {a.value + b.value, a.err + b.err, a.ok && b.ok};
}

inline Bounded operator-(const Bounded& a, const Bounded& b) {
    return {a.value - b.value, a.err + b.err, a.ok && b.ok};
}

inline Bounded operator*(const Bounded& a, const Bounded& b) {
    const double err = std::abs(a.value) * b.err + std::abs(b.value) * a.err + a.err * b.err;
    return {a.value * b.value, err, a.ok && b.ok};
}

inline Bounded operator*(double s, const Bounded& a) {
    return {s * a.value, std::abs(s) * a.err, a.ok};
}

/// (u +- e_u) / (v +- e_v); requires |v| > e_v, otherwise invalid.
/// Radius (|u| e_v + |v| e_u) / (|v| (|v| - e_v)).
inline Bounded operator/(const Bounded& u, const Bounded& v) {
    if (!u.ok || !v.ok || !v.nonzero()) return Bounded::invalid();
    const double av = std::abs(v.value);
    const double err = (std::abs(u.value) * v.err + av * u.err) / (av * (av - v.err));
    return {u.value / v.value, err, true};
}

inline Bounded operator+(const Bounded& a, cplx c) { return {a.value + c, a.err, a.ok}; }
inline Bounded operator+(cplx c, const Bounded& a) { return a + c; }
inline Bounded operator-(const Bounded& a, cplx c) { return {a.value - c, a.err, a.ok}; }

} // namespace escomp

#endif
