#pragma once

#include <algorithm>
#include <optional>

#include "mbcf/intx.hpp"

namespace mbcf {

/// Exact rational interval certified to contain a real value.
/// Arithmetic on enclosures is outward: results always contain the image of
/// the represented reals.
struct Enclosure {
    Rat lo;
    Rat hi;

    Enclosure() : lo(0), hi(0) {}
    Enclosure(Rat v) : lo(v), hi(v) {}
    Enclosure(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw SpecError("enclosure endpoints out of order");
    }

    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) / 2; }
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
    bool contains(const Enclosure& e) const { return lo <= e.lo && e.hi <= hi; }
    bool is_point() const { return lo == hi; }

    /// Tri-state comparisons; nullopt means the interval straddles the bound.
    std::optional<bool> lt(const Rat& v) const {
        if (hi < v) return true;
        if (lo >= v) return false;
        return std::nullopt;
    }
    std::optional<bool> gt(const Rat& v) const {
        if (lo > v) return true;
        if (hi <= v) return false;
        return std::nullopt;
    }
};

inline Enclosure operator+(const Enclosure& a, const Enclosure& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}
inline Enclosure operator-(const Enclosure& a, const Enclosure& b) {
    return {a.lo - b.hi, a.hi - b.lo};
}
inline Enclosure operator-(const Enclosure& a) { return {-a.hi, -a.lo}; }

inline Enclosure operator*(const Enclosure& a, const Enclosure& b) {
    Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}
inline Enclosure operator*(const Rat& s, const Enclosure& a) {
    return s >= 0 ? Enclosure{s * a.lo, s * a.hi} : Enclosure{s * a.hi, s * a.lo};
}
inline Enclosure operator+(const Enclosure& a, const Rat& s) { return {a.lo + s, a.hi + s}; }
inline Enclosure operator-(const Enclosure& a, const Rat& s) { return {a.lo - s, a.hi - s}; }

inline Enclosure abs_enclosure(const Enclosure& a) {
    if (a.lo >= 0) return a;
    if (a.hi <= 0) return -a;
    return {Rat(0), std::max<Rat>(-a.lo, a.hi)};
}

/// Reciprocal; requires a sign-definite interval.
inline Enclosure reciprocal(const Enclosure& a) {
    if (a.lo <= 0 && a.hi >= 0) throw SpecError("reciprocal of interval containing zero");
    return {1 / a.hi, 1 / a.lo};
}

/// e-th power of an interval with positive lower endpoint.
inline Enclosure powi(const Enclosure& a, unsigned long e) {
    if (e == 0) return Enclosure(Rat(1));
    if (a.lo <= 0) throw SpecError("powi needs a positive interval");
    return {pow_rat(a.lo, static_cast<long>(e)), pow_rat(a.hi, static_cast<long>(e))};
}

/// Largest possible distance between a point of `a` and a point of `b`.
inline Rat sup_distance(const Enclosure& a, const Enclosure& b) {
    Rat span_hi = std::max(a.hi, b.hi);
    Rat span_lo = std::min(a.lo, b.lo);
    return span_hi - span_lo;
}

inline Enclosure intersect(const Enclosure& a, const Enclosure& b) {
    Rat l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
    if (l > h) throw SpecError("empty enclosure intersection");
    return {l, h};
}

}  // namespace mbcf
