#pragma once

#include <vector>

#include "mbcf/interval.hpp"

namespace mbcf {

/// Exact real quadratic irrational (P + sqrt(D)) / Q with D > 0 not a perfect
/// square and Q != 0. Canonical form: the triple is rebuilt from the primitive
/// integer minimal polynomial, so equal values always carry identical triples
/// and Q divides D - P^2. All comparisons and sign tests are algebraic; no
/// floating point is involved anywhere.
class QuadraticSurd {
  public:
    QuadraticSurd(Int P, Int D, Int Q);

    const Int& P() const { return p_; }
    const Int& D() const { return d_; }
    const Int& Q() const { return q_; }

    /// Primitive quadratic a2 x^2 + a1 x + a0 with a2 > 0, gcd(a2,a1,a0) = 1,
    /// vanishing at this value; branch = +1 when this is the larger root.
    struct MinimalPolynomial {
        Int a2, a1, a0;
        int branch;
    };
    MinimalPolynomial minimal_polynomial() const;

    bool operator==(const QuadraticSurd& o) const {
        return p_ == o.p_ && d_ == o.d_ && q_ == o.q_;
    }

    /// Exact sign of (value - r).
    int compare(const Rat& r) const;

    Int floor_value() const;

    QuadraticSurd conjugate() const;

    /// Certified rational enclosure of width <= width_bound, via integer
    /// square-root bracketing of sqrt(D).
    Enclosure enclose(const Rat& width_bound) const;

    /// Exact sign of c2 x^2 + c1 x + c0 at this value (0 iff exact root).
    int quadratic_sign(const Int& c2, const Int& c1, const Int& c0) const;

    /// (a*value + b) / (c*value + d); the denominator cannot vanish for an
    /// irrational value unless c = d = 0.
    QuadraticSurd mobius(const Int& a, const Int& b, const Int& c, const Int& d) const;

  private:
    Int p_, d_, q_;
};

/// preperiod + infinitely repeated period; the period is primitive (not a
/// power of a shorter word).
struct PeriodicExpansion {
    std::vector<Int> preperiod;
    std::vector<Int> period;
};

/// Classical surd expansion: terminates by periodicity of the (P, Q) orbit.
/// The detected period is the primitive one and the preperiod is minimal.
PeriodicExpansion expand_surd(const QuadraticSurd& s);

/// Exact value fixed by x = [B; x]: positive root of the quadratic obtained
/// from the 2x2 quotient-word matrix of B. All entries of B must be >= 1.
QuadraticSurd purely_periodic_value(const std::vector<Int>& block);

/// Exact surd whose expansion is `prefix` followed by `block` repeated
/// forever (a Moebius image of the purely periodic value).
QuadraticSurd tail_periodicize(const std::vector<Int>& prefix, const std::vector<Int>& block);

/// Re-evaluates a periodic expansion to its exact value.
inline QuadraticSurd value_of(const PeriodicExpansion& e) {
    return tail_periodicize(e.preperiod, e.period);
}

/// Shortest word whose repetition gives w.
std::vector<Int> primitive_root(const std::vector<Int>& w);

}  // namespace mbcf
