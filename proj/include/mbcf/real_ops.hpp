#pragma once

#include "mbcf/interval.hpp"

namespace mbcf {

// Certified enclosures of transcendental expressions. Endpoints are exact
// dyadic rationals obtained from directed rounding, so containment is a
// theorem, not an estimate. Precision is in bits of working mantissa.

/// ln(x), x > 0.
Enclosure log_enclosure(const Rat& x, unsigned prec);

/// exp(x).
Enclosure exp_enclosure(const Rat& x, unsigned prec);

/// base^expo, base > 0.
Enclosure pow_enclosure(const Rat& base, const Rat& expo, unsigned prec);

/// base^expo where expo is already an enclosure, base > 0.
Enclosure pow_enclosure(const Rat& base, const Enclosure& expo, unsigned prec);

/// Dyadic bracket of n^(1/k) computed with integer k-th roots only:
/// [t, t+1]/2^frac_bits around the true root (degenerate when exact).
/// Used where a decision procedure must stay inside integer arithmetic.
Enclosure root_bracket(const Int& n, unsigned long k, unsigned frac_bits);

}  // namespace mbcf
