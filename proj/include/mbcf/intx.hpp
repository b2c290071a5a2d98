#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mbcf {

// All exact arithmetic in the library runs on GMP integers and rationals.
// Verdicts are never derived from floating point; decimal renderings exist
// only as human-readable annotations in reports.
using Int = mpz_class;
using Rat = mpq_class;

/// Malformed input: bad spec files, out-of-range parameters, broken invariants.
class SpecError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A computation ran out of refinable data: finite stream exhausted, enclosure
/// could not be tightened within budget, table too shallow.
class ResourceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

/// floor(sqrt(n)), n >= 0.
inline Int isqrt(const Int& n) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_perfect_square(const Int& n) {
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

/// floor(n^(1/k)), n >= 0, k >= 1. Sets *exact to whether n is a perfect k-th power.
inline Int iroot(const Int& n, unsigned long k, bool* exact = nullptr) {
    Int r;
    int ex = mpz_root(r.get_mpz_t(), n.get_mpz_t(), k);
    if (exact) *exact = (ex != 0);
    return r;
}

inline Int pow_int(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

/// base^e for integer e (negative allowed, base != 0 then).
Rat pow_rat(const Rat& base, long e);

inline Rat make_rat(const Int& num, const Int& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline std::size_t bit_length(const Int& x) {
    return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

inline Int floor_rat(const Rat& r) { return floor_div(r.get_num(), r.get_den()); }
inline Int ceil_rat(const Rat& r) { return ceil_div(r.get_num(), r.get_den()); }

inline std::string dec(const Int& x) { return x.get_str(10); }

/// "p/q" with canonical sign on the numerator; plain "p" when q == 1.
std::string rat_to_string(const Rat& r);

/// Accepts "p/q", plain integers, and decimal literals like "0.3333"
/// (parsed exactly as 3333/10000). Throws SpecError on anything else.
Rat rat_from_string(const std::string& s);

/// Decimal rendering of a rational, correctly rounded toward zero at `digits`
/// fractional digits. Annotation only; never feeds a verdict.
std::string decimal_approx(const Rat& r, int digits);

/// Checked narrowing for loop bounds and vector indexing.
inline std::size_t to_size(const Int& x, const char* what = "index") {
    if (x < 0 || !x.fits_ulong_p())
        throw SpecError(std::string(what) + " does not fit in a machine index: " + dec(x));
    return static_cast<std::size_t>(x.get_ui());
}

}  // namespace mbcf
