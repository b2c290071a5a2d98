#include "mbcf/real_ops.hpp"

#include <mpfr.h>

namespace mbcf {

namespace {

// Exact conversion: every finite MPFR value is m * 2^e.
Rat rat_from_mpfr(const mpfr_t x) {
    if (mpfr_zero_p(x)) return Rat(0);
    if (!mpfr_number_p(x)) throw ResourceError("non-finite value in enclosure arithmetic");
    Int m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
    Rat r(m);
    if (e >= 0) {
        mpz_mul_2exp(r.get_num().get_mpz_t(), r.get_num().get_mpz_t(),
                     static_cast<mp_bitcnt_t>(e));
    } else {
        mpz_mul_2exp(r.get_den().get_mpz_t(), r.get_den().get_mpz_t(),
                     static_cast<mp_bitcnt_t>(-e));
    }
    r.canonicalize();
    return r;
}

class MpfrVal {
  public:
    explicit MpfrVal(unsigned prec) { mpfr_init2(v_, prec); }
    ~MpfrVal() { mpfr_clear(v_); }
    MpfrVal(const MpfrVal&) = delete;
    MpfrVal& operator=(const MpfrVal&) = delete;
    mpfr_t& get() { return v_; }

  private:
    mpfr_t v_;
};

void set_rat(mpfr_t dst, const Rat& x, mpfr_rnd_t rnd) {
    mpfr_set_q(dst, x.get_mpq_t(), rnd);
}

}  // namespace

Enclosure log_enclosure(const Rat& x, unsigned prec) {
    if (x <= 0) throw SpecError("log of non-positive rational");
    MpfrVal a(prec), b(prec);
    set_rat(a.get(), x, MPFR_RNDD);
    mpfr_log(a.get(), a.get(), MPFR_RNDD);
    set_rat(b.get(), x, MPFR_RNDU);
    mpfr_log(b.get(), b.get(), MPFR_RNDU);
    return {rat_from_mpfr(a.get()), rat_from_mpfr(b.get())};
}

Enclosure exp_enclosure(const Rat& x, unsigned prec) {
    MpfrVal a(prec), b(prec);
    set_rat(a.get(), x, MPFR_RNDD);
    mpfr_exp(a.get(), a.get(), MPFR_RNDD);
    set_rat(b.get(), x, MPFR_RNDU);
    mpfr_exp(b.get(), b.get(), MPFR_RNDU);
    return {rat_from_mpfr(a.get()), rat_from_mpfr(b.get())};
}

Enclosure pow_enclosure(const Rat& base, const Rat& expo, unsigned prec) {
    return pow_enclosure(base, Enclosure(expo), prec);
}

Enclosure pow_enclosure(const Rat& base, const Enclosure& expo, unsigned prec) {
    if (base <= 0) throw SpecError("pow_enclosure: base must be positive");
    // base^e = exp(e * ln base), with the ln interval oriented by sign(e).
    Enclosure lnb = log_enclosure(base, prec);
    Enclosure prod = expo * lnb;
    MpfrVal a(prec), b(prec);
    set_rat(a.get(), prod.lo, MPFR_RNDD);
    mpfr_exp(a.get(), a.get(), MPFR_RNDD);
    set_rat(b.get(), prod.hi, MPFR_RNDU);
    mpfr_exp(b.get(), b.get(), MPFR_RNDU);
    return {rat_from_mpfr(a.get()), rat_from_mpfr(b.get())};
}

Enclosure root_bracket(const Int& n, unsigned long k, unsigned frac_bits) {
    if (n < 0) throw SpecError("root_bracket: negative radicand");
    if (k == 0) throw SpecError("root_bracket: zeroth root");
    bool exact = false;
    Int plain = iroot(n, k, &exact);
    if (exact) return Enclosure(Rat(plain));
    Int scaled = n;
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(frac_bits) * k);
    Int t = iroot(scaled, k);
    Int den(1);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), frac_bits);
    return {make_rat(t, den), make_rat(t + 1, den)};
}

}  // namespace mbcf
