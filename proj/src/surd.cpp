#include "mbcf/surd.hpp"

#include <map>
#include <utility>

namespace mbcf {

namespace {

// Largest root first: floor((P + sqrt(D))/Q) for non-square D.
// Uses floor(sqrt(D)) = s and floor(-sqrt(D)) = -s - 1.
Int surd_floor(const Int& P, const Int& D, const Int& Q) {
    Int s = isqrt(D);
    if (Q > 0) return floor_div(P + s, Q);
    return floor_div(-P - s - 1, -Q);
}

int sign_of(const Int& x) { return x < 0 ? -1 : (x > 0 ? 1 : 0); }

// Exact sign of U + V*sqrt(D), D positive non-square.
int surd_part_sign(const Int& U, const Int& V, const Int& D) {
    if (V == 0) return sign_of(U);
    if (U == 0) return sign_of(V);
    int su = sign_of(U), sv = sign_of(V);
    if (su == sv) return su;
    // opposite signs: |U| vs |V| sqrt(D); equality would force sqrt(D) rational
    Int u2 = U * U, v2d = V * V * D;
    if (u2 == v2d) throw SpecError("sqrt(D) rational: D is a perfect square");
    return u2 > v2d ? su : sv;
}

}  // namespace

QuadraticSurd::QuadraticSurd(Int P, Int D, Int Q) : p_(std::move(P)), d_(std::move(D)), q_(std::move(Q)) {
    if (q_ == 0) throw SpecError("surd: Q must be nonzero");
    if (d_ <= 0) throw SpecError("surd: D must be positive");
    if (is_perfect_square(d_)) throw SpecError("surd: D is a perfect square (rational value)");
    // Rebuild the canonical triple from the primitive minimal polynomial.
    // First make Q | D - P^2 so the polynomial below has integer content.
    if ((d_ - p_ * p_) % q_ != 0) {
        Int aq = abs(q_);
        p_ *= aq;
        d_ *= q_ * q_;
        q_ *= aq;
    }
    Int a2 = q_ * q_;
    Int a1 = -2 * p_ * q_;
    Int a0 = p_ * p_ - d_;
    Int g = gcd(gcd(a2, a1), a0);
    a2 /= g; a1 /= g; a0 /= g;
    bool larger_root = q_ > 0;
    // larger root of a2 x^2 + a1 x + a0 (a2 > 0) is (-a1 + sqrt(disc))/(2 a2)
    Int disc = a1 * a1 - 4 * a2 * a0;
    if (larger_root) {
        p_ = -a1;
        q_ = 2 * a2;
    } else {
        p_ = a1;
        q_ = -2 * a2;
    }
    d_ = disc;
    // deterministic square-factor reduction
    for (;;) {
        Int g2 = gcd(p_, q_);
        if (g2 <= 1) break;
        Int gg = g2 * g2;
        if (d_ % gg != 0) break;
        Int np = p_ / g2, nq = q_ / g2, nd = d_ / gg;
        if ((nd - np * np) % nq != 0) break;
        p_ = np; q_ = nq; d_ = nd;
    }
}

QuadraticSurd::MinimalPolynomial QuadraticSurd::minimal_polynomial() const {
    Int a2 = q_ * q_;
    Int a1 = -2 * p_ * q_;
    Int a0 = p_ * p_ - d_;
    Int g = gcd(gcd(a2, a1), a0);
    return {a2 / g, a1 / g, a0 / g, q_ > 0 ? 1 : -1};
}

int QuadraticSurd::compare(const Rat& r) const {
    // (P + sqrt D)/Q - a/b = (bP - aQ + b sqrt D) / (bQ), b > 0
    const Int& a = r.get_num();
    const Int& b = r.get_den();
    Int U = b * p_ - a * q_;
    return surd_part_sign(U, b, d_) * sign_of(q_);
}

Int QuadraticSurd::floor_value() const { return surd_floor(p_, d_, q_); }

QuadraticSurd QuadraticSurd::conjugate() const { return QuadraticSurd(-p_, d_, -q_); }

Enclosure QuadraticSurd::enclose(const Rat& width_bound) const {
    if (width_bound <= 0) throw SpecError("width bound must be positive");
    // sqrt(D) in [t, t+1]/2^k gives value width 2^{-k}/|Q|
    Rat need = 1 / (width_bound * abs(q_));
    unsigned long k = static_cast<unsigned long>(bit_length(ceil_rat(need))) + 1;
    Int scaled = d_;
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * k);
    Int t = isqrt(scaled);
    Int den(1);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), k);
    Rat root_lo = make_rat(t, den), root_hi = make_rat(t + 1, den);
    Rat a = (Rat(p_) + root_lo) / Rat(q_);
    Rat b = (Rat(p_) + root_hi) / Rat(q_);
    return {std::min(a, b), std::max(a, b)};
}

int QuadraticSurd::quadratic_sign(const Int& c2, const Int& c1, const Int& c0) const {
    // c2 x^2 + c1 x + c0 at x = (P + sqrt D)/Q equals (U + V sqrt D)/Q^2
    Int U = c2 * (p_ * p_ + d_) + c1 * p_ * q_ + c0 * q_ * q_;
    Int V = 2 * c2 * p_ + c1 * q_;
    if (U == 0 && V == 0) return 0;
    return surd_part_sign(U, V, d_);
}

QuadraticSurd QuadraticSurd::mobius(const Int& a, const Int& b, const Int& c, const Int& d) const {
    if (c == 0 && d == 0) throw SpecError("mobius: zero denominator row");
    // (a x + b)/(c x + d), x = (P + sqrt D)/Q: multiply through by the
    // conjugate of the denominator.
    Int n1 = a * p_ + b * q_;  // numerator rational part times Q
    Int n2 = c * p_ + d * q_;
    Int W = n2 * n2 - c * c * d_;
    if (W == 0) throw SpecError("mobius: denominator vanishes at an irrational point");
    Int U = n1 * n2 - a * c * d_;
    Int V = (a * d - b * c) * q_;
    if (V == 0) throw SpecError("mobius: degenerate map (rational image)");
    if (V > 0) return QuadraticSurd(U, V * V * d_, W);
    return QuadraticSurd(-U, V * V * d_, -W);
}

std::vector<Int> primitive_root(const std::vector<Int>& w) {
    std::size_t n = w.size();
    for (std::size_t d = 1; d <= n / 2; ++d) {
        if (n % d != 0) continue;
        bool ok = true;
        for (std::size_t i = d; i < n && ok; ++i) ok = (w[i] == w[i % d]);
        if (ok) return std::vector<Int>(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
    }
    return w;
}

PeriodicExpansion expand_surd(const QuadraticSurd& s) {
    // Orbit of (P_i, Q_i) with fixed D under the classical step
    //   a = floor((P + sqrt D)/Q), P' = aQ - P, Q' = (D - P'^2)/Q.
    // The first repeated state closes the primitive cycle, and states before
    // the entry point form the minimal preperiod.
    const Int& D = s.D();
    Int P = s.P(), Q = s.Q();
    std::vector<Int> word;
    std::map<std::pair<Int, Int>, std::size_t> seen;
    for (std::size_t i = 0;; ++i) {
        auto [it, fresh] = seen.emplace(std::make_pair(P, Q), i);
        if (!fresh) {
            std::size_t entry = it->second;
            PeriodicExpansion e;
            e.preperiod.assign(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(entry));
            e.period.assign(word.begin() + static_cast<std::ptrdiff_t>(entry), word.end());
            return e;
        }
        Int a = surd_floor(P, D, Q);
        word.push_back(a);
        Int Pn = a * Q - P;
        Int Qn = (D - Pn * Pn) / Q;  // exact by the Q | D - P^2 invariant
        P = Pn;
        Q = Qn;
    }
}

QuadraticSurd purely_periodic_value(const std::vector<Int>& block) {
    if (block.empty()) throw SpecError("purely periodic block must be nonempty");
    for (const Int& b : block)
        if (b < 1) throw SpecError("purely periodic block entries must be >= 1");
    // word matrix M = prod [[b,1],[1,0]]; fixed point of x = (m00 x + m01)/(m10 x + m11)
    Int m00(1), m01(0), m10(0), m11(1);
    for (const Int& b : block) {
        Int n00 = m00 * b + m01;
        Int n10 = m10 * b + m11;
        m01 = m00;
        m11 = m10;
        m00 = n00;
        m10 = n10;
    }
    // m10 x^2 + (m11 - m00) x - m01 = 0; the positive root carries +sqrt
    Int A = m10, B = m11 - m00, C = -m01;
    Int disc = B * B - 4 * A * C;
    return QuadraticSurd(-B, disc, 2 * A);
}

QuadraticSurd tail_periodicize(const std::vector<Int>& prefix, const std::vector<Int>& block) {
    QuadraticSurd y = purely_periodic_value(block);
    if (prefix.empty()) return y;
    if (prefix[0] < 0) throw SpecError("prefix quotient a_0 must be >= 0");
    for (std::size_t i = 1; i < prefix.size(); ++i)
        if (prefix[i] < 1) throw SpecError("prefix quotients after a_0 must be >= 1");
    Int p1(1), p0 = prefix[0], q1(0), q0(1);  // (p_{-1}, p_0), (q_{-1}, q_0)
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        Int p = prefix[i] * p0 + p1;
        Int q = prefix[i] * q0 + q1;
        p1 = p0; p0 = p;
        q1 = q0; q0 = q;
    }
    return y.mobius(p0, p1, q0, q1);
}

}  // namespace mbcf
