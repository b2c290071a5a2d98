#include "mbcf/lab.hpp"

#include <algorithm>

#include "mbcf/real_ops.hpp"

namespace mbcf {

Enclosure XiEnclosure::at_depth(std::size_t depth) {
    if (!table_.try_extend_to(depth + 1)) {
        if (table_.complete()) return Enclosure(table_.convergent(table_.max_index()));
        throw ResourceError("xi enclosure: stream exhausted before depth " +
                            std::to_string(depth + 1));
    }
    Rat a = table_.convergent(depth), b = table_.convergent(depth + 1);
    return {std::min(a, b), std::max(a, b)};
}

namespace {

constexpr std::size_t kMaxExtraDepth = std::size_t{1} << 16;

struct StageContext {
    std::size_t k = 0, r = 0, n = 0, top = 0;  // top = n + lambda r - 1
    Int lambda;
    std::vector<Int> block, rev;
};

StageContext stage_context(const QuasiPeriodicSpec& spec, std::size_t k) {
    StageContext c;
    c.k = k;
    c.r = spec.r(k);
    c.lambda = spec.lambda(k);
    c.n = to_size(spec.n_index(k), "n_k");
    c.top = to_size(spec.n_index(k) + c.lambda * Int(c.r) - 1, "n_k + lambda r - 1");
    c.block = spec.stage(k).block;
    c.rev = c.block;
    std::reverse(c.rev.begin(), c.rev.end());
    return c;
}

const Int& tq(const ConvergentTable& t, std::ptrdiff_t i) { return t.q(i); }
const Int& tp(const ConvergentTable& t, std::ptrdiff_t i) { return t.p(i); }

// ceil(lambda) as machine exponent for integer powering
unsigned long lambda_exp(const Int& lambda) {
    if (!lambda.fits_ulong_p()) throw ResourceError("lambda too large for exact powering");
    return lambda.get_ui();
}

Enclosure interval_square(const Enclosure& e) { return e * e; }

}  // namespace

ApproxQuadruple quadruple(const QuasiPeriodicSpec& spec, std::size_t k) {
    if (spec.layout() != Layout::Packed)
        throw SpecError("quadruple: constant-block regime needs a packed spec");
    StageContext c = stage_context(spec, k);

    auto xi_stream = spec.make_stream();
    ConvergentTable t(xi_stream);
    t.extend_to(c.top);

    ApproxQuadruple q{c.k, c.r, c.lambda, Int(static_cast<unsigned long>(c.n)),
                      c.block, Int(), Int(), Int(), Int(), Int(),
                      purely_periodic_value(c.rev)};
    auto top = static_cast<std::ptrdiff_t>(c.top);
    q.Qk = tq(t, top);
    q.Qpk = tq(t, top - 1);
    q.Pk = tp(t, top);
    q.Ppk = tp(t, top - 1);

    // denominators of the convergents to alpha = [rev; rev; ...]
    auto alpha_stream = std::make_shared<PartialQuotientStream>(
        PartialQuotientStream::periodic(c.rev[0], c.rev));
    std::size_t s_index = to_size(Int(c.r) * c.lambda - 1, "r lambda - 1");
    ConvergentTable st(alpha_stream);
    st.extend_to(s_index);
    q.Sk = tq(st, static_cast<std::ptrdiff_t>(s_index));

    if (!(q.Qk > q.Qpk && q.Qpk >= 1))
        throw SpecError("quadruple: denominator ordering invariant violated");
    Int det = q.Pk * q.Qpk - q.Ppk * q.Qk;
    if (det != 1 && det != -1)
        throw SpecError("quadruple: determinant invariant violated");
    return q;
}

StageInequalities check_b1_b2_b3(const QuasiPeriodicSpec& spec, std::size_t k) {
    ApproxQuadruple qd = quadruple(spec, k);
    StageContext c = stage_context(spec, k);
    StageInequalities res;
    res.k = k;

    Rat inv_s2 = make_rat(Int(1), qd.Sk * qd.Sk);

    // (b2) is a purely algebraic statement about alpha: decide it exactly.
    Rat center = make_rat(qd.Qk, qd.Qpk);
    Rat radius = inv_s2;  // |alpha - Q/Q'| < 1/S^2  <=>  |Q' alpha - Q| < Q'/S^2
    res.b2 = qd.alpha.compare(center - radius) > 0 && qd.alpha.compare(center + radius) < 0;

    // certified gap |Q/Q' - alpha| for the limit statement
    Enclosure alpha_enc = qd.alpha.enclose(inv_s2 / 16);
    res.bb_gap = abs_enclosure(Enclosure(center) - alpha_enc).hi;

    Enclosure l3 = abs_enclosure(Rat(qd.Qpk) * alpha_enc - Rat(qd.Qk));

    XiEnclosure xi(spec.make_stream());
    std::optional<bool> b1a, b1b, b3;
    Rat bound1 = make_rat(Int(1), qd.Qk);
    Rat bound1p = make_rat(Int(1), qd.Qpk);
    for (std::size_t extra = 2; extra <= kMaxExtraDepth; extra *= 2) {
        Enclosure e = xi.at_depth(c.top + extra);
        res.xi_width = e.width();
        if (!b1a) {
            Enclosure v = abs_enclosure(Rat(qd.Qk) * e - Rat(qd.Pk));
            if (auto lt = v.lt(bound1)) b1a = *lt;
        }
        if (!b1b) {
            Enclosure v = abs_enclosure(Rat(qd.Qpk) * e - Rat(qd.Ppk));
            if (auto lt = v.lt(bound1p)) b1b = *lt;
        }
        if (!b3) {
            Enclosure prod = abs_enclosure(Rat(qd.Qk) * e - Rat(qd.Pk)) *
                             abs_enclosure(Rat(qd.Qpk) * e - Rat(qd.Ppk)) * l3 *
                             Enclosure(Rat(qd.Qk));
            if (auto lt = prod.lt(inv_s2)) b3 = *lt;
        }
        if (b1a && b1b && b3) break;
    }
    if (!b1a || !b1b || !b3)
        throw ResourceError("stage inequalities indeterminate at the enclosure budget (k=" +
                            std::to_string(k) + ", width=" + rat_to_string(res.xi_width) + ")");
    res.b1_first = *b1a;
    res.b1_second = *b1b;
    res.b3 = *b3;
    return res;
}

std::vector<EpsilonDecayRow> epsilon_decay(const std::vector<ApproxQuadruple>& series,
                                           const Int& M) {
    if (series.empty()) throw SpecError("epsilon_decay: empty series");
    std::vector<EpsilonDecayRow> out;
    for (const ApproxQuadruple& q : series) {
        EpsilonDecayRow row;
        row.k = q.k;
        Int rl = Int(q.r) * q.lambda;
        Int e = rl - 2;
        if (e <= 0) {
            row.s_lower_ok = true;  // S^2 >= 2^{rl-2} trivially
        } else {
            Int pow2(1);
            mpz_mul_2exp(pow2.get_mpz_t(), pow2.get_mpz_t(), to_size(e, "r lambda - 2"));
            row.s_lower_ok = q.Sk * q.Sk >= pow2;
        }
        Int total = q.n_k + rl;
        row.q_upper_ok = q.Qk <= pow_int(M + 1, to_size(total, "n + r lambda"));
        row.measured_ge_predicted = row.s_lower_ok && row.q_upper_ok;

        unsigned prec = 128;
        if (q.Qk > 1) {
            Enclosure lnS = q.Sk == 1 ? Enclosure(Rat(0)) : log_enclosure(Rat(q.Sk), prec);
            Enclosure lnQ = log_enclosure(Rat(q.Qk), prec);
            row.eps_measured = Rat(2) * (lnS * reciprocal(lnQ));
        }
        Enclosure ln_sqrt2 = Rat(1, 2) * log_enclosure(Rat(2), prec);
        Enclosure ln_mp1 = log_enclosure(Rat(M + 1), prec);
        Rat factor = Rat(2) * make_rat(e, total);
        row.eps_predicted = factor * (ln_sqrt2 * reciprocal(ln_mp1));
        out.push_back(std::move(row));
    }
    return out;
}

JSelectResult j_select(const QuasiPeriodicSpec& spec, std::size_t k) {
    StageContext c = stage_context(spec, k);
    auto s = generate(spec, c.n + c.r);
    const auto& a = s->known_prefix();
    JSelectResult res;
    for (std::size_t j = c.n; j-- > 0;) {
        if (a[j] != a[j + c.r]) {
            res.found = true;
            res.j = j;
            return res;
        }
    }
    return res;
}

AuxPolynomial aux_polynomial(const QuasiPeriodicSpec& spec, std::size_t k, PolyVariant variant) {
    StageContext c = stage_context(spec, k);

    std::size_t base;
    std::ptrdiff_t i1, i2, i3, i4;  // the two convergent pairs
    if (variant == PolyVariant::AtStageStart) {
        base = c.n;
        i1 = static_cast<std::ptrdiff_t>(c.n) - 2;
        i2 = static_cast<std::ptrdiff_t>(c.n) - 1;
        i3 = static_cast<std::ptrdiff_t>(c.n + c.r) - 1;
        i4 = static_cast<std::ptrdiff_t>(c.n + c.r) - 2;
    } else {
        JSelectResult js = j_select(spec, k);
        if (!js.found)
            throw ResourceError(
                "no disagreement index below n_k: the materialized prefix looks periodic");
        base = js.j;
        i1 = static_cast<std::ptrdiff_t>(js.j) - 1;
        i2 = static_cast<std::ptrdiff_t>(js.j);
        i3 = static_cast<std::ptrdiff_t>(js.j + c.r);
        i4 = static_cast<std::ptrdiff_t>(js.j + c.r) - 1;
    }

    auto stream = generate(spec, c.n + c.r);
    ConvergentTable t(stream);
    t.extend_to(c.n + c.r);
    const auto& a = stream->known_prefix();

    Int c2 = tq(t, i1) * tq(t, i3) - tq(t, i2) * tq(t, i4);
    Int c1 = -(tq(t, i1) * tp(t, i3) - tq(t, i2) * tp(t, i4) + tp(t, i1) * tq(t, i3) -
               tp(t, i2) * tq(t, i4));
    Int c0 = tp(t, i1) * tp(t, i3) - tp(t, i2) * tp(t, i4);

    std::size_t tail_start = (variant == PolyVariant::AtStageStart) ? c.n : base + 1;
    std::vector<Int> prefix(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(tail_start));
    std::vector<Int> block(a.begin() + static_cast<std::ptrdiff_t>(tail_start),
                           a.begin() + static_cast<std::ptrdiff_t>(tail_start + c.r));
    QuadraticSurd root = tail_periodicize(prefix, block);
    bool is_zero = root.quadratic_sign(c2, c1, c0) == 0;
    bool nondeg = c2 != 0;
    return AuxPolynomial{std::move(c2), std::move(c1), std::move(c0), variant,
                         k,             base,          c.r,           std::move(root),
                         is_zero,       nondeg};
}

namespace {

// |P(xi)| as a certified interval bounded away from zero.
Enclosure refine_abs_quadratic(XiEnclosure& xi, const Int& c2, const Int& c1, const Int& c0,
                               std::size_t start_depth) {
    for (std::size_t extra = 2; extra <= kMaxExtraDepth; extra *= 2) {
        Enclosure e = xi.at_depth(start_depth + extra);
        Enclosure val =
            abs_enclosure(Rat(c2) * interval_square(e) + Rat(c1) * e + Enclosure(Rat(c0)));
        if (val.lo > 0 && val.width() * 16 <= val.lo) return val;
    }
    throw ResourceError("auxiliary polynomial value: enclosure budget exhausted");
}

Enclosure log_of_interval(const Enclosure& x, unsigned prec) {
    if (x.lo <= 0) throw SpecError("log of non-positive interval");
    return {log_enclosure(x.lo, prec).lo, log_enclosure(x.hi, prec).hi};
}

// bracket of m^e for positive rational e, integer m >= 1
Enclosure int_power_bracket(const Int& m, const Rat& e, unsigned bits) {
    unsigned long u = static_cast<unsigned long>(e.get_num().get_ui());
    unsigned long v = static_cast<unsigned long>(e.get_den().get_ui());
    return root_bracket(pow_int(m, u), v, bits);
}

}  // namespace

PkExponentReport pk_exponent_report(const QuasiPeriodicSpec& spec, std::size_t k,
                                    PolyVariant variant) {
    StageContext c = stage_context(spec, k);
    AuxPolynomial poly = aux_polynomial(spec, k, variant);
    PkExponentReport rep;
    rep.k = k;
    rep.variant = variant;

    auto stream = spec.make_stream();
    ConvergentTable t(stream);

    std::size_t big;     // index of the large denominator
    Int qa_qb;           // reference denominator product q_a q_b
    unsigned long lam = lambda_exp(c.lambda);
    if (variant == PolyVariant::AtStageStart) {
        big = c.top;  // n + lambda r - 1
        t.extend_to(big);
        const auto& a = stream->known_prefix();
        std::vector<Int> block(a.begin() + static_cast<std::ptrdiff_t>(c.n),
                               a.begin() + static_cast<std::ptrdiff_t>(c.n + c.r));
        rep.K = continuant(block);
        // q_{n + lambda r - 1} >= q_{n-1} K^lambda: the q-word a_1..a_{n-1}
        // followed by lambda complete copies of the block.
        rep.denom_bound_ok =
            tq(t, static_cast<std::ptrdiff_t>(big)) >=
            tq(t, static_cast<std::ptrdiff_t>(c.n) - 1) * pow_int(rep.K, lam);
        qa_qb = tq(t, static_cast<std::ptrdiff_t>(c.n) - 1) *
                tq(t, static_cast<std::ptrdiff_t>(c.n + c.r) - 1);
    } else {
        std::size_t j = poly.base;
        big = to_size(Int(static_cast<unsigned long>(j)) + c.lambda * Int(c.r), "j + lambda r");
        t.extend_to(big);
        const auto& a = stream->known_prefix();
        std::vector<Int> block(a.begin() + static_cast<std::ptrdiff_t>(c.n),
                               a.begin() + static_cast<std::ptrdiff_t>(c.n + c.r));
        rep.K = continuant(block);
        // q_{j + lambda r} * 2^lambda >= q_j K^lambda, the cyclic-shift form
        Int lhs = tq(t, static_cast<std::ptrdiff_t>(big));
        mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), lam);
        rep.denom_bound_ok = lhs >= tq(t, static_cast<std::ptrdiff_t>(j)) * pow_int(rep.K, lam);
        qa_qb = tq(t, static_cast<std::ptrdiff_t>(j)) *
                tq(t, static_cast<std::ptrdiff_t>(j + c.r));
    }

    XiEnclosure xi(spec.make_stream());
    rep.abs_pk_xi = refine_abs_quadratic(xi, poly.c2, poly.c1, poly.c0, big);

    const Int& qbig = tq(t, static_cast<std::ptrdiff_t>(big));
    rep.constant_ratio = make_rat(qbig * qbig, qa_qb) * rep.abs_pk_xi;
    if (qa_qb > 1) {
        unsigned prec = 192;
        Enclosure ln_val = log_of_interval(rep.abs_pk_xi, prec);
        Enclosure ln_ref = log_enclosure(Rat(qa_qb), prec);
        rep.exponent = ln_val * reciprocal(ln_ref);
    }
    return rep;
}

FormProductReport quadruple_form_product(const QuasiPeriodicSpec& spec, std::size_t k) {
    ApproxQuadruple qd = quadruple(spec, k);
    StageContext c = stage_context(spec, k);
    FormProductReport rep;
    rep.k = k;
    rep.Sk = qd.Sk;

    Rat inv_s2 = make_rat(Int(1), qd.Sk * qd.Sk);
    Enclosure alpha_enc = qd.alpha.enclose(inv_s2 / 16);
    Enclosure l3 = abs_enclosure(Rat(qd.Qpk) * alpha_enc - Rat(qd.Qk));
    rep.abs_forms[3] = Enclosure(Rat(qd.Qk));

    XiEnclosure xi(spec.make_stream());
    std::optional<bool> decided;
    for (std::size_t extra = 2; extra <= kMaxExtraDepth; extra *= 2) {
        Enclosure e = xi.at_depth(c.top + extra);
        rep.abs_forms[0] = abs_enclosure(Rat(qd.Qk) * e - Rat(qd.Pk));
        rep.abs_forms[1] = abs_enclosure(Rat(qd.Qpk) * e - Rat(qd.Ppk));
        rep.abs_forms[2] = l3;
        rep.product = rep.abs_forms[0] * rep.abs_forms[1] * l3 * rep.abs_forms[3];
        if (auto lt = rep.product.lt(inv_s2)) {
            decided = *lt;
            if (rep.product.lo > 0) break;  // keep refining until the product is positive too
        }
    }
    if (!decided) throw ResourceError("form product enclosure budget exhausted");
    rep.product_lt_inv_s2 = *decided;
    rep.factor_bounds_ok[0] = rep.abs_forms[0].hi < make_rat(Int(1), qd.Qk);
    rep.factor_bounds_ok[1] = rep.abs_forms[1].hi < make_rat(Int(1), qd.Qpk);
    rep.factor_bounds_ok[2] = rep.abs_forms[2].hi < make_rat(qd.Qpk, qd.Sk * qd.Sk);

    if (rep.product.lo > 0 && qd.Qk > 1) {
        unsigned prec = 192;
        rep.product_exponent =
            log_of_interval(rep.product, prec) * reciprocal(log_enclosure(Rat(qd.Qk), prec));
    }
    return rep;
}

FormProductReport disagreement_form_product(const QuasiPeriodicSpec& spec, std::size_t k,
                                            const Rat& eta) {
    if (eta <= 0 || eta > 1) throw SpecError("eta must lie in (0, 1]");
    StageContext c = stage_context(spec, k);
    JSelectResult js = j_select(spec, k);
    if (!js.found)
        throw ResourceError("no disagreement index below n_k: prefix looks periodic");
    std::size_t j = js.j;
    std::size_t big = to_size(Int(static_cast<unsigned long>(j)) + c.lambda * Int(c.r),
                              "j + lambda r");

    auto stream = spec.make_stream();
    ConvergentTable t(stream);
    t.extend_to(big + 1);

    auto J = static_cast<std::ptrdiff_t>(j);
    auto R = static_cast<std::ptrdiff_t>(c.r);
    FormProductReport rep;
    rep.k = k;
    rep.eta = eta;
    rep.j = j;
    rep.z = {tq(t, J - 1) * tq(t, J + R) - tq(t, J) * tq(t, J + R - 1),
             tq(t, J - 1) * tp(t, J + R) - tq(t, J) * tp(t, J + R - 1),
             tp(t, J - 1) * tq(t, J + R) - tp(t, J) * tq(t, J + R - 1),
             tp(t, J - 1) * tp(t, J + R) - tp(t, J) * tp(t, J + R - 1)};
    rep.abs_forms[3] = Enclosure(Rat(abs(rep.z[0])));

    XiEnclosure xi(spec.make_stream());
    bool done = false;
    for (std::size_t extra = 2; extra <= kMaxExtraDepth && !done; extra *= 2) {
        Enclosure e = xi.at_depth(big + extra);
        Enclosure l1 = abs_enclosure(Rat(rep.z[0]) * interval_square(e) -
                                     Rat(rep.z[1] + rep.z[2]) * e + Enclosure(Rat(rep.z[3])));
        Enclosure l2 = abs_enclosure(Rat(rep.z[0]) * e - Enclosure(Rat(rep.z[1])));
        Enclosure l3 = abs_enclosure(Rat(rep.z[0]) * e - Enclosure(Rat(rep.z[2])));
        rep.abs_forms[0] = l1;
        rep.abs_forms[1] = l2;
        rep.abs_forms[2] = l3;
        rep.product = l1 * l2 * l3 * rep.abs_forms[3];
        done = rep.product.lo > 0 && rep.product.width() * 16 <= rep.product.lo;
    }
    if (!done) throw ResourceError("disagreement form product: enclosure budget exhausted");

    Int qj_qjr = tq(t, J) * tq(t, J + R);
    const Int& qbig = tq(t, static_cast<std::ptrdiff_t>(big));
    // product * q_big^2 / (q_j q_{j+r})^{2+eta}
    Enclosure denom_frac = int_power_bracket(qj_qjr, eta, 128);
    Enclosure denom = Enclosure(Rat(qj_qjr * qj_qjr)) * denom_frac;
    rep.bound_ratio = rep.product * Enclosure(Rat(qbig * qbig)) * reciprocal(denom);
    if (qj_qjr > 1) {
        unsigned prec = 192;
        rep.product_exponent =
            log_of_interval(rep.product, prec) * reciprocal(log_enclosure(Rat(qj_qjr), prec));
    }
    return rep;
}

TailDistanceChain tail_distance_chain(const QuasiPeriodicSpec& spec, std::size_t k, unsigned d) {
    StageContext c = stage_context(spec, k);
    TailDistanceChain rep;
    rep.k = k;
    rep.n_k = Int(static_cast<unsigned long>(c.n));
    rep.lambda = c.lambda;
    rep.r = c.r;

    auto stream = generate(spec, c.top + 3);
    ConvergentTable t(stream);
    t.extend_to(c.top + 3);
    const auto& a = stream->known_prefix();

    std::vector<Int> prefix(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(c.n));
    std::vector<Int> block(a.begin() + static_cast<std::ptrdiff_t>(c.n),
                           a.begin() + static_cast<std::ptrdiff_t>(c.n + c.r));
    QuadraticSurd xi_k = tail_periodicize(prefix, block);

    const Int& qtop = tq(t, static_cast<std::ptrdiff_t>(c.top));
    rep.proximity_bound = make_rat(Int(1), qtop * qtop);

    XiEnclosure xi(spec.make_stream());
    for (std::size_t extra = 1; extra <= kMaxExtraDepth; extra *= 2) {
        Enclosure e_xi = xi.at_depth(c.top + extra);
        Enclosure e_k = xi_k.enclose(rep.proximity_bound / 8);
        rep.distance = abs_enclosure(e_xi - e_k);
        if (rep.distance.hi <= rep.proximity_bound) {
            rep.proximity_ok = true;
            break;
        }
        if (extra == kMaxExtraDepth) rep.proximity_ok = false;
    }

    auto mp = xi_k.minimal_polynomial();
    rep.height = std::max({abs(mp.a2), abs(mp.a1), abs(mp.a0)});
    const Int& q_nr = tq(t, static_cast<std::ptrdiff_t>(c.n + c.r) - 1);
    rep.height_bound = 2 * q_nr * q_nr;
    rep.height_ok = rep.height <= rep.height_bound;

    Int K = continuant(block);
    const Int& q_nm1 = tq(t, static_cast<std::ptrdiff_t>(c.n) - 1);
    rep.split_lower_ok = q_nm1 * K <= q_nr;
    rep.split_upper_ok = q_nr <= 2 * q_nm1 * K;

    // measured ratio |xi - xi_k| * q_{n-1}^2 K^{2d} 2^{lambda/2}
    unsigned long lam = lambda_exp(c.lambda);
    Int k2d = pow_int(K, 2 * d);
    Enclosure sqrt2 = root_bracket(Int(2), 2, 96);
    Enclosure pow_half = powi(sqrt2, lam);
    rep.halving_ratio = rep.distance * Enclosure(Rat(q_nm1 * q_nm1 * k2d)) * pow_half;

    const Int& q_n = tq(t, static_cast<std::ptrdiff_t>(c.n));
    if (q_n > 1)
        rep.lambda_over_log_q =
            Rat(c.lambda) * reciprocal(log_enclosure(Rat(q_n), 192));
    return rep;
}

MirrorWordCheck mirror_word_check(const QuasiPeriodicSpec& spec, std::size_t k) {
    if (spec.layout() != Layout::Packed)
        throw SpecError("mirror word check needs a packed spec");
    StageContext c = stage_context(spec, k);
    auto stream = generate(spec, c.top);
    ConvergentTable t(stream);
    t.extend_to(c.top);
    const auto& a = stream->known_prefix();

    MirrorWordCheck res;
    res.expansion = mirror_ratio(t, c.top);

    std::vector<Int> expected;
    unsigned long lam = lambda_exp(c.lambda);
    expected.reserve(lam * c.r + c.n);
    for (unsigned long i = 0; i < lam; ++i)
        expected.insert(expected.end(), c.rev.begin(), c.rev.end());
    for (std::size_t i = c.n; i-- > 1;) expected.push_back(a[i]);
    canonicalize_quotients(expected);
    res.matches = expected == res.expansion;
    return res;
}

}  // namespace mbcf
