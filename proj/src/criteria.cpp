#include "mbcf/criteria.hpp"

#include <algorithm>

#include "mbcf/real_ops.hpp"

namespace mbcf {

std::string_view theorem_tag(TheoremId id) {
    switch (id) {
        case TheoremId::T21_baker0: return "T2.1-baker0";
        case TheoremId::T22_baker1: return "T2.2-baker1";
        case TheoremId::T23_baker2: return "T2.3-baker2";
        case TheoremId::T31_amel4: return "T3.1-amel4";
        case TheoremId::T32_amel1: return "T3.2-amel1";
        case TheoremId::C33_amel2: return "C3.3-amel2";
        case TheoremId::T34_amel3: return "T3.4-amel3";
    }
    return "?";
}

std::string_view verdict_tag(Verdict v) {
    switch (v) {
        case Verdict::HoldsSymbolically: return "holds-symbolically";
        case Verdict::HoldsAtHorizon: return "holds-at-horizon";
        case Verdict::Fails: return "fails";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

Enclosure b_of_a(const Int& A, const Rat& width_bound) {
    if (A < 2) throw SpecError("B(A) requires A >= 2");
    if (width_bound <= 0) throw SpecError("width bound must be positive");
    for (unsigned prec = 64;; prec *= 2) {
        Enclosure sA = root_bracket(A * A + 4, 2, prec);
        Enclosure x = Rat(1, 2) * (sA + Rat(A));
        Enclosure s5 = root_bracket(Int(5), 2, prec);
        Enclosure phi = Rat(1, 2) * (s5 + Rat(1));
        Enclosure lnx{log_enclosure(x.lo, prec).lo, log_enclosure(x.hi, prec).hi};
        Enclosure lnphi{log_enclosure(phi.lo, prec).lo, log_enclosure(phi.hi, prec).hi};
        Enclosure b = Rat(2) * (lnx * reciprocal(lnphi)) - Rat(1);
        if (b.width() <= width_bound) return b;
        if (prec > (1u << 20)) throw ResourceError("B(A) enclosure did not converge");
    }
}

namespace {

Enclosure sqrt_enclosure(const Enclosure& x, unsigned bits) {
    if (x.lo < 0) throw SpecError("sqrt of negative interval");
    auto lo_end = [&](const Rat& v) {
        Enclosure r = root_bracket(v.get_num() * v.get_den(), 2, bits);
        return r.lo / v.get_den();
    };
    auto hi_end = [&](const Rat& v) {
        Enclosure r = root_bracket(v.get_num() * v.get_den(), 2, bits);
        return r.hi / v.get_den();
    };
    return {lo_end(x.lo), hi_end(x.hi)};
}

// Bracket of n^e for rational e > 0 via integer roots.
Enclosure rat_power_bracket(const Int& n, const Rat& e, unsigned bits) {
    if (n < 1) throw SpecError("power bracket needs n >= 1");
    unsigned long u = static_cast<unsigned long>(e.get_num().get_ui());
    unsigned long v = static_cast<unsigned long>(e.get_den().get_ui());
    return root_bracket(pow_int(n, u), v, bits);
}

struct HorizonStats {
    std::size_t horizon = 0;
    std::size_t window_lo = 0;
    Rat min_ratio;            // min over [window_lo, horizon-1] of l_{k+1}/l_k
    Rat max_lambda_over_n;    // max over [window_lo, horizon]
    bool stream_ended = false;  // table schedule ran out before the horizon
    std::size_t stages_available = 0;
};

HorizonStats horizon_stats(const QuasiPeriodicSpec& spec, std::size_t horizon) {
    HorizonStats h;
    h.horizon = horizon;
    h.window_lo = std::max<std::size_t>(1, horizon / 2);
    std::size_t avail = horizon;
    std::vector<Rat> lam;
    for (std::size_t k = 0; k <= horizon; ++k) {
        try {
            lam.emplace_back(spec.lambda(k));
        } catch (const ResourceError&) {
            h.stream_ended = true;
            avail = k == 0 ? 0 : k - 1;
            break;
        }
    }
    h.stages_available = avail;
    if (avail < 2) throw ResourceError("horizon needs at least two stages of schedule data");
    std::size_t lo = std::min(h.window_lo, avail - 1);
    bool first = true;
    for (std::size_t k = lo; k + 1 <= avail; ++k) {
        Rat ratio = lam[k + 1] / lam[k];
        if (first || ratio < h.min_ratio) h.min_ratio = ratio;
        first = false;
    }
    first = true;
    for (std::size_t k = lo; k <= avail; ++k) {
        Rat v = lam[k] / Rat(spec.n_index(k));
        if (first || v > h.max_lambda_over_n) h.max_lambda_over_n = v;
        first = false;
    }
    return h;
}

// (log lambda_k)(log n_k)^{1/2} / n_k
Enclosure hypgen_stat(const QuasiPeriodicSpec& spec, std::size_t k, unsigned prec) {
    Rat lam(spec.lambda(k));
    Int n = spec.n_index(k);
    Enclosure lnl = lam == 1 ? Enclosure(Rat(0)) : log_enclosure(lam, prec);
    Enclosure lnn = n == 1 ? Enclosure(Rat(0)) : log_enclosure(Rat(n), prec);
    return lnl * sqrt_enclosure(lnn, prec) * Enclosure(make_rat(Int(1), n));
}

// (log lambda_k) / n_k^{2/3 + eps}
Enclosure hypgenamel_stat(const QuasiPeriodicSpec& spec, std::size_t k, const Rat& eps,
                          unsigned prec) {
    Rat lam(spec.lambda(k));
    Int n = spec.n_index(k);
    Enclosure lnl = lam == 1 ? Enclosure(Rat(0)) : log_enclosure(lam, prec);
    Enclosure denom = rat_power_bracket(n, Rat(2, 3) + eps, prec);
    return lnl * reciprocal(denom);
}

template <class F, class G>
std::optional<int> compare_refinable(F f, G g) {
    for (unsigned prec = 64; prec <= (1u << 13); prec *= 2) {
        Enclosure a = f(prec), b = g(prec);
        if (a.lo > b.hi) return 1;
        if (a.hi < b.lo) return -1;
    }
    return std::nullopt;
}

// Sign of (fact - B(A)); the threshold is irrational, so exact facts always
// separate under refinement.
std::optional<int> compare_fact_vs_b(const LimitFact& fact, const Int& A) {
    if (fact.kind == LimitFact::Kind::Infinite) return 1;
    auto fact_enc = [&](unsigned prec) {
        return fact.kind == LimitFact::Kind::Exact ? Enclosure(fact.exact) : fact.enclose(prec);
    };
    return compare_refinable(fact_enc, [&](unsigned prec) {
        return b_of_a(A, pow_rat(Rat(1, 2), static_cast<long>(prec / 8 + 8)));
    });
}

std::string limit_fact_string(const LimitFact& f) {
    switch (f.kind) {
        case LimitFact::Kind::Infinite: return "+infinity";
        case LimitFact::Kind::Exact: return rat_to_string(f.exact);
        case LimitFact::Kind::Enclosable: {
            Enclosure e = f.enclose(128);
            return "[" + decimal_approx(e.lo, 12) + ", " + decimal_approx(e.hi, 12) + "]";
        }
    }
    return "?";
}

using Witnesses = std::vector<std::pair<std::string, std::string>>;

CriterionCertificate make_cert(TheoremId id, Verdict v, Witnesses w,
                               std::vector<std::string> caveats) {
    return {id, v, std::move(w), std::move(caveats)};
}

}  // namespace

std::vector<CriterionCertificate> certify(const QuasiPeriodicSpec& spec,
                                          const CertifyOptions& options) {
    if (options.horizon < 2) throw SpecError("certify: horizon must be >= 2");
    if (options.epsilon <= 0) throw SpecError("certify: epsilon must be positive");

    const std::vector<TheoremId> order = {
        TheoremId::T21_baker0, TheoremId::T22_baker1, TheoremId::T23_baker2,
        TheoremId::T31_amel4,  TheoremId::T32_amel1,  TheoremId::C33_amel2,
        TheoremId::T34_amel3,
    };

    std::vector<CriterionCertificate> out;

    // Non-periodicity gate: every criterion requires it, and it is never
    // inferred from finite data -- only asserted or witnessed.
    if (!spec.assertions().not_ultimately_periodic) {
        for (TheoremId id : order)
            out.push_back(make_cert(id, Verdict::NotApplicable, {},
                                    {"not-ultimately-periodic assertion missing from spec"}));
        return out;
    }
    if (spec.provably_ultimately_periodic()) {
        for (TheoremId id : order)
            out.push_back(make_cert(
                id, Verdict::NotApplicable, {},
                {"generated word is ultimately periodic (all schedules constant)"}));
        return out;
    }
    std::string periodicity_caveat =
        spec.witness_verified()
            ? "non-periodicity witnessed: alternating singleton blocks with unbounded schedule"
            : "non-periodicity user-asserted";

    AsymptoticFacts facts;
    if (!options.force_horizon) facts = schedule_asymptotics(spec);
    bool symbolic = facts.closed_form;

    HorizonStats hs;
    bool have_horizon = false;
    auto need_horizon = [&]() -> const HorizonStats& {
        if (!have_horizon) {
            hs = horizon_stats(spec, options.horizon);
            have_horizon = true;
        }
        return hs;
    };

    Int A = spec.max_quotient();
    if (A < 1) A = 1;  // a_0 = 0 alone cannot happen (blocks are nonempty)
    std::size_t r_max = 0;
    for (const Stage& st : spec.stages()) r_max = std::max(r_max, st.block.size());
    bool packed = spec.layout() == Layout::Packed;

    auto window_string = [&](const HorizonStats& h) {
        return "[" + std::to_string(std::min(h.window_lo, h.stages_available)) + ", " +
               std::to_string(h.stages_available) + "]";
    };

    for (TheoremId id : order) {
        Witnesses w;
        std::vector<std::string> caveats{periodicity_caveat};
        Verdict verdict = Verdict::Fails;

        switch (id) {
            case TheoremId::T21_baker0: {
                // (borne): r_k is bounded by the cyclic stage structure while
                // n_k is unbounded, so limsup r_k/n_k = 0. Reported as its own
                // flag; the theorem text says the assumption can be dropped.
                w.emplace_back("borne", "holds");
                w.emplace_back("r_max", std::to_string(r_max));
                caveats.push_back(
                    "(borne) is checked separately; the stated hypotheses are used as written");
                if (symbolic) {
                    // divergence statistic provably tends to 0 for closed forms
                    verdict = facts.hypgen_limsup == AsymptoticFacts::Divergence::ProvedDivergent
                                  ? Verdict::HoldsSymbolically
                                  : Verdict::Fails;
                    w.emplace_back("hypgen_limit", "0");
                    w.emplace_back("note", facts.notes);
                } else {
                    const HorizonStats& h = need_horizon();
                    std::size_t mid = std::min(h.window_lo, h.stages_available - 1);
                    auto cmp = compare_refinable(
                        [&](unsigned p) { return hypgen_stat(spec, h.stages_available, p); },
                        [&](unsigned p) { return hypgen_stat(spec, mid, p); });
                    verdict = (cmp && *cmp > 0) ? Verdict::HoldsAtHorizon : Verdict::Fails;
                    Enclosure end = hypgen_stat(spec, h.stages_available, 128);
                    w.emplace_back("hypgen_stat_window_end", decimal_approx(end.hi, 12));
                    w.emplace_back("horizon", std::to_string(h.horizon));
                    w.emplace_back("window", window_string(h));
                    caveats.push_back("divergence is a tail property; horizon evidence only");
                }
                break;
            }
            case TheoremId::T22_baker1: {
                Enclosure b = b_of_a(A, Rat(1, 1000000000));
                w.emplace_back("A", dec(A));
                w.emplace_back("B_A", "[" + decimal_approx(b.lo, 12) + ", " +
                                          decimal_approx(b.hi, 12) + "]");
                w.emplace_back("r_max", std::to_string(r_max));
                if (symbolic) {
                    auto cmp = compare_fact_vs_b(facts.limsup_lambda_over_n, A);
                    verdict = (cmp && *cmp > 0) ? Verdict::HoldsSymbolically : Verdict::Fails;
                    w.emplace_back("limsup_lambda_over_n",
                                   limit_fact_string(facts.limsup_lambda_over_n));
                } else {
                    const HorizonStats& h = need_horizon();
                    Rat m = h.max_lambda_over_n;
                    auto cmp = compare_refinable(
                        [&](unsigned) { return Enclosure(m); },
                        [&](unsigned p) {
                            return b_of_a(A, pow_rat(Rat(1, 2), static_cast<long>(p / 8 + 8)));
                        });
                    verdict = (cmp && *cmp > 0) ? Verdict::HoldsAtHorizon : Verdict::Fails;
                    w.emplace_back("max_lambda_over_n", rat_to_string(m));
                    w.emplace_back("horizon", std::to_string(h.horizon));
                    w.emplace_back("window", window_string(h));
                }
                break;
            }
            case TheoremId::T23_baker2:
            case TheoremId::T34_amel3:
            case TheoremId::C33_amel2: {
                if (!packed) {
                    verdict = Verdict::NotApplicable;
                    caveats.push_back("requires the packed displayed expansion (no gaps)");
                    break;
                }
                Rat threshold = (id == TheoremId::C33_amel2) ? Rat(1) : Rat(2);
                if (id == TheoremId::T23_baker2) {
                    w.emplace_back("A", dec(A));
                    w.emplace_back("r_max", std::to_string(r_max));
                    caveats.push_back("superseded by C3.3-amel2; kept for comparison");
                }
                if (id == TheoremId::C33_amel2) {
                    w.emplace_back("q_root_bound", dec(A + 1));
                    w.emplace_back("r_max", std::to_string(r_max));
                }
                w.emplace_back("threshold", rat_to_string(threshold));
                if (symbolic) {
                    auto cmp = facts.ratio_limit.compare(threshold);
                    verdict = (cmp && *cmp > 0) ? Verdict::HoldsSymbolically : Verdict::Fails;
                    w.emplace_back("liminf_ratio", limit_fact_string(facts.ratio_limit));
                } else {
                    const HorizonStats& h = need_horizon();
                    verdict = h.min_ratio > threshold ? Verdict::HoldsAtHorizon : Verdict::Fails;
                    w.emplace_back("min_ratio_window", rat_to_string(h.min_ratio));
                    w.emplace_back("horizon", std::to_string(h.horizon));
                    w.emplace_back("window", window_string(h));
                }
                break;
            }
            case TheoremId::T31_amel4: {
                w.emplace_back("epsilon", rat_to_string(options.epsilon));
                if (symbolic) {
                    verdict =
                        facts.hypgenamel_limsup == AsymptoticFacts::Divergence::ProvedDivergent
                            ? Verdict::HoldsSymbolically
                            : Verdict::Fails;
                    w.emplace_back("hypgenamel_limit", "0");
                    w.emplace_back("note", facts.notes);
                } else {
                    const HorizonStats& h = need_horizon();
                    std::size_t mid = std::min(h.window_lo, h.stages_available - 1);
                    auto cmp = compare_refinable(
                        [&](unsigned p) {
                            return hypgenamel_stat(spec, h.stages_available, options.epsilon, p);
                        },
                        [&](unsigned p) { return hypgenamel_stat(spec, mid, options.epsilon, p); });
                    verdict = (cmp && *cmp > 0) ? Verdict::HoldsAtHorizon : Verdict::Fails;
                    Enclosure end = hypgenamel_stat(spec, h.stages_available, options.epsilon, 128);
                    w.emplace_back("hypgenamel_stat_window_end", decimal_approx(end.hi, 12));
                    w.emplace_back("horizon", std::to_string(h.horizon));
                    w.emplace_back("window", window_string(h));
                    caveats.push_back("divergence is a tail property; horizon evidence only");
                }
                break;
            }
            case TheoremId::T32_amel1: {
                // q_n^{1/n} <= max quotient + 1 holds unconditionally here
                // since every generated quotient comes from a finite symbol set.
                w.emplace_back("q_root_bound", dec(A + 1));
                if (symbolic) {
                    auto cmp = facts.limsup_lambda_over_n.compare(Rat(0));
                    verdict = (cmp && *cmp > 0) ? Verdict::HoldsSymbolically : Verdict::Fails;
                    w.emplace_back("limsup_lambda_over_n",
                                   limit_fact_string(facts.limsup_lambda_over_n));
                    if (facts.conservative_lambda_over_n > 0)
                        w.emplace_back("conservative_lower_bound",
                                       rat_to_string(facts.conservative_lambda_over_n));
                } else {
                    const HorizonStats& h = need_horizon();
                    verdict = h.max_lambda_over_n > 0 ? Verdict::HoldsAtHorizon : Verdict::Fails;
                    w.emplace_back("max_lambda_over_n", rat_to_string(h.max_lambda_over_n));
                    w.emplace_back("horizon", std::to_string(h.horizon));
                    w.emplace_back("window", window_string(h));
                    caveats.push_back(
                        "positivity of a limsup is not decidable at a finite horizon; "
                        "reporting the tail-window maximum");
                }
                break;
            }
        }
        out.push_back(make_cert(id, verdict, std::move(w), std::move(caveats)));
    }
    return out;
}

}  // namespace mbcf
