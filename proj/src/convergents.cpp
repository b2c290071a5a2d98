#include "mbcf/convergents.hpp"

#include <algorithm>

namespace mbcf {

ConvergentTable::ConvergentTable(std::shared_ptr<PartialQuotientStream> stream)
    : stream_(std::move(stream)) {
    if (!stream_) throw SpecError("null stream");
    ps_ = {Int(0), Int(1)};  // p_{-2}, p_{-1}
    qs_ = {Int(1), Int(0)};  // q_{-2}, q_{-1}
    extend_to(0);
}

void ConvergentTable::extend_to(std::size_t n) {
    if (!try_extend_to(n))
        throw ResourceError("convergent table: stream exhausted before index " +
                            std::to_string(n));
}

bool ConvergentTable::try_extend_to(std::size_t n) {
    while (size() <= n) {
        std::size_t i = size();
        if (!stream_->try_materialize(i)) return false;
        const Int& a = stream_->known_prefix()[i];
        ps_.push_back(a * ps_[ps_.size() - 1] + ps_[ps_.size() - 2]);
        qs_.push_back(a * qs_[qs_.size() - 1] + qs_[qs_.size() - 2]);
    }
    return true;
}

bool ConvergentTable::complete() const {
    auto len = stream_->finite_length();
    return len && *len == size();
}

ConvergentTable convergents(std::shared_ptr<PartialQuotientStream> stream, std::size_t n) {
    ConvergentTable t(std::move(stream));
    t.extend_to(n);
    return t;
}

EncloseResult enclose(ConvergentTable& table, const Rat& width_bound) {
    if (width_bound <= 0) throw SpecError("width bound must be positive");
    table.try_extend_to(1);

    auto scan_first_pair = [&](std::size_t upto) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i + 1 <= upto; ++i) {
            // gap between convergents i, i+1 is 1/(q_i q_{i+1})
            if (Rat(table.q(static_cast<std::ptrdiff_t>(i)) *
                    table.q(static_cast<std::ptrdiff_t>(i + 1))) *
                    width_bound >=
                1)
                return i;
        }
        return std::nullopt;
    };

    for (;;) {
        if (table.complete()) {
            // terminating rational: the final convergent is the exact value
            Rat v = table.convergent(table.max_index());
            return {Enclosure(v), Rat(0), true, table.max_index()};
        }
        if (table.size() >= 2) {
            if (auto i = scan_first_pair(table.max_index())) {
                Rat a = table.convergent(*i), b = table.convergent(*i + 1);
                Enclosure e{std::min(a, b), std::max(a, b)};
                return {e, e.width(), true, *i};
            }
        }
        if (!table.try_extend_to(std::max<std::size_t>(3, table.size() * 2))) {
            if (table.complete()) continue;  // exact value after all
            break;
        }
    }

    // prefix exhausted: report the best (deepest) bracket achieved
    if (table.size() < 2) {
        Rat v = table.convergent(0);
        return {Enclosure(v), Rat(0), false, 0};
    }
    std::size_t i = table.max_index() - 1;
    Rat a = table.convergent(i), b = table.convergent(i + 1);
    Enclosure e{std::min(a, b), std::max(a, b)};
    return {e, e.width(), false, i};
}

std::vector<Int> expand_rational(const Int& p, const Int& q) {
    if (q < 1) throw SpecError("expand_rational: denominator must be >= 1");
    std::vector<Int> out;
    Int num = p, den = q;
    while (den != 0) {
        Int a = floor_div(num, den);
        out.push_back(a);
        Int rem = num - a * den;
        num = den;
        den = rem;
    }
    // Euclid with floor division already ends with a quotient >= 2 whenever
    // the expansion has length > 1.
    return out;
}

Rat cf_value(std::span<const Int> quotients) {
    if (quotients.empty()) throw SpecError("cf_value: empty expansion");
    Int p2(0), p1(1), q2(1), q1(0);
    for (std::size_t i = 0; i < quotients.size(); ++i) {
        if (i >= 1 && quotients[i] < 1)
            throw SpecError("cf_value: partial quotient below 1 at index " + std::to_string(i));
        Int p = quotients[i] * p1 + p2;
        Int q = quotients[i] * q1 + q2;
        p2 = p1; p1 = p;
        q2 = q1; q1 = q;
    }
    return make_rat(p1, q1);
}

void canonicalize_quotients(std::vector<Int>& w) {
    if (w.size() >= 2 && w.back() == 1) {
        w.pop_back();
        w.back() += 1;
    }
}

Int continuant(std::span<const Int> entries) {
    Int km1(1), km2(0);  // K_0, K_{-1}
    for (const Int& a : entries) {
        if (a < 1) throw SpecError("continuant entries must be >= 1");
        Int k = a * km1 + km2;
        km2 = km1;
        km1 = k;
    }
    return km1;
}

std::vector<Int> mirror_ratio(const ConvergentTable& table, std::size_t n) {
    if (n < 2) throw SpecError("mirror_ratio requires n >= 2");
    if (table.size() <= n) throw SpecError("mirror_ratio: table does not hold index n");
    return expand_rational(table.q(static_cast<std::ptrdiff_t>(n)),
                           table.q(static_cast<std::ptrdiff_t>(n - 1)));
}

ProximityResult check_proximity(std::shared_ptr<PartialQuotientStream> x,
                                std::shared_ptr<PartialQuotientStream> y, std::size_t n) {
    ProximityResult res;
    for (std::size_t i = 0; i <= n; ++i) {
        const Int& ax = x->at(i);
        const Int& ay = y->at(i);
        if (ax != ay) {
            res.agreed = false;
            res.first_disagreement = i;
            return res;
        }
    }
    res.agreed = true;

    ConvergentTable tx(x), ty(y);
    tx.extend_to(n);
    const Int& qn = tx.q(static_cast<std::ptrdiff_t>(n));
    res.bound = make_rat(Int(1), qn * qn);

    // Enclose each value from the convergent pair (n+1, n+2) of its own
    // stream (or exactly, for a terminating stream). Both enclosures lie in
    // the closed image interval of the shared depth-n prefix map, whose width
    // is 1/(q_n (q_n + q_{n-1})) <= q_n^{-2}.
    auto value_enclosure = [&](ConvergentTable& t) -> Enclosure {
        if (!t.try_extend_to(n + 2)) {
            if (!t.complete())
                throw ResourceError("check_proximity: stream ends before index n+2");
            return Enclosure(t.convergent(t.max_index()));
        }
        Rat a = t.convergent(n + 1), b = t.convergent(n + 2);
        return {std::min(a, b), std::max(a, b)};
    };
    Enclosure ex = value_enclosure(tx);
    Enclosure ey = value_enclosure(ty);
    res.certified_gap = sup_distance(ex, ey);
    res.holds = res.certified_gap <= res.bound;
    return res;
}

GrowthReport growth_bounds(const ConvergentTable& table, const Int& M) {
    if (M < 1) throw SpecError("growth_bounds: M must be >= 1");
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table.quotient(i) > M)
            throw SpecError("growth_bounds: quotient a_" + std::to_string(i) + " exceeds M");
    GrowthReport rep;
    Int mp1_pow(1);  // (M+1)^n
    for (std::size_t i = 1; i < table.size(); ++i) {
        mp1_pow *= (M + 1);
        const Int& qn = table.q(static_cast<std::ptrdiff_t>(i));
        GrowthRow row;
        row.n = i;
        Int two_pow(1);
        mpz_mul_2exp(two_pow.get_mpz_t(), two_pow.get_mpz_t(), i - 1);  // 2^{n-1}
        row.lower_ok = two_pow <= qn * qn;
        row.upper_ok = qn <= mp1_pow;
        rep.all_ok = rep.all_ok && row.lower_ok && row.upper_ok;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace mbcf
