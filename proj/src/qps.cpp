#include "mbcf/qps.hpp"

#include <algorithm>

#include "mbcf/real_ops.hpp"

namespace mbcf {

// ---------------------------------------------------------------- schedules

ScheduleExpr ScheduleExpr::constant(Int c) {
    if (c < 1) throw SpecError("constant schedule must be >= 1");
    ScheduleExpr s;
    s.kind_ = Kind::Constant;
    s.c_ = Rat(c);
    return s;
}

ScheduleExpr ScheduleExpr::affine(Int slope, Int offset) {
    if (slope < 0) throw SpecError("affine schedule slope must be >= 0");
    if (offset < 1) throw SpecError("affine schedule offset must be >= 1");
    ScheduleExpr s;
    s.kind_ = Kind::Affine;
    s.c_ = Rat(slope);
    s.b_ = Rat(offset);
    return s;
}

ScheduleExpr ScheduleExpr::polynomial(Rat c, Rat beta) {
    if (c <= 0 || beta <= 0) throw SpecError("polynomial schedule needs c > 0, beta > 0");
    ScheduleExpr s;
    s.kind_ = Kind::Polynomial;
    s.c_ = std::move(c);
    s.beta_ = std::move(beta);
    return s;
}

ScheduleExpr ScheduleExpr::geometric(Rat c, Rat theta) {
    if (c <= 0) throw SpecError("geometric schedule needs c > 0");
    if (theta <= 1) throw SpecError("geometric schedule needs theta > 1");
    ScheduleExpr s;
    s.kind_ = Kind::Geometric;
    s.c_ = std::move(c);
    s.theta_ = std::move(theta);
    return s;
}

ScheduleExpr ScheduleExpr::exp_power(Rat c, Rat beta) {
    if (c <= 0 || beta <= 0) throw SpecError("exp-power schedule needs c > 0, beta > 0");
    ScheduleExpr s;
    s.kind_ = Kind::ExpPower;
    s.c_ = std::move(c);
    s.beta_ = std::move(beta);
    return s;
}

ScheduleExpr ScheduleExpr::table(std::vector<Int> values) {
    if (values.empty()) throw SpecError("table schedule must be nonempty");
    for (const Int& v : values)
        if (v < 1) throw SpecError("table schedule entries must be >= 1");
    ScheduleExpr s;
    s.kind_ = Kind::Table;
    s.table_ = std::move(values);
    return s;
}

bool ScheduleExpr::unbounded() const {
    switch (kind_) {
        case Kind::Constant: return false;
        case Kind::Affine: return c_ > 0;
        case Kind::Polynomial:
        case Kind::Geometric:
        case Kind::ExpPower: return true;
        case Kind::Table: return false;
    }
    return false;
}

namespace {

// Exact bracket of k^beta for beta = u/v > 0; degenerate when k^u is a
// perfect v-th power.
Enclosure power_bracket(std::size_t k, const Rat& beta, unsigned frac_bits) {
    unsigned long u = static_cast<unsigned long>(beta.get_num().get_ui());
    unsigned long v = static_cast<unsigned long>(beta.get_den().get_ui());
    if (!beta.get_num().fits_ulong_p() || !beta.get_den().fits_ulong_p())
        throw SpecError("schedule exponent out of range");
    Int base(static_cast<unsigned long>(k));
    return root_bracket(pow_int(base, u), v, frac_bits);
}

Int ceil_of_enclosure_or_refine(const std::function<Enclosure(unsigned)>& f, const char* what) {
    for (unsigned prec = 64; prec <= (1u << 16); prec *= 2) {
        Enclosure e = f(prec);
        Int lo = ceil_rat(e.lo), hi = ceil_rat(e.hi);
        if (lo == hi) return lo;
    }
    throw ResourceError(std::string("schedule ceiling did not stabilize: ") + what);
}

}  // namespace

Int ScheduleExpr::eval(std::size_t k) const {
    Int result;
    switch (kind_) {
        case Kind::Constant:
            result = c_.get_num();
            break;
        case Kind::Affine:
            result = c_.get_num() * Int(static_cast<unsigned long>(k)) + b_.get_num();
            break;
        case Kind::Geometric:
            result = ceil_rat(c_ * pow_rat(theta_, static_cast<long>(k)));
            break;
        case Kind::Polynomial: {
            if (k == 0) throw SpecError("polynomial schedule evaluates to 0 at k = 0");
            if (beta_.get_den() == 1) {
                result = ceil_rat(c_ * pow_rat(Rat(static_cast<unsigned long>(k)),
                                               beta_.get_num().get_si()));
                break;
            }
            Enclosure root = power_bracket(k, beta_, 64);
            if (root.is_point()) {
                result = ceil_rat(c_ * root.lo);
                break;
            }
            result = ceil_of_enclosure_or_refine(
                [&](unsigned prec) { return c_ * power_bracket(k, beta_, prec); }, "polynomial");
            break;
        }
        case Kind::ExpPower: {
            if (k == 0) return Int(1);  // exp(0) = 1 exactly
            Enclosure root = beta_.get_den() == 1
                                 ? Enclosure(pow_rat(Rat(static_cast<unsigned long>(k)),
                                                     beta_.get_num().get_si()))
                                 : power_bracket(k, beta_, 64);
            if (root.is_point()) {
                Rat x = c_ * root.lo;  // exp of a nonzero rational is irrational
                result = ceil_of_enclosure_or_refine(
                    [&](unsigned prec) { return exp_enclosure(x, prec); }, "exp-power");
            } else {
                result = ceil_of_enclosure_or_refine(
                    [&](unsigned prec) {
                        Enclosure r = c_ * power_bracket(k, beta_, prec);
                        return Enclosure{exp_enclosure(r.lo, prec).lo,
                                         exp_enclosure(r.hi, prec).hi};
                    },
                    "exp-power");
            }
            break;
        }
        case Kind::Table:
            if (k >= table_.size())
                throw ResourceError("table schedule exhausted at stage " + std::to_string(k));
            result = table_[k];
            break;
    }
    if (result < 1) throw SpecError("schedule evaluates below 1 at stage " + std::to_string(k));
    return result;
}

// ---------------------------------------------------------------- spec

QuasiPeriodicSpec::QuasiPeriodicSpec(std::vector<Int> header, Layout layout,
                                     std::vector<Stage> stages, Assertions assertions)
    : header_(std::move(header)),
      layout_(layout),
      stages_(std::move(stages)),
      assertions_(std::move(assertions)) {
    if (header_.empty()) throw SpecError("header must hold at least a_0 (n_0 >= 1)");
    if (header_[0] < 0) throw SpecError("a_0 must be >= 0");
    for (std::size_t i = 1; i < header_.size(); ++i)
        if (header_[i] < 1) throw SpecError("header quotients after a_0 must be >= 1");
    if (stages_.empty()) throw SpecError("spec needs at least one stage");
    for (const Stage& st : stages_) {
        if (st.block.empty()) throw SpecError("stage block must be nonempty");
        for (const Int& b : st.block)
            if (b < 1) throw SpecError("block quotients must be >= 1");
        for (const Int& g : st.gap)
            if (g < 1) throw SpecError("gap quotients must be >= 1");
        if (layout_ == Layout::Packed && !st.gap.empty())
            throw SpecError("packed layout admits no gap quotients");
    }
    n_cache_.push_back(Int(header_.size()));
}

Int QuasiPeriodicSpec::lambda(std::size_t k) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    while (lambda_cache_.size() <= k)
        lambda_cache_.push_back(stage(lambda_cache_.size()).schedule.eval(lambda_cache_.size()));
    return lambda_cache_[k];
}

Int QuasiPeriodicSpec::n_index(std::size_t k) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (k < n_cache_.size()) return n_cache_[k];
    }
    while (true) {
        std::size_t have;
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            have = n_cache_.size();
            if (k < have) return n_cache_[k];
        }
        Int lam = lambda(have - 1);  // takes the lock itself
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (n_cache_.size() == have) {
            const Stage& st = stage(have - 1);
            n_cache_.push_back(n_cache_.back() + lam * Int(st.block.size()) +
                               Int(st.gap.size()));
        }
    }
}

Int QuasiPeriodicSpec::max_quotient() const {
    Int m = header_[0];
    for (const Int& a : header_) m = std::max(m, a);
    for (const Stage& st : stages_) {
        for (const Int& a : st.block) m = std::max(m, a);
        for (const Int& a : st.gap) m = std::max(m, a);
    }
    return m;
}

bool QuasiPeriodicSpec::provably_ultimately_periodic() const {
    return std::all_of(stages_.begin(), stages_.end(), [](const Stage& st) {
        return st.schedule.kind() == ScheduleExpr::Kind::Constant;
    });
}

bool QuasiPeriodicSpec::uniform_schedule() const {
    return std::all_of(stages_.begin(), stages_.end(), [&](const Stage& st) {
        return st.schedule == stages_[0].schedule;
    });
}

bool QuasiPeriodicSpec::witness_verified() const {
    if (!assertions_.witness || *assertions_.witness != "alternating-singleton-blocks")
        return false;
    bool adjacent_distinct = false;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        const Stage& st = stages_[i];
        if (st.block.size() != 1 || !st.schedule.unbounded()) return false;
        if (st.block[0] != stages_[(i + 1) % stages_.size()].block[0]) adjacent_distinct = true;
    }
    return adjacent_distinct;
}

namespace {

// Sequential quotient generator over the cyclic stage structure. The stream
// cache guarantees strictly increasing call indices, so plain mutable state
// is safe here.
struct StageWalker {
    std::vector<Int> header;
    std::vector<Stage> stages;

    std::size_t k = 0;               // current global stage
    unsigned long long pos = 0;      // emitted quotients within the stage
    Int reps_extent{0};              // lambda_k * r_k
    Int full_extent{0};              // + gap length
    bool stage_ready = false;

    std::optional<Int> next(std::size_t i) {
        if (i < header.size()) return header[i];
        for (;;) {
            if (!stage_ready) {
                const Stage& st = stages[k % stages.size()];
                Int lam;
                try {
                    lam = st.schedule.eval(k);
                } catch (const ResourceError&) {
                    return std::nullopt;  // table schedule exhausted: finite stream
                }
                reps_extent = lam * Int(st.block.size());
                full_extent = reps_extent + Int(st.gap.size());
                pos = 0;
                stage_ready = true;
            }
            const Stage& st = stages[k % stages.size()];
            if (mpz_cmp_ui(full_extent.get_mpz_t(), pos) > 0) {
                Int value;
                if (mpz_cmp_ui(reps_extent.get_mpz_t(), pos) > 0)
                    value = st.block[pos % st.block.size()];
                else
                    value = st.gap[static_cast<std::size_t>(
                        pos - reps_extent.get_ui())];
                ++pos;
                return value;
            }
            ++k;
            stage_ready = false;
        }
    }
};

}  // namespace

std::shared_ptr<PartialQuotientStream> QuasiPeriodicSpec::make_stream() const {
    auto walker = std::make_shared<StageWalker>();
    walker->header = header_;
    walker->stages = stages_;
    return std::make_shared<PartialQuotientStream>(
        header_[0], [walker](std::size_t i) { return walker->next(i); });
}

std::shared_ptr<PartialQuotientStream> generate(const QuasiPeriodicSpec& spec, std::size_t n) {
    auto s = spec.make_stream();
    s->at(n);
    return s;
}

std::vector<RepVerdict> verify_rep(std::span<const Int> prefix,
                                   const std::vector<RepClaim>& claims) {
    std::vector<RepVerdict> out;
    out.reserve(claims.size());
    for (const RepClaim& c : claims) {
        if (c.n < 0 || c.r < 1 || c.lambda < 1) throw SpecError("malformed repetition claim");
        RepVerdict v{};
        Int required = c.n + c.lambda * c.r;  // indices up to n + lambda r - 1
        if (!required.fits_ulong_p() ||
            static_cast<std::size_t>(required.get_ui()) > prefix.size()) {
            v.status = RepVerdict::Status::InsufficientPrefix;
            v.required_length = required.fits_ulong_p()
                                    ? static_cast<std::size_t>(required.get_ui())
                                    : static_cast<std::size_t>(-1);
            out.push_back(v);
            continue;
        }
        v.required_length = static_cast<std::size_t>(required.get_ui());
        std::size_t n = to_size(c.n, "claim n");
        std::size_t r = to_size(c.r, "claim r");
        std::size_t lam = to_size(c.lambda, "claim lambda");
        v.status = RepVerdict::Status::Holds;
        for (std::size_t m = n; m < n + (lam - 1) * r; ++m) {
            if (prefix[m + r] != prefix[m]) {
                v.status = RepVerdict::Status::Violated;
                v.first_violation = m;
                break;
            }
        }
        out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------- asymptotics

std::optional<int> LimitFact::compare(const Rat& threshold) const {
    switch (kind) {
        case Kind::Infinite: return 1;
        case Kind::Exact: return exact < threshold ? -1 : (exact > threshold ? 1 : 0);
        case Kind::Enclosable:
            for (unsigned prec = 64; prec <= (1u << 14); prec *= 2) {
                Enclosure e = enclose(prec);
                if (e.lo > threshold) return 1;
                if (e.hi < threshold) return -1;
            }
            return std::nullopt;
    }
    return std::nullopt;
}

namespace {

// limsup lambda_k/n_k for a ratio-theta schedule over the cyclic block
// lengths: along the residue class rho the limit is
//   (1 - theta^{-L}) / sum_{i=1..L} r_{(rho-i) mod L} theta^{-i},
// and the limsup is the max over rho. Evaluated on an enclosure of theta so
// the same code serves rational theta (exact) and theta = e^c.
Enclosure limsup_ratio_enclosure(const Enclosure& theta, const std::vector<std::size_t>& rs) {
    std::size_t L = rs.size();
    Enclosure inv_thL = reciprocal(powi(theta, static_cast<unsigned long>(L)));
    Enclosure numer = Enclosure(Rat(1)) - inv_thL;
    Enclosure best;
    bool first = true;
    for (std::size_t rho = 0; rho < L; ++rho) {
        Enclosure s(Rat(0));
        for (std::size_t i = 1; i <= L; ++i) {
            std::size_t idx = (rho + L - (i % L)) % L;
            Enclosure term = Rat(static_cast<unsigned long>(rs[idx])) *
                             reciprocal(powi(theta, static_cast<unsigned long>(i)));
            s = s + term;
        }
        Enclosure val = numer * reciprocal(s);
        if (first) {
            best = val;
            first = false;
        } else {
            best = Enclosure{std::max(best.lo, val.lo), std::max(best.hi, val.hi)};
        }
    }
    return best;
}

}  // namespace

AsymptoticFacts schedule_asymptotics(const QuasiPeriodicSpec& spec) {
    AsymptoticFacts f;
    if (!spec.uniform_schedule() || !spec.stages().front().schedule.closed_form()) {
        f.closed_form = false;
        f.notes = "horizon-only: table or non-uniform stage schedules";
        return f;
    }
    const ScheduleExpr& s = spec.stages().front().schedule;
    std::vector<std::size_t> rs;
    std::size_t r_max = 0;
    for (const Stage& st : spec.stages()) {
        rs.push_back(st.block.size());
        r_max = std::max(r_max, st.block.size());
    }

    f.closed_form = true;
    // Any closed-form-in-k rule loses to n_k: n_{k+1} >= n_k + lambda_k r_k
    // makes n_k at least of the order of lambda_{k-1}, so log(lambda_k) grows
    // like a polynomial in k while the denominators grow at least like
    // lambda itself. Both divergence statistics tend to 0.
    f.hypgen_limsup = AsymptoticFacts::Divergence::ProvedZero;
    f.hypgenamel_limsup = AsymptoticFacts::Divergence::ProvedZero;
    f.notes =
        "closed-form schedule: n outgrows every elementary-in-k lambda, so the "
        "divergence statistics tend to 0";

    using K = ScheduleExpr::Kind;
    switch (s.kind()) {
        case K::Constant:
        case K::Affine:
        case K::Polynomial:
            f.ratio_limit = LimitFact::exactly(Rat(1));
            f.limsup_lambda_over_n = LimitFact::exactly(Rat(0));
            break;
        case K::Geometric: {
            f.ratio_limit = LimitFact::exactly(s.theta());
            Enclosure v = limsup_ratio_enclosure(Enclosure(s.theta()), rs);
            f.limsup_lambda_over_n = LimitFact::exactly(v.lo);  // exact for rational theta
            f.conservative_lambda_over_n =
                (s.theta() - 1) / (Rat(static_cast<unsigned long>(r_max)) * s.theta());
            break;
        }
        case K::ExpPower: {
            if (s.beta() < 1) {
                f.ratio_limit = LimitFact::exactly(Rat(1));
                f.limsup_lambda_over_n = LimitFact::exactly(Rat(0));
            } else if (s.beta() == 1) {
                Rat c = s.c();
                f.ratio_limit = LimitFact::enclosable(
                    [c](unsigned prec) { return exp_enclosure(c, prec); });
                f.limsup_lambda_over_n = LimitFact::enclosable([c, rs](unsigned prec) {
                    return limsup_ratio_enclosure(exp_enclosure(c, prec), rs);
                });
            } else {
                f.ratio_limit = LimitFact::infinite();
                f.limsup_lambda_over_n = LimitFact::infinite();
            }
            break;
        }
        case K::Table:
            break;  // unreachable: closed_form() checked above
    }
    return f;
}

// ---------------------------------------------------------------- json

namespace {

Int json_to_int(const nlohmann::json& j, const char* what) {
    if (j.is_string()) {
        Int v;
        if (v.set_str(j.get<std::string>(), 10) != 0)
            throw SpecError(std::string("bad integer for ") + what + ": " + j.dump());
        return v;
    }
    if (j.is_number_integer()) return Int(j.get<long long>());
    throw SpecError(std::string("expected decimal-string integer for ") + what);
}

Rat json_to_rat(const nlohmann::json& j, const char* what) {
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rat(static_cast<long>(j.get<long long>()));
    throw SpecError(std::string("expected rational string for ") + what);
}

std::vector<Int> json_to_int_list(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw SpecError(std::string("expected array for ") + what);
    std::vector<Int> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(json_to_int(e, what));
    return out;
}

ScheduleExpr schedule_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw SpecError("schedule needs a kind");
    std::string kind = j.at("kind").get<std::string>();
    nlohmann::json params = j.value("params", nlohmann::json::object());
    if (kind == "constant") return ScheduleExpr::constant(json_to_int(params.at("c"), "c"));
    if (kind == "affine")
        return ScheduleExpr::affine(json_to_int(params.at("c"), "c"),
                                    json_to_int(params.at("b"), "b"));
    if (kind == "polynomial")
        return ScheduleExpr::polynomial(json_to_rat(params.at("c"), "c"),
                                        json_to_rat(params.at("beta"), "beta"));
    if (kind == "geometric")
        return ScheduleExpr::geometric(json_to_rat(params.at("c"), "c"),
                                       json_to_rat(params.at("theta"), "theta"));
    if (kind == "exp-power")
        return ScheduleExpr::exp_power(json_to_rat(params.at("c"), "c"),
                                       json_to_rat(params.at("beta"), "beta"));
    if (kind == "table") return ScheduleExpr::table(json_to_int_list(params.at("values"), "values"));
    throw SpecError("unknown schedule kind: " + kind);
}

nlohmann::ordered_json schedule_to_json(const ScheduleExpr& s) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json params;
    using K = ScheduleExpr::Kind;
    switch (s.kind()) {
        case K::Constant:
            j["kind"] = "constant";
            params["c"] = rat_to_string(s.c());
            break;
        case K::Affine:
            j["kind"] = "affine";
            params["c"] = rat_to_string(s.c());
            params["b"] = rat_to_string(s.offset());
            break;
        case K::Polynomial:
            j["kind"] = "polynomial";
            params["c"] = rat_to_string(s.c());
            params["beta"] = rat_to_string(s.beta());
            break;
        case K::Geometric:
            j["kind"] = "geometric";
            params["c"] = rat_to_string(s.c());
            params["theta"] = rat_to_string(s.theta());
            break;
        case K::ExpPower:
            j["kind"] = "exp-power";
            params["c"] = rat_to_string(s.c());
            params["beta"] = rat_to_string(s.beta());
            break;
        case K::Table: {
            j["kind"] = "table";
            nlohmann::ordered_json vals = nlohmann::ordered_json::array();
            for (const Int& v : s.values()) vals.push_back(dec(v));
            params["values"] = vals;
            break;
        }
    }
    j["params"] = params;
    return j;
}

}  // namespace

QuasiPeriodicSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError("spec file must be a JSON object");
    std::vector<Int> header = json_to_int_list(j.at("header"), "header");
    std::string layout_s = j.at("layout").get<std::string>();
    Layout layout;
    if (layout_s == "packed")
        layout = Layout::Packed;
    else if (layout_s == "gapped")
        layout = Layout::Gapped;
    else
        throw SpecError("layout must be \"packed\" or \"gapped\"");
    std::vector<Stage> stages;
    for (const auto& sj : j.at("stages")) {
        Stage st;
        st.block = json_to_int_list(sj.at("block"), "block");
        st.schedule = schedule_from_json(sj.at("schedule"));
        if (sj.contains("gap")) st.gap = json_to_int_list(sj.at("gap"), "gap");
        stages.push_back(std::move(st));
    }
    Assertions a;
    if (j.contains("assertions")) {
        const auto& aj = j.at("assertions");
        a.not_ultimately_periodic = aj.value("not_ultimately_periodic", false);
        if (aj.contains("witness")) a.witness = aj.at("witness").get<std::string>();
    }
    return QuasiPeriodicSpec(std::move(header), layout, std::move(stages), std::move(a));
}

nlohmann::ordered_json spec_to_json(const QuasiPeriodicSpec& spec) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json header = nlohmann::ordered_json::array();
    for (const Int& a : spec.header()) header.push_back(dec(a));
    j["header"] = header;
    j["layout"] = spec.layout() == Layout::Packed ? "packed" : "gapped";
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const Stage& st : spec.stages()) {
        nlohmann::ordered_json sj;
        nlohmann::ordered_json block = nlohmann::ordered_json::array();
        for (const Int& b : st.block) block.push_back(dec(b));
        sj["block"] = block;
        sj["schedule"] = schedule_to_json(st.schedule);
        if (!st.gap.empty()) {
            nlohmann::ordered_json gap = nlohmann::ordered_json::array();
            for (const Int& g : st.gap) gap.push_back(dec(g));
            sj["gap"] = gap;
        }
        stages.push_back(sj);
    }
    j["stages"] = stages;
    nlohmann::ordered_json aj;
    aj["not_ultimately_periodic"] = spec.assertions().not_ultimately_periodic;
    if (spec.assertions().witness) aj["witness"] = *spec.assertions().witness;
    j["assertions"] = aj;
    return j;
}

}  // namespace mbcf
