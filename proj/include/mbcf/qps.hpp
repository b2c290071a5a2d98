#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbcf/interval.hpp"
#include "mbcf/stream.hpp"

namespace mbcf {

/// Closed-form or tabulated rule producing the repetition counts lambda_k.
/// Every evaluation is an exact positive integer; ceilings are taken exactly
/// (integer k-th roots for rational powers, certified exp enclosures refined
/// until the ceiling is unambiguous).
class ScheduleExpr {
  public:
    enum class Kind { Constant, Affine, Polynomial, Geometric, ExpPower, Table };

    static ScheduleExpr constant(Int c);
    static ScheduleExpr affine(Int slope, Int offset);       // slope*k + offset
    static ScheduleExpr polynomial(Rat c, Rat beta);         // ceil(c * k^beta)
    static ScheduleExpr geometric(Rat c, Rat theta);         // ceil(c * theta^k), theta > 1
    static ScheduleExpr exp_power(Rat c, Rat beta);          // ceil(exp(c * k^beta))
    static ScheduleExpr table(std::vector<Int> values);

    Kind kind() const { return kind_; }
    bool closed_form() const { return kind_ != Kind::Table; }
    bool unbounded() const;

    /// lambda_k; throws ResourceError past the end of a table,
    /// SpecError if the rule evaluates below 1.
    Int eval(std::size_t k) const;

    bool operator==(const ScheduleExpr&) const = default;

    const Rat& c() const { return c_; }
    const Rat& offset() const { return b_; }
    const Rat& beta() const { return beta_; }
    const Rat& theta() const { return theta_; }
    const std::vector<Int>& values() const { return table_; }

  private:
    ScheduleExpr() = default;
    Kind kind_ = Kind::Constant;
    Rat c_, b_, beta_, theta_;
    std::vector<Int> table_;
};

enum class Layout { Packed, Gapped };

struct Stage {
    std::vector<Int> block;
    ScheduleExpr schedule;
    std::vector<Int> gap;  // explicit filler quotients; empty in packed layout
};

struct Assertions {
    bool not_ultimately_periodic = false;
    std::optional<std::string> witness;
};

/// Symbolic description of a quasi-periodic continued fraction: a header
/// a_0..a_{n_0-1}, then stage k repeats its block lambda_k times starting at
/// index n_k. The stage list is cyclic (stage k uses entry k mod L, with the
/// schedule evaluated at the global index k). In packed layout
/// n_{k+1} = n_k + lambda_k r_k; gapped layout inserts the stage's explicit
/// filler quotients after the repetitions.
class QuasiPeriodicSpec {
  public:
    QuasiPeriodicSpec(std::vector<Int> header, Layout layout, std::vector<Stage> stages,
                      Assertions assertions);

    const std::vector<Int>& header() const { return header_; }
    Layout layout() const { return layout_; }
    const std::vector<Stage>& stages() const { return stages_; }
    const Assertions& assertions() const { return assertions_; }

    std::size_t cycle_length() const { return stages_.size(); }
    const Stage& stage(std::size_t k) const { return stages_[k % stages_.size()]; }
    std::size_t r(std::size_t k) const { return stage(k).block.size(); }

    /// lambda_k, exact (cached).
    Int lambda(std::size_t k) const;

    /// n_k, exact (cached); n_0 is the header length.
    Int n_index(std::size_t k) const;

    /// Largest quotient value that can ever occur.
    Int max_quotient() const;

    /// True when every stage schedule is the constant rule, which makes the
    /// generated word provably ultimately periodic.
    bool provably_ultimately_periodic() const;

    /// All stages share one schedule expression (required for symbolic facts).
    bool uniform_schedule() const;

    /// Checks the sufficient non-periodicity witness: all blocks singletons,
    /// at least two adjacent stages with distinct values, schedule unbounded.
    bool witness_verified() const;

    /// Lazily generated quotient stream; ends when a table schedule runs out.
    std::shared_ptr<PartialQuotientStream> make_stream() const;

  private:
    std::vector<Int> header_;
    Layout layout_;
    std::vector<Stage> stages_;
    Assertions assertions_;

    mutable std::mutex cache_mutex_;
    mutable std::vector<Int> lambda_cache_;
    mutable std::vector<Int> n_cache_;
};

/// Materializes indices 0..n of the spec's stream.
std::shared_ptr<PartialQuotientStream> generate(const QuasiPeriodicSpec& spec, std::size_t n);

struct RepClaim {
    Int n, r, lambda;
};

struct RepVerdict {
    enum class Status { Holds, Violated, InsufficientPrefix };
    Status status;
    std::size_t first_violation = 0;   // index m with a_{m+r} != a_m, when violated
    std::size_t required_length = 0;   // prefix length needed to test the claim
};

/// Exact check of the repetition identity a_{m+r} = a_m over
/// n <= m <= n + (lambda-1) r - 1, per claim; claims that do not fit in the
/// prefix are reported individually and do not block the others.
std::vector<RepVerdict> verify_rep(std::span<const Int> prefix,
                                   const std::vector<RepClaim>& claims);

/// A limit value that is either an exact rational, a refinable enclosure of a
/// transcendental quantity, or +infinity.
struct LimitFact {
    enum class Kind { Exact, Enclosable, Infinite };
    Kind kind = Kind::Exact;
    Rat exact;
    std::function<Enclosure(unsigned)> enclose;  // precision -> enclosure

    static LimitFact exactly(Rat v) { return {Kind::Exact, std::move(v), {}}; }
    static LimitFact infinite() { return {Kind::Infinite, Rat(0), {}}; }
    static LimitFact enclosable(std::function<Enclosure(unsigned)> f) {
        return {Kind::Enclosable, Rat(0), std::move(f)};
    }

    /// Exact sign of (limit - threshold); refines enclosures as needed.
    /// nullopt only if refinement to the precision cap cannot separate.
    std::optional<int> compare(const Rat& threshold) const;
};

/// Symbolic facts derivable from a closed-form schedule.
struct AsymptoticFacts {
    bool closed_form = false;  // false: horizon-only marker, nothing else set

    LimitFact ratio_limit;            // lim lambda_{k+1}/lambda_k
    LimitFact limsup_lambda_over_n;   // limsup lambda_k/n_k
    Rat conservative_lambda_over_n;   // (theta-1)/(r_max*theta) style lower bound, 0 if none

    /// Divergence-type hypotheses: for every closed-form rule the statistic
    /// provably tends to 0 (n_{k+1} >= lambda_k r_k forces n to outgrow any
    /// elementary-in-k lambda), so the verdict is a proof, not a measurement.
    enum class Divergence { ProvedZero, ProvedDivergent, HorizonOnly };
    Divergence hypgen_limsup = Divergence::HorizonOnly;       // (log l)(log n)^1/2 / n
    Divergence hypgenamel_limsup = Divergence::HorizonOnly;   // log l / n^(eps+2/3)

    std::string notes;
};

AsymptoticFacts schedule_asymptotics(const QuasiPeriodicSpec& spec);

/// Spec file format (decimal-string integers, bit-exact).
QuasiPeriodicSpec spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json spec_to_json(const QuasiPeriodicSpec& spec);

}  // namespace mbcf
