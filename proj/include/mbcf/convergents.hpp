#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mbcf/interval.hpp"
#include "mbcf/stream.hpp"

namespace mbcf {

/// Exact numerator/denominator pairs (p_n, q_n) of the convergents to a
/// stream, maintained under the standard recurrence
///     p_n = a_n p_{n-1} + p_{n-2},   q_n = a_n q_{n-1} + q_{n-2},
/// with virtual seeds (p_{-1}, q_{-1}) = (1, 0) and (p_{-2}, q_{-2}) = (0, 1).
/// The determinant identity p_n q_{n-1} - p_{n-1} q_n = (-1)^{n-1} holds for
/// every stored n >= 1 and q_n is strictly increasing for n >= 1.
class ConvergentTable {
  public:
    explicit ConvergentTable(std::shared_ptr<PartialQuotientStream> stream);

    /// Extends entries through index n; throws ResourceError on a finite
    /// stream that ends before n.
    void extend_to(std::size_t n);
    bool try_extend_to(std::size_t n);

    std::size_t size() const { return ps_.size() - 2; }
    std::size_t max_index() const { return size() - 1; }

    /// Valid for i >= -2 (virtual seeds included), i <= max_index().
    const Int& p(std::ptrdiff_t i) const { return ps_[static_cast<std::size_t>(i + 2)]; }
    const Int& q(std::ptrdiff_t i) const { return qs_[static_cast<std::size_t>(i + 2)]; }

    Rat convergent(std::size_t i) const { return make_rat(p(static_cast<std::ptrdiff_t>(i)), q(static_cast<std::ptrdiff_t>(i))); }

    const Int& quotient(std::size_t i) const { return stream_->known_prefix()[i]; }

    PartialQuotientStream& stream() { return *stream_; }
    const PartialQuotientStream& stream() const { return *stream_; }
    std::shared_ptr<PartialQuotientStream> stream_ptr() const { return stream_; }

    /// True once the stream is known to terminate at exactly size() entries:
    /// the last convergent then equals the represented rational exactly.
    bool complete() const;

  private:
    std::shared_ptr<PartialQuotientStream> stream_;
    std::vector<Int> ps_;  // index shifted by 2
    std::vector<Int> qs_;
};

/// Builds the table of convergents 0..n.
ConvergentTable convergents(std::shared_ptr<PartialQuotientStream> stream, std::size_t n);

struct EncloseResult {
    Enclosure enclosure;
    Rat width;             // exact achieved width
    bool met_bound;        // false: prefix exhausted before the bound was met
    std::size_t depth;     // index n of the bracketing pair (n, n+1), or the
                           // final index for a terminating stream
};

/// Certified rational enclosure of the stream's limit: the first consecutive
/// convergent pair whose gap 1/(q_n q_{n+1}) meets the bound, found by
/// doubling the materialized depth. A terminating stream yields the exact
/// value as a degenerate enclosure. When the prefix runs out first, the best
/// achieved bracket is returned with met_bound = false.
EncloseResult enclose(ConvergentTable& table, const Rat& width_bound);

/// Euclidean expansion of p/q (q >= 1), canonical: the last quotient is >= 2
/// unless the expansion has length 1.
std::vector<Int> expand_rational(const Int& p, const Int& q);

/// Exact value of a finite expansion [a_0; a_1, ..., a_m].
Rat cf_value(std::span<const Int> quotients);

/// Resolves the two-representation ambiguity: [..., a, 1] -> [..., a+1].
void canonicalize_quotients(std::vector<Int>& w);

/// Continuant K_m(a_1, ..., a_m): the denominator of [0; a_1, ..., a_m].
/// K_0 = 1 (empty product), K_1(a) = a, K_m = a_m K_{m-1} + K_{m-2}.
Int continuant(std::span<const Int> entries);

/// Expansion of q_n / q_{n-1}, n >= 2. Equals the reversed quotient word
/// [a_n; a_{n-1}, ..., a_1] up to canonical last-quotient normalization.
std::vector<Int> mirror_ratio(const ConvergentTable& table, std::size_t n);

struct ProximityResult {
    bool agreed = false;                // quotients 0..n identical
    std::size_t first_disagreement = 0; // valid when !agreed
    Rat bound;                          // q_n^{-2}
    Rat certified_gap;                  // exact upper bound on |xi - eta|
    bool holds = false;                 // certified_gap <= bound
};

/// Certifies |xi - eta| <= q_n^{-2} whenever the first n+1 quotients agree,
/// via exact enclosures of both values (Lemma-style proximity from a shared
/// prefix). Both streams must materialize indices 0..n+2 or terminate.
ProximityResult check_proximity(std::shared_ptr<PartialQuotientStream> x,
                                std::shared_ptr<PartialQuotientStream> y, std::size_t n);

struct GrowthRow {
    std::size_t n;
    bool lower_ok;  // 2^{n-1} <= q_n^2
    bool upper_ok;  // q_n <= (M+1)^n
};

struct GrowthReport {
    bool all_ok = true;
    std::vector<GrowthRow> rows;
};

/// Checks sqrt(2)^{n-1} <= q_n <= (M+1)^n for every stored n >= 1.
/// Throws SpecError if some materialized quotient exceeds M.
GrowthReport growth_bounds(const ConvergentTable& table, const Int& M);

}  // namespace mbcf
