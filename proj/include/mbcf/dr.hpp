#pragma once

#include <optional>
#include <vector>

#include "mbcf/convergents.hpp"

namespace mbcf {

/// A threshold exponent delta in (0, 1): either an exact rational or the
/// closed-form power N^{-e} with rational e > 0. Power values are bracketed
/// by integer k-th roots on demand; decisions that consume them stay inside
/// integer arithmetic.
struct DeltaValue {
    bool exact = true;
    Rat value;  // exact case
    Int N;      // power case: delta = N^{-e}
    Rat e;

    static DeltaValue rational(Rat v);
    static DeltaValue power(Int N, Rat e);

    /// Dyadic bracket [lo, hi] containing delta; degenerate when exact.
    Enclosure bracket(unsigned frac_bits) const;
};

/// The delta_1 < ... < delta_k ladder with nu and the capacity exponent
/// (nu-1)/(nu - nu^{-k}).
struct DRSchedule {
    Int N;
    Rat nu;
    unsigned k = 0;
    std::vector<DeltaValue> deltas;            // delta_1..delta_k
    std::vector<Enclosure> delta_enclosures;   // reported brackets
    Rat exponent_exact;                        // (nu-1)/(nu-nu^{-k}), exact rational
    Enclosure exponent;                        // reported enclosure of the same value
    bool ordering_certified = false;           // 0 < d_1 < ... < d_k < 1
};

/// nu = 3/(1-eps); k = smallest integer > log(1/eps); delta_j =
/// N^{-(nu^k - nu^{j-1})/(nu^{k+1}-1)}. Requires 0 < eps <= 1/3 and N >= 2.
/// The delta ordering is certified exactly through the (rational) exponents.
DRSchedule build_schedule(const Int& N, const Rat& epsilon);

/// Strict comparison q_next > q^(1+delta), decided by exact integer powering
/// after clearing denominators (bit-length bounds shortcut the easy cases;
/// irrational deltas are bracketed and refined until decisive). A comparison
/// landing exactly on equality counts as false.
bool exceeds_power_threshold(const Int& q_next, const Int& q, const DeltaValue& delta);

struct PartitionCounts {
    Int N;
    std::vector<std::size_t> sizes;               // |S_0|, |S_1|, ..., |S_k|
    std::vector<std::vector<std::size_t>> members;  // S_1..S_k member indices, sorted
};

/// Exact cardinalities of the nested sets S_j = { n <= N : q_{n+1} > q_n^{1+delta_j} }.
/// The kernel parallelizes over the index range (results are deterministic);
/// the table must hold indices up to N+1.
PartitionCounts partition_counts(const ConvergentTable& table, const Int& N,
                                 const std::vector<DeltaValue>& deltas);

/// Straight-line serial reference: every (n, j) pair is decided independently.
/// Kept as the oracle the parallel kernel is tested and benchmarked against.
PartitionCounts partition_counts_reference(const ConvergentTable& table, const Int& N,
                                           const std::vector<DeltaValue>& deltas);

/// The constant-free budget shape delta^{-3} (1 + log(1/delta))^2.
Enclosure evertse_budget(const Rat& delta, unsigned prec = 128);

struct DRReport {
    DRSchedule schedule;
    Enclosure bornelog_rhs;         // N log(1+d_1) + sum d_{j-1}^{-nu} log(1+d_j) + d_k^{-nu}
    Enclosure bornenu_value;        // k * N^{(nu-1)/(nu-nu^{-k})}
    Enclosure target;               // N^{2/3 + eps}
    bool exponent_le_target = false;  // (nu-1)/(nu-nu^{-k}) <= 2/3 + eps, exact
    Rat exponent_slack;               // (2/3 + eps) - exponent, exact
    std::vector<Rat> exponent_series;  // exponent as a function of k' = 1..10
    Rat exponent_series_limit;         // (nu-1)/nu
    bool exponent_series_monotone = false;
    Enclosure liouville_curve;      // reference shape n
    Enclosure davenport_roth_curve; // reference shape n / sqrt(log n)
    std::optional<Enclosure> measured_loglog_qN;  // when a table is supplied
};

/// Evaluates the constant-free right-hand sides of the capacity bounds for
/// the built schedule, asserts the exponent inequality exactly, and reports
/// the measured log log q_N when counting data is available.
DRReport bound_report(const Int& N, const Rat& epsilon, const ConvergentTable* table = nullptr);

}  // namespace mbcf
