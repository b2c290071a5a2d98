#pragma once

#include <array>
#include <optional>

#include "mbcf/convergents.hpp"
#include "mbcf/qps.hpp"
#include "mbcf/surd.hpp"

namespace mbcf {

/// Refinable certified enclosure of a stream's limit, backed by its
/// convergent table. Each lab check owns one (streams are confined per
/// worker; stage computations can run in parallel on the shared spec).
class XiEnclosure {
  public:
    explicit XiEnclosure(std::shared_ptr<PartialQuotientStream> s) : table_(std::move(s)) {}

    /// Enclosure from the convergent pair (depth, depth+1); exact for a
    /// terminating stream.
    Enclosure at_depth(std::size_t depth);

    ConvergentTable& table() { return table_; }

  private:
    ConvergentTable table_;
};

/// The stage-k quadruple of the constant-block regime:
/// P_k, Q_k at index n_k + lambda_k r_k - 1, the primed pair one index lower,
/// and S_k = s_{r lambda_k - 1}, the denominator of the (r lambda_k - 1)-th
/// convergent to alpha. alpha is the purely periodic value of the REVERSED
/// block, exactly as the mirror formula requires.
struct ApproxQuadruple {
    std::size_t k = 0;
    std::size_t r = 0;
    Int lambda;
    Int n_k;
    std::vector<Int> block;
    Int Qk, Qpk, Pk, Ppk;
    Int Sk;
    QuadraticSurd alpha;
};

ApproxQuadruple quadruple(const QuasiPeriodicSpec& spec, std::size_t k);

struct StageInequalities {
    std::size_t k = 0;
    bool b1_first = false;   // |Q_k xi - P_k| < 1/Q_k
    bool b1_second = false;  // |Q'_k xi - P'_k| < 1/Q'_k
    bool b2 = false;         // |Q'_k alpha - Q_k| < Q'_k/S_k^2 (exact surd sign test)
    bool b3 = false;         // prod |L_j| < 1/S_k^2
    Rat bb_gap;              // certified upper bound on |Q_k/Q'_k - alpha|
    Rat xi_width;            // xi enclosure width used for the final decision
};

/// Certifies the three unconditional stage inequalities; they are theorems of
/// continued fraction arithmetic, so a failure is an implementation bug.
StageInequalities check_b1_b2_b3(const QuasiPeriodicSpec& spec, std::size_t k);

struct EpsilonDecayRow {
    std::size_t k = 0;
    bool s_lower_ok = false;          // S_k^2 >= 2^{r lambda - 2}
    bool q_upper_ok = false;          // Q_k <= (M+1)^{n_k + r lambda}
    bool measured_ge_predicted = false;  // implied by the two exact facts above
    std::optional<Enclosure> eps_measured;   // 2 log S_k / log Q_k (absent when Q_k = 1)
    Enclosure eps_predicted;                 // 2 (log sqrt2 / log(M+1)) (r l - 2)/(n + r l)
};

std::vector<EpsilonDecayRow> epsilon_decay(const std::vector<ApproxQuadruple>& series,
                                           const Int& M);

enum class PolyVariant { AtStageStart, AtDisagreement };

/// Quadratic c2 X^2 + c1 X + c0 built from two convergent pairs that bracket
/// one repeated block; vanishes exactly at the periodicized tail value xi_k.
struct AuxPolynomial {
    Int c2, c1, c0;
    PolyVariant variant = PolyVariant::AtStageStart;
    std::size_t k = 0;
    std::size_t base = 0;  // n_k or j_k
    std::size_t r = 0;
    QuadraticSurd root;    // xi_k
    bool root_is_exact_zero = false;
    bool nondegenerate = false;  // c2 != 0
};

AuxPolynomial aux_polynomial(const QuasiPeriodicSpec& spec, std::size_t k, PolyVariant variant);

struct JSelectResult {
    bool found = false;
    std::size_t j = 0;  // largest j < n_k with a_j != a_{j + r_k}
};

JSelectResult j_select(const QuasiPeriodicSpec& spec, std::size_t k);

struct PkExponentReport {
    std::size_t k = 0;
    PolyVariant variant = PolyVariant::AtStageStart;
    Enclosure abs_pk_xi;           // certified |P_k(xi)|, bounded away from 0
    Int K;                         // continuant of the repeated block
    bool denom_bound_ok = false;   // the continuant lower bound on the big denominator
    std::optional<Enclosure> exponent;  // log|P_k(xi)| / log(q_a q_b)
    Enclosure constant_ratio;      // |P_k(xi)| * q_big^2 / (q_a q_b): the "<<" constant, measured
};

PkExponentReport pk_exponent_report(const QuasiPeriodicSpec& spec, std::size_t k,
                                    PolyVariant variant);

struct FormProductReport {
    std::size_t k = 0;
    std::array<Enclosure, 4> abs_forms;
    Enclosure product;
    // constant-block route
    bool product_lt_inv_s2 = false;
    bool factor_bounds_ok[3] = {false, false, false};
    Int Sk;
    // disagreement route
    Rat eta;
    std::size_t j = 0;
    std::array<Int, 4> z;
    Enclosure bound_ratio;  // product * q_{j+l r}^2 / (q_j q_{j+r})^{2+eta}
    std::optional<Enclosure> product_exponent;  // log product / log(reference denominator)
};

/// Forms xi X1 - X3, xi X2 - X4, alpha X2 - X1, X1 evaluated on the
/// quadruple; certifies the product bound 1/S_k^2.
FormProductReport quadruple_form_product(const QuasiPeriodicSpec& spec, std::size_t k);

/// Forms xi^2 X1 - xi(X2+X3) + X4, xi X1 - X2, xi X1 - X3, X1 evaluated on
/// the cross-product quadruple at the disagreement index j_k.
FormProductReport disagreement_form_product(const QuasiPeriodicSpec& spec, std::size_t k,
                                            const Rat& eta);

struct TailDistanceChain {
    std::size_t k = 0;
    Int n_k, lambda;
    std::size_t r = 0;
    Enclosure distance;      // |xi - xi_k| interval
    Rat proximity_bound;     // q_{n_k + lambda r - 1}^{-2}
    bool proximity_ok = false;
    Int height;              // naive height of xi_k's minimal polynomial
    Int height_bound;        // 2 q_{n_k + r - 1}^2
    bool height_ok = false;
    bool split_lower_ok = false;  // q_{n-1} K_r <= q_{n+r-1}
    bool split_upper_ok = false;  // q_{n+r-1} <= 2 q_{n-1} K_r
    Enclosure halving_ratio;      // |xi-xi_k| * q_{n-1}^2 K_r^{2d} 2^{lambda/2} (measured)
    std::optional<Enclosure> lambda_over_log_q;  // lambda_k / log q_{n_k}
};

/// The full distance chain at stage k: certified proximity, exact height
/// bound, exact continuant factorization bounds, and the measured ratios for
/// the constants the chain leaves implicit.
TailDistanceChain tail_distance_chain(const QuasiPeriodicSpec& spec, std::size_t k, unsigned d);

struct MirrorWordCheck {
    bool matches = false;
    std::vector<Int> expansion;  // canonical expansion of Q_k/Q'_k
};

/// The expansion of Q_k/Q'_k must begin with lambda_k copies of the reversed
/// block followed by the reversed header a_{n_k-1}..a_1 (canonicalized).
MirrorWordCheck mirror_word_check(const QuasiPeriodicSpec& spec, std::size_t k);

}  // namespace mbcf
