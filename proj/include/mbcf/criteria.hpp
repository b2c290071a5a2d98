#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbcf/qps.hpp"

namespace mbcf {

enum class TheoremId {
    T21_baker0,
    T22_baker1,
    T23_baker2,
    T31_amel4,
    T32_amel1,
    C33_amel2,
    T34_amel3,
};

std::string_view theorem_tag(TheoremId id);  // e.g. "C3.3-amel2" (report schema)

enum class Verdict { HoldsSymbolically, HoldsAtHorizon, Fails, NotApplicable };

std::string_view verdict_tag(Verdict v);

/// Per-theorem verdict with the quantities that were actually checked.
/// Certificates are pure functions of (spec, options): reruns are
/// byte-identical.
struct CriterionCertificate {
    TheoremId theorem;
    Verdict verdict;
    std::vector<std::pair<std::string, std::string>> witnesses;
    std::vector<std::string> caveats;
};

struct CertifyOptions {
    std::size_t horizon = 64;   // stage count for finite-horizon quantities
    Rat epsilon{1, 100};        // exponent offset in the log-lambda criterion
    bool force_horizon = false; // skip symbolic facts (consistency testing)
};

/// Certified enclosure of B(A) = 2 log((A + sqrt(A^2+4))/2) / log((1+sqrt5)/2) - 1
/// of width <= width_bound; monotone increasing in A.
Enclosure b_of_a(const Int& A, const Rat& width_bound);

/// One certificate per theorem, in a fixed order. Symbolic verdicts come from
/// the schedule algebra; otherwise the relevant finite quantities are computed
/// exactly over the tail window [horizon/2, horizon].
std::vector<CriterionCertificate> certify(const QuasiPeriodicSpec& spec,
                                          const CertifyOptions& options = {});

}  // namespace mbcf
