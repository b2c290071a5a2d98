#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mbcf/intx.hpp"

namespace mbcf {

/// A lazily extensible sequence a_0, a_1, a_2, ... of partial quotients with a
/// declared generation rule. a_0 >= 0 (so expansions like [0; ...] are
/// representable); every a_i with i >= 1 must be >= 1.
///
/// The rule is invoked once per index, in increasing order, and every value is
/// cached, so materializing an index twice yields identical values.
/// Materialization mutates only the prefix cache; confine a stream to one
/// thread or synchronize externally.
class PartialQuotientStream {
  public:
    /// Produces a_i for i >= 1; nullopt ends a finite stream.
    using TailRule = std::function<std::optional<Int>(std::size_t)>;

    PartialQuotientStream(Int head, TailRule tail_rule)
        : rule_(std::move(tail_rule)) {
        if (head < 0) throw SpecError("partial quotient a_0 must be >= 0");
        prefix_.push_back(std::move(head));
    }

    /// Finite stream over an explicit quotient list (at least a_0).
    static PartialQuotientStream from_list(std::vector<Int> quotients) {
        if (quotients.empty()) throw SpecError("quotient list must contain a_0");
        auto tail = std::make_shared<std::vector<Int>>(std::move(quotients));
        Int head = (*tail)[0];
        return PartialQuotientStream(
            std::move(head), [tail](std::size_t i) -> std::optional<Int> {
                if (i >= tail->size()) return std::nullopt;
                return (*tail)[i];
            });
    }

    /// Infinite stream with every quotient equal to `value` (a_0 included).
    static PartialQuotientStream constant(Int value) {
        Int rep = value;
        return PartialQuotientStream(value, [rep](std::size_t) { return rep; });
    }

    /// head followed by block repeated forever.
    static PartialQuotientStream periodic(Int head, std::vector<Int> block) {
        if (block.empty()) throw SpecError("periodic block must be nonempty");
        auto b = std::make_shared<std::vector<Int>>(std::move(block));
        return PartialQuotientStream(std::move(head), [b](std::size_t i) {
            return std::optional<Int>((*b)[(i - 1) % b->size()]);
        });
    }

    /// Materializes through index i; throws ResourceError if the stream ends first.
    const Int& at(std::size_t i) {
        if (!try_materialize(i))
            throw ResourceError("stream exhausted before index " + std::to_string(i) +
                                " (finite prefix of length " + std::to_string(prefix_.size()) + ")");
        return prefix_[i];
    }

    /// Extends the cache through index i; false if the stream ends before i.
    bool try_materialize(std::size_t i) {
        while (prefix_.size() <= i) {
            if (end_) return false;
            std::size_t next = prefix_.size();
            std::optional<Int> v = rule_(next);
            if (!v) {
                end_ = next;
                return false;
            }
            if (*v < 1)
                throw SpecError("partial quotient a_" + std::to_string(next) + " must be >= 1");
            prefix_.push_back(std::move(*v));
        }
        return true;
    }

    std::size_t materialized() const { return prefix_.size(); }

    /// Known length once exhaustion has been observed.
    std::optional<std::size_t> finite_length() const { return end_; }

    const std::vector<Int>& known_prefix() const { return prefix_; }

  private:
    TailRule rule_;
    std::vector<Int> prefix_;
    std::optional<std::size_t> end_;
};

}  // namespace mbcf
