#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "natset/budget.hpp"

namespace natset {

namespace detail {
class SetNode;
}

// A lazily evaluated, memoizing subset of the naturals with two views that
// are kept consistent: a membership oracle and a strictly increasing
// enumeration a_0 < a_1 < a_2 < ...  (0-indexed: a_0 is the least element).
//
// Copies share the underlying node, so memoized answers are shared too.
// Evaluation is not thread-safe; freely share handles only once you stop
// evaluating them.
class SetHandle {
  public:
    // n in A?  Requires n <= budget().max_value.
    bool member(nat n) const;

    // The k-th element a_k. Throws set_exhausted past the end of a provably
    // finite set, budget_error when the answer cannot be reached in budget.
    nat nth(nat k) const;

    // |A ∩ [0, below)|.
    nat count(nat below) const;

    // Sorted members < below.
    std::vector<nat> prefix(nat below) const;

    const Budget& budget() const;

    // Short textual form of the defining expression, for diagnostics.
    const std::string& label() const;

    explicit SetHandle(std::shared_ptr<detail::SetNode> node);

    // Internal: combinators share evaluation state through the node.
    const std::shared_ptr<detail::SetNode>& node() const { return node_; }

  private:
    std::shared_ptr<detail::SetNode> node_;
};

// --- primitives ------------------------------------------------------------

SetHandle omega(Budget b = {});
SetHandle empty_set(Budget b = {});
SetHandle evens(Budget b = {});
SetHandle odds(Budget b = {});
// {a + k*m : k in ω}, requires a < m, m >= 1.
SetHandle arithmetic(nat a, nat m, Budget b = {});
// {n! : n in ω} = {1, 2, 6, 24, ...} as a set (0! and 1! coincide).
SetHandle factorials(Budget b = {});
// Explicit finite set; enumeration past its end reports set_exhausted.
SetHandle finite(std::vector<nat> elems, Budget b = {});

// Membership-defined set from an arbitrary (pure) characteristic function.
// Enumeration is derived by scanning, so chi must be total on [0, max_value].
SetHandle from_membership(std::string label, std::function<bool(nat)> chi,
                          Budget b = {});

// --- combinators -----------------------------------------------------------
// Result budgets are the componentwise min of the operands'.

// B into A: the B-th elements of A, {a_{b_0} < a_{b_1} < ...}.
SetHandle into(SetHandle B, SetHandle A);

// B within A: {k : a_k in B}, the X with X into A = A ∩ B.
SetHandle within(SetHandle B, SetHandle A);

// A ⊕ B = 2A ∪ (2B+1).
SetHandle join(SetHandle A, SetHandle B);

SetHandle complement(SetHandle A);
SetHandle set_union(SetHandle A, SetHandle B);
SetHandle intersect(SetHandle A, SetHandle B);
SetHandle difference(SetHandle A, SetHandle B);

// {n : pair(i, n) in X} with pair(i, n) = 2^i (2n+1) - 1.
SetHandle column(SetHandle X, nat i);

// The pairing used by column(). Throws budget_error on 64-bit overflow.
nat pair_index(nat i, nat n);

} // namespace natset
