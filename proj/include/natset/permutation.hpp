#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "natset/budget.hpp"
#include "natset/sets.hpp"

namespace natset {

namespace detail {
class PermNode;
}

// A lazily evaluated injection ω→ω, bijective on evaluated prefixes. The
// inverse view is populated as forward values are discovered; permutations
// without a direct inverse formula answer inverse queries by forward
// scanning, bounded by the budget.
class PermutationHandle {
  public:
    nat forward(nat n) const;
    nat inverse(nat m) const;

    // Canonical spec string ("identity", "blockshuffle:w=256,seed=7", ...).
    const std::string& spec() const;
    const Budget& budget() const;

    explicit PermutationHandle(std::shared_ptr<detail::PermNode> node);
    const std::shared_ptr<detail::PermNode>& node() const { return node_; }

  private:
    std::shared_ptr<detail::PermNode> node_;
};

PermutationHandle identity_permutation(Budget b = {});

// Odd inputs 2n+1 go to the n-th factorial, even inputs 2n to the pi(n)-th
// non-factorial.
PermutationHandle join_hat(PermutationHandle pi);

// Seeded uniform shuffle applied independently within each block
// [k*width, (k+1)*width). width 1 is the identity.
PermutationHandle block_shuffle(nat width, std::uint64_t seed, Budget b = {});

// parts applied left to right: forward(n) = parts.back()(... parts[0](n)).
PermutationHandle compose(std::vector<PermutationHandle> parts);

// Wrap an arbitrary map; the caller asserts injectivity (verify with
// verify_bijection_prefix). Inverse works by forward scanning.
PermutationHandle from_function(std::string spec, std::function<nat(nat)> f,
                                Budget b = {});

// The patched bijection pi_f for f the index map c_n -> n of C, with
// H ⊆ C: pi_f(n) = f(n) for n in C∖H, and the remaining inputs are filled,
// in increasing order, with the unused elements of f(H) = within(H, C).
PermutationHandle patch_bijection(SetHandle C, SetHandle H);

// Image set pi(A): member(m) = A.member(pi.inverse(m)).
SetHandle apply(const PermutationHandle& pi, SetHandle A);

// Factorial-gap sparse subset H = {h_0, ..., h_{K-1}} ⊆ C with h_0 = c_0 and
// h_{n+1} the least c in C with c > h_n and f(c) >= h_n! for every f in fs.
// Stops with budget_error (reporting the index reached) once h_n! outgrows
// every value the budget admits.
SetHandle sparse_subset(const SetHandle& C,
                        const std::vector<std::function<nat(nat)>>& fs, nat K);

struct BijectionReport {
    nat checked = 0;                                // prefix length verified
    std::optional<std::pair<nat, nat>> collision;   // witness inputs, if any
    std::vector<nat> missing;                       // values < checked not hit
    bool injective() const { return !collision.has_value(); }
};

BijectionReport verify_bijection_prefix(const PermutationHandle& pi, nat N);

// "identity" | "joinhat" | "blockshuffle:w=<n>,seed=<n>" |
// "compose:<spec>|<spec>|..."
PermutationHandle permutation_from_spec(std::string_view spec, Budget b = {});

// ';'-separated specs, or "default" for the standard probe family:
// identity, joinhat, and block shuffles with widths {2,16,256,4096} x
// seeds {1,2,3,4}.
std::vector<PermutationHandle> family_from_spec(std::string_view spec, Budget b = {});

} // namespace natset
