#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "natset/budget.hpp"
#include "natset/density.hpp"
#include "natset/sets.hpp"

namespace natset {

// SplitMix64 constants. The stream for seed s is mix64(s + (i+1)*gamma);
// column i of a derived-seed source uses child seed s ^ ((i+1)*gamma).
inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ull;
std::uint64_t splitmix64_at(std::uint64_t seed, nat i);

// Seeded deterministic bit stream standing in for a random set. Never a
// certified random object; a reproducible desk-scale substitute.
class BitSource {
  public:
    enum class ColumnMode { derived_seed, pairing_view };

    explicit BitSource(std::uint64_t seed, ColumnMode mode = ColumnMode::derived_seed);

    std::uint64_t draw(nat i) const { return splitmix64_at(seed_, i); }
    std::uint64_t seed() const { return seed_; }
    ColumnMode mode() const { return mode_; }
    BitSource child(nat column) const;

    // Fair-coin column set X^[i] for this source and mode.
    SetHandle column_set(nat i, Budget b = {}) const;

    std::string spec() const;

  private:
    std::uint64_t seed_;
    ColumnMode mode_;
};

// A real r in (0,1) presented as the set B_r of 1-positions of its binary
// expansion. Dyadic rationals use the terminating expansion.
class RealSpec {
  public:
    static RealSpec from_rational(const Rational& r);
    static RealSpec from_decimal(std::string_view text);  // "0.ddd"
    static RealSpec from_seed(std::uint64_t seed);
    // "p/q" | "0.ddd" | "seed:<n>"
    static RealSpec parse(std::string_view text);

    bool bit(nat n) const;
    SetHandle bits(Budget b = {}) const;  // B_r
    // Exact value when the source is rational or decimal.
    std::optional<Rational> exact_value() const;
    // Sum of 2^-(n+1) over 1-bits n < j; approaches r from below.
    Rational partial_sum(nat j) const;
    // floor(r * 2^64): the first 64 bits of the expansion.
    std::uint64_t threshold64() const;

    std::string spec() const;

  private:
    struct State;
    std::shared_ptr<State> state_;
    explicit RealSpec(std::shared_ptr<State> state);
};

// Membership of n decided by draw(n) < floor(r * 2^64); the induced measure
// bias is below 2^-64.
SetHandle bernoulli_set(const RealSpec& r, std::uint64_t seed, Budget b = {});
SetHandle bernoulli_set(const Rational& r, std::uint64_t seed, Budget b = {});

// Column supplier for partitions: a seeded BitSource, or the constant
// "column=evens" family that makes the partition the exact ruler sets
// A_i = {2^i (2k+1)}.
class ColumnSource {
  public:
    static ColumnSource from_bits(BitSource src);
    static ColumnSource constant_evens();
    // Arbitrary column supplier (degenerate or adversarial families). Pass
    // constant = true only when every level gets the same set.
    static ColumnSource from_generator(std::string spec,
                                       std::function<SetHandle(nat, Budget)> gen,
                                       bool constant = false);
    // "seed:<n>[,mode=derived|pairing]" | "column=evens"
    static ColumnSource parse(std::string_view text);

    SetHandle column(nat i, Budget b) const;
    // Whether all levels share one column set. A constant source lets the
    // index walk prove that an element is never placed (see index_of).
    bool is_constant() const;
    std::string spec() const;

  private:
    std::optional<BitSource> bits_;
    std::function<SetHandle(nat, Budget)> gen_;
    std::string gen_spec_;
    bool gen_constant_ = false;
};

// The nested partition B_0 = ω, A_i = into(compl(col_i), B_i),
// B_{i+1} = into(col_i, B_i). Levels are built on demand up to index_cap.
class PartitionFamily {
  public:
    PartitionFamily(ColumnSource src, nat index_cap = 64, Budget b = {});

    SetHandle piece(nat i);      // A_i
    SetHandle level_set(nat i);  // B_i
    SetHandle column(nat i);     // col_i

    // The unique i with m in A_i, found by walking column bits; throws
    // index_cap_error if every level below the cap keeps m.
    nat index_of(nat m);

    // Like index_of, but distinguishes a proof that m is never placed
    // (possible only for constant sources, e.g. 0 under the ruler columns)
    // from running out of levels. nullopt = provably in no piece; the cap
    // case still throws.
    std::optional<nat> try_index_of(nat m);

    nat index_cap() const { return index_cap_; }
    const Budget& budget() const { return budget_; }
    std::string spec() const { return src_.spec(); }

  private:
    void ensure(nat i);

    ColumnSource src_;
    nat index_cap_;
    Budget budget_;
    std::vector<SetHandle> cols_, pieces_, levels_;
};

std::shared_ptr<PartitionFamily> build_partition(ColumnSource src, nat levels,
                                                 nat index_cap = 64, Budget b = {});

// X_r = ⊔_{i in B_r} A_i: member(m) = bit_{index_of(m)}(r).
SetHandle build_xr(const RealSpec& r, std::shared_ptr<PartitionFamily> part,
                   Budget b = {});

} // namespace natset
