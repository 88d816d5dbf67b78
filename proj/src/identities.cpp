#include "natset/identities.hpp"

#include <algorithm>

#include "natset/construct.hpp"
#include "natset/permutation.hpp"

namespace natset {

nat factorial_index_count(nat below) {
    nat count = 0;
    nat f = 1;
    for (nat j = 0;; ++j) {
        if (j >= 2) {
            if (f > below / j)  // j! would overflow or pass `below`
                break;
            f *= j;
        }
        if (f < below)
            ++count;
        else
            break;
    }
    return count;
}

bool SuiteResult::passed() const { return violation_count() == 0; }

nat SuiteResult::violation_count() const {
    nat total = 0;
    for (const auto& c : checks)
        total += c.violations.size();
    return total;
}

const std::vector<std::string>& identity_suite_names() {
    static const std::vector<std::string> names = {"core", "weakening", "partition",
                                                   "permutation"};
    return names;
}

namespace {

IdentityCheck& check(SuiteResult& result, const std::string& name) {
    for (auto& c : result.checks)
        if (c.name == name)
            return c;
    result.checks.push_back(IdentityCheck{name, 0, {}});
    return result.checks.back();
}

// First element on which the prefixes of X and Y below N disagree.
void expect_equal_prefix(SuiteResult& result, const std::string& name,
                         const SetHandle& X, const SetHandle& Y, nat N) {
    auto& c = check(result, name);
    ++c.runs;
    auto px = X.prefix(N);
    auto py = Y.prefix(N);
    if (px == py)
        return;
    std::vector<nat> diff;
    std::set_symmetric_difference(px.begin(), px.end(), py.begin(), py.end(),
                                  std::back_inserter(diff));
    c.violations.push_back(name + ": prefixes below " + std::to_string(N) +
                           " first differ at " + std::to_string(diff.front()) +
                           " [" + X.label() + " vs " + Y.label() + "]");
}

void expect_subset_prefix(SuiteResult& result, const std::string& name,
                          const SetHandle& X, const SetHandle& Y, nat N) {
    auto& c = check(result, name);
    ++c.runs;
    for (nat v : X.prefix(N)) {
        if (!Y.member(v)) {
            c.violations.push_back(name + ": " + std::to_string(v) + " in " +
                                   X.label() + " but not in " + Y.label());
            return;
        }
    }
}

void expect_disjoint_prefix(SuiteResult& result, const std::string& name,
                            const SetHandle& X, const SetHandle& Y, nat N) {
    auto& c = check(result, name);
    ++c.runs;
    auto common = intersect(X, Y).prefix(N);
    if (!common.empty())
        c.violations.push_back(name + ": common element " +
                               std::to_string(common.front()) + " [" + X.label() +
                               " vs " + Y.label() + "]");
}

void expect_true(SuiteResult& result, const std::string& name, bool ok,
                 const std::string& witness) {
    auto& c = check(result, name);
    ++c.runs;
    if (!ok)
        c.violations.push_back(name + ": " + witness);
}

std::uint64_t trial_seed(std::uint64_t master, nat trial, nat slot) {
    return splitmix64_at(master, trial * 8 + slot);
}

void run_core_trial(SuiteResult& r, nat trial, std::uint64_t seed, nat N, Budget b) {
    SetHandle A = bernoulli_set(Rational(1, 2), trial_seed(seed, trial, 0), b);
    SetHandle B = bernoulli_set(Rational(1, 2), trial_seed(seed, trial, 1), b);
    SetHandle C = bernoulli_set(Rational(1, 2), trial_seed(seed, trial, 2), b);

    expect_equal_prefix(r, "into-assoc", into(B, into(A, C)), into(into(B, A), C), N);

    expect_equal_prefix(r, "within-partition",
                        set_union(within(B, A), within(complement(B), A)), omega(b), N);
    expect_disjoint_prefix(r, "within-partition-disjoint", within(B, A),
                           within(complement(B), A), N);

    expect_equal_prefix(r, "into-partition",
                        set_union(into(B, A), into(complement(B), A)), A, N);
    expect_disjoint_prefix(r, "into-partition-disjoint", into(B, A),
                           into(complement(B), A), N);

    expect_equal_prefix(r, "into-within-recovery", into(B, within(A, into(B, A))), B,
                        N);
    expect_equal_prefix(r, "self-within", within(into(B, A), into(B, A)), omega(b), N);
    expect_equal_prefix(r, "within-of-into", within(B, into(A, B)), omega(b), N);
    expect_subset_prefix(r, "within-into-subset", into(within(B, A), B), B, N);
    expect_equal_prefix(r, "within-into-intersect", into(within(B, A), A),
                        intersect(A, B), N);
}

void run_core_fixed(SuiteResult& r, Budget b) {
    // within is not associative: the two groupings of (odds, arith(2,4),
    // evens) land on empty and omega.
    SetHandle lhs = within(within(odds(b), arithmetic(2, 4, b)), evens(b));
    SetHandle rhs = within(odds(b), within(arithmetic(2, 4, b), evens(b)));
    expect_true(r, "within-non-assoc", lhs.prefix(1000).empty(),
                "grouped-left prefix not empty");
    expect_equal_prefix(r, "within-non-assoc-omega", rhs, omega(b), 1000);
}

void run_weakening_trial(SuiteResult& r, nat trial, std::uint64_t seed, nat N,
                         Budget b) {
    SetHandle A = bernoulli_set(Rational(1, 2), trial_seed(seed, trial, 0), b);
    SetHandle self_join = join(A, complement(A));
    expect_equal_prefix(r, "weakening-within", within(evens(b), self_join), A, N);
    expect_equal_prefix(r, "weakening-into", into(A, self_join), join(A, empty_set(b)),
                        N);
}

std::vector<nat> ruler_piece(nat i, nat below) {
    std::vector<nat> out;
    nat step = nat(1) << i;
    for (nat k = 0;; ++k) {
        nat v = step * (2 * k + 1);
        if (v > below)  // step*(2k+1) grows monotonically
            break;
        if (v < below)
            out.push_back(v);
        else
            break;
    }
    return out;
}

// m = 2^i (2k+1): the piece index is the 2-adic valuation. 0 is in no piece.
nat ruler_index(nat m) {
    nat i = 0;
    while ((m & 1) == 0) {
        m >>= 1;
        ++i;
    }
    return i;
}

void run_partition_fixed(SuiteResult& r, nat N, Budget b) {
    nat limit = std::min<nat>(N, 100'000);
    PartitionFamily ruler(ColumnSource::constant_evens(), 64, b);
    for (nat i = 0; i < 6; ++i) {
        auto got = ruler.piece(i).prefix(limit);
        auto want = ruler_piece(i, limit);
        expect_true(r, "ruler-exact", got == want,
                    "piece " + std::to_string(i) + " differs from {2^i(2k+1)}");
    }
    bool index_ok = !ruler.try_index_of(0).has_value();  // 0 is never placed
    nat bad = 0;
    for (nat m = 1; index_ok && m < limit; ++m) {
        if (ruler.index_of(m) != ruler_index(m)) {
            index_ok = false;
            bad = m;
        }
    }
    expect_true(r, "ruler-index", index_ok,
                "index_of(" + std::to_string(bad) + ") != closed form");
}

void run_partition_trial(SuiteResult& r, nat trial, std::uint64_t seed, nat N,
                         Budget b) {
    auto family = std::make_shared<PartitionFamily>(
        ColumnSource::from_bits(BitSource(trial_seed(seed, trial, 0))), 64, b);
    constexpr nat levels = 6;
    nat total = 0;
    for (nat i = 0; i < levels; ++i) {
        for (nat j = i + 1; j < levels; ++j)
            expect_disjoint_prefix(r, "partition-disjoint", family->piece(i),
                                   family->piece(j), N);
        expect_subset_prefix(r, "partition-nested", family->level_set(i + 1),
                             family->level_set(i), N);
        total += family->piece(i).count(N);
    }
    total += family->level_set(levels).count(N);
    expect_true(r, "partition-cover", total == N,
                "piece counts sum to " + std::to_string(total) + " below " +
                    std::to_string(N));

    bool agree = true;
    nat bad = 0;
    nat sample = std::min<nat>(N, 2000);
    for (nat m = 0; m < sample; ++m) {
        nat idx = family->index_of(m);
        if (idx < levels && !family->piece(idx).member(m)) {
            agree = false;
            bad = m;
            break;
        }
    }
    expect_true(r, "partition-index-agree", agree,
                "index_of(" + std::to_string(bad) + ") names a piece without it");
}

void run_permutation_trial(SuiteResult& r, nat trial, std::uint64_t seed, nat N,
                           Budget b) {
    SetHandle A = bernoulli_set(Rational(1, 2), trial_seed(seed, trial, 0), b);
    SetHandle B = bernoulli_set(Rational(1, 2), trial_seed(seed, trial, 1), b);
    SetHandle F = factorials(b);
    PermutationHandle jh = join_hat(identity_permutation(b));

    expect_equal_prefix(r, "joinhat-split", difference(apply(jh, join(A, B)), F),
                        difference(apply(jh, join(A, empty_set(b))), F), N);

    // counting bound: the image of A ⊕ ∅ under join_hat tracks A within the
    // factorial count.
    SetHandle image = apply(jh, join(A, empty_set(b)));
    bool bounded = true;
    nat bad = 0;
    nat ca = 0, ci = 0, cf = 0;
    for (nat n = 1; n <= N; ++n) {
        ca += A.member(n - 1) ? 1 : 0;
        ci += image.member(n - 1) ? 1 : 0;
        cf += F.member(n - 1) ? 1 : 0;
        nat gap = ca > ci ? ca - ci : ci - ca;
        if (gap > cf + 1) {
            bounded = false;
            bad = n;
            break;
        }
    }
    expect_true(r, "joinhat-count-bound", bounded,
                "bound fails at N=" + std::to_string(bad));

    // patched bijection agrees with the index map away from H.
    SetHandle C = bernoulli_set(Rational(1, 2), trial_seed(seed, trial, 2), b);
    SetHandle H = into(evens(b), C);  // every other element of C
    PermutationHandle patched = patch_bijection(C, H);
    nat limit = std::min<nat>(N, 4000);
    bool agree = true;
    nat bad_n = 0;
    for (nat n = 0; n < limit; ++n) {
        if (C.member(n) && !H.member(n) && patched.forward(n) != C.count(n)) {
            agree = false;
            bad_n = n;
            break;
        }
    }
    expect_true(r, "patch-agrees-off-H", agree,
                "patched(" + std::to_string(bad_n) + ") != index in C");
    auto verify = verify_bijection_prefix(patched, limit);
    expect_true(r, "patch-injective", verify.injective(),
                verify.injective() ? ""
                                   : "collision at (" +
                                         std::to_string(verify.collision->first) + "," +
                                         std::to_string(verify.collision->second) + ")");

    auto shuffle = block_shuffle(16, trial_seed(seed, trial, 3), b);
    auto shuffle_verify = verify_bijection_prefix(shuffle, std::min<nat>(N, 10'000));
    expect_true(r, "blockshuffle-bijection",
                shuffle_verify.injective() && shuffle_verify.missing.empty(),
                "block shuffle not a bijection on the checked prefix");
}

void run_permutation_fixed(SuiteResult& r, Budget b) {
    std::vector<std::function<nat(nat)>> id = {[](nat n) { return n; }};
    SetHandle H = sparse_subset(omega(b), id, 6);
    expect_true(r, "sparse-start", H.prefix(1000) == std::vector<nat>({0, 1, 2, 3, 6, 720}),
                "H does not begin 0,1,2,3,6,720");
    bool bounded = true;
    nat bad = 0;
    for (nat n = 1; n <= 1000; ++n) {
        if (H.count(n) > factorial_index_count(n) + 1) {
            bounded = false;
            bad = n;
            break;
        }
    }
    expect_true(r, "sparse-factorial-bound", bounded,
                "count bound fails at N=" + std::to_string(bad));
}

} // namespace

SuiteResult run_identity_suite(const std::string& suite, nat trials,
                               std::uint64_t seed, nat prefix_n, Budget b) {
    SuiteResult result;
    result.suite = suite;
    result.trials = trials;
    result.prefix_n = prefix_n;
    result.seed = seed;

    if (suite == "core") {
        run_core_fixed(result, b);
        for (nat t = 0; t < trials; ++t)
            run_core_trial(result, t, seed, prefix_n, b);
    } else if (suite == "weakening") {
        for (nat t = 0; t < trials; ++t)
            run_weakening_trial(result, t, seed, prefix_n, b);
    } else if (suite == "partition") {
        run_partition_fixed(result, prefix_n, b);
        for (nat t = 0; t < trials; ++t)
            run_partition_trial(result, t, seed, prefix_n, b);
    } else if (suite == "permutation") {
        run_permutation_fixed(result, b);
        for (nat t = 0; t < trials; ++t)
            run_permutation_trial(result, t, seed, prefix_n, b);
    } else {
        throw domain_error("identities: unknown suite '" + suite +
                           "' (core, weakening, partition, permutation)");
    }
    return result;
}

} // namespace natset
