// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Run directly or through ctest. A single criterion can be selected
// by number: natset_acceptance 7

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ast_gen.hpp"
#include "natset/construct.hpp"
#include "natset/density.hpp"
#include "natset/expr.hpp"
#include "natset/identities.hpp"
#include "natset/permutation.hpp"
#include "natset/sets.hpp"

using namespace natset;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

Rational abs_diff(const Rational& a, const Rational& b) {
    Rational d = a - b;
    return d < 0 ? Rational(-d) : d;
}

// mpq equality needs canonical operands
Rational canon(nat num, nat den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::vector<nat> iota(nat n) {
    std::vector<nat> v(n);
    for (nat i = 0; i < n; ++i)
        v[i] = i;
    return v;
}

// ---- 1: exact identity suite on 200 seeded sets at prefix 10^4 -------------

Outcome criterion_identities() {
    auto start = std::chrono::steady_clock::now();
    SuiteResult core = run_identity_suite("core", 200, 1, 10'000);
    SuiteResult weakening = run_identity_suite("weakening", 200, 1, 10'000);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start)
                      .count();
    nat violations = core.violation_count() + weakening.violation_count();
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%llu violations, %.1fs (limit 60s)",
                  static_cast<unsigned long long>(violations), secs);
    if (violations > 0) {
        for (const auto& suite : {core, weakening})
            for (const auto& c : suite.checks)
                if (!c.violations.empty())
                    return {false, c.violations.front()};
    }
    return {violations == 0 && secs <= 60.0, buf};
}

// ---- 2: the non-associativity witness, exactly -----------------------------

Outcome criterion_non_assoc() {
    SetHandle lhs = within(within(odds(), arithmetic(2, 4)), evens());
    SetHandle rhs = within(odds(), within(arithmetic(2, 4), evens()));
    bool left_empty = lhs.prefix(1000).empty();
    bool right_full = rhs.prefix(1000) == iota(1000);
    return {left_empty && right_full,
            left_empty ? (right_full ? "both groupings exact" : "right side not omega")
                       : "left side not empty"};
}

// ---- 3: counting and principal estimators agree exactly --------------------

Outcome criterion_estimator_agreement() {
    std::vector<SetHandle> sets = {evens(), factorials()};
    for (std::uint64_t s = 1; s <= 5; ++s)
        sets.push_back(bernoulli_set(Rational(1, 2), s));
    nat checked = 0;
    for (const auto& A : sets) {
        for (nat k = 0; k < 10'000; ++k) {
            nat ak;
            try {
                ak = A.nth(k);
            } catch (const budget_error&) {
                break;  // a_k beyond the value budget: clause satisfied vacuously
            }
            if (density_at(A, ak + 1) != canon(k + 1, ak + 1))
                return {false, A.label() + " disagrees at k=" + std::to_string(k)};
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " checkpoints equal"};
}

// ---- 4: finite perturbation bound at every prefix --------------------------

Outcome criterion_density_zero_bound() {
    SetHandle H = factorials();
    const nat N = 10'000;
    for (std::uint64_t s = 1; s <= 50; ++s) {
        SetHandle X = bernoulli_set(Rational(1, 2), s);
        SetHandle un = set_union(X, H);
        SetHandle df = difference(X, H);
        nat cx = 0, cu = 0, cd = 0, ch = 0;
        for (nat n = 1; n <= N; ++n) {
            cx += X.member(n - 1);
            cu += un.member(n - 1);
            cd += df.member(n - 1);
            ch += H.member(n - 1);
            // cleared-denominator form of |rho_n(X∪H) - rho_n(X)| <= |H↾n|/n
            nat gap_u = cu > cx ? cu - cx : cx - cu;
            nat gap_d = cd > cx ? cd - cx : cx - cd;
            if (gap_u > ch || gap_d > ch)
                return {false, "bound fails at seed " + std::to_string(s) + ", n=" +
                                   std::to_string(n)};
            if (n % 1000 == 0) {
                // spot-check the rational statement verbatim
                Rational bound(ch, n);
                if (abs_diff(density_at(un, n), density_at(X, n)) > bound ||
                    abs_diff(density_at(df, n), density_at(X, n)) > bound)
                    return {false, "rational form fails at n=" + std::to_string(n)};
            }
        }
    }
    return {true, "50 seeds, every n <= 10^4, union and difference"};
}

// ---- 5: join interleaving at every prefix ----------------------------------

Outcome criterion_join_interleaving() {
    const nat N = 10'000;
    for (std::uint64_t s = 1; s <= 50; ++s) {
        SetHandle A = bernoulli_set(Rational(1, 2), 2 * s);
        SetHandle B = bernoulli_set(Rational(1, 2), 2 * s + 1);
        SetHandle J = join(A, B);
        nat ca = 0, cb = 0, cj = 0;
        for (nat n = 1; n <= N; ++n) {
            ca += A.member(n - 1);
            cb += B.member(n - 1);
            cj += J.member(2 * n - 2);
            cj += J.member(2 * n - 1);
            if (cj != ca + cb)
                return {false, "2N*rho fails at pair " + std::to_string(s) + ", N=" +
                                   std::to_string(n)};
        }
    }
    return {true, "50 pairs, every N <= 10^4"};
}

// ---- 6: ruler partition, exactly -------------------------------------------

Outcome criterion_ruler() {
    PartitionFamily ruler(ColumnSource::constant_evens(), 64, Budget{});
    const nat N = 100'000;
    for (nat i = 0; i < 6; ++i) {
        std::vector<nat> expect;
        for (nat k = 0;; ++k) {
            nat v = (nat(1) << i) * (2 * k + 1);
            if (v >= N)
                break;
            expect.push_back(v);
        }
        if (ruler.piece(i).prefix(N) != expect)
            return {false, "piece " + std::to_string(i) + " differs"};
    }
    // closed form: the piece index of m >= 1 is its 2-adic valuation; 0 is
    // provably placed nowhere
    if (ruler.try_index_of(0).has_value())
        return {false, "index_of(0) found a piece"};
    for (nat m = 1; m < N; ++m) {
        nat v = m, i = 0;
        while ((v & 1) == 0) {
            v >>= 1;
            ++i;
        }
        if (ruler.index_of(m) != i)
            return {false, "index_of(" + std::to_string(m) + ") wrong"};
    }
    return {true, "pieces 0..5 and index_of exact on 10^5"};
}

// ---- 7: partition densities approach 2^-(i+1) ------------------------------

Outcome criterion_partition_density() {
    auto start = std::chrono::steady_clock::now();
    const nat N = 1'000'000;
    const Rational tolerance(1, 100);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto family =
            build_partition(ColumnSource::from_bits(BitSource(seed)), 6, 64, Budget{});
        for (nat i = 0; i < 6; ++i) {
            Rational target(1, nat(1) << (i + 1));
            Rational rho = density_at(family->piece(i), N);
            if (abs_diff(rho, target) > tolerance)
                return {false, "seed " + std::to_string(seed) + " piece " +
                                   std::to_string(i) + " off target"};
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start)
                      .count();
    char buf[120];
    std::snprintf(buf, sizeof(buf), "5 seeds x 6 pieces within 0.01, %.1fs (limit 120s)",
                  secs);
    return {secs <= 120.0, buf};
}

// ---- 8: X_r over the ruler, exactly ----------------------------------------

Outcome criterion_xr_deterministic() {
    const nat N = 100'000;
    auto ruler = build_partition(ColumnSource::constant_evens(), 1, 64, Budget{});
    SetHandle x34 = build_xr(RealSpec::parse("3/4"), ruler);
    std::vector<nat> not_mult4;
    for (nat m = 0; m < N; ++m)
        if (m % 4 != 0)
            not_mult4.push_back(m);
    if (x34.prefix(N) != not_mult4)
        return {false, "X_{3/4} differs from omega minus multiples of 4"};

    SetHandle x12 = build_xr(RealSpec::parse("1/2"), ruler);
    if (x12.prefix(N) != odds().prefix(N))
        return {false, "X_{1/2} differs from the odds"};
    return {true, "r=3/4 and r=1/2 exact on 10^5"};
}

// ---- 9: X_r statistics and truncated additivity ----------------------------

Outcome criterion_xr_statistical() {
    const nat N = 1'000'000;
    const Rational tolerance(1, 100);
    RealSpec r = RealSpec::parse("1/3");
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto family =
            build_partition(ColumnSource::from_bits(BitSource(seed)), 6, 64, Budget{});
        SetHandle xr = build_xr(r, family);
        Rational rho = density_at(xr, N);
        if (abs_diff(rho, Rational(1, 3)) > tolerance)
            return {false, "seed " + std::to_string(seed) + ": rho off 1/3"};

        // truncated additivity: selected pieces are disjoint, so densities add
        SetHandle selected = empty_set();
        std::vector<nat> chosen;
        for (nat i = 0; i < 6; ++i)
            if (r.bit(i)) {
                chosen.push_back(i);
                selected = set_union(selected, family->piece(i));
            }
        for (nat n : GridSpec{N, 64, 1.3}.points()) {
            Rational sum = 0;
            for (nat i : chosen)
                sum += density_at(family->piece(i), n);
            if (density_at(selected, n) != sum)
                return {false, "additivity breaks at checkpoint " + std::to_string(n)};
        }
    }
    return {true, "5 seeds within 0.01 of 1/3; additivity exact at every checkpoint"};
}

// ---- 10: product density and within-preservation ---------------------------

Outcome criterion_product_density() {
    const nat N = 100'000;
    const Rational tolerance(1, 50);
    for (std::uint64_t s = 1; s <= 5; ++s) {
        SetHandle A = bernoulli_set(Rational(1, 2), 100 + s);
        SetHandle B = bernoulli_set(Rational(1, 2), 200 + s);
        Rational rho = density_at(into(B, A), N);
        if (abs_diff(rho, Rational(1, 4)) > tolerance)
            return {false, "into pair " + std::to_string(s) + " off 1/4"};
    }
    for (const auto& r : {Rational(1, 2), Rational(1, 3)}) {
        for (std::uint64_t s = 1; s <= 5; ++s) {
            SetHandle X = bernoulli_set(r, 300 + s);
            Rational rho = density_at(within(X, evens()), N);
            if (abs_diff(rho, r) > tolerance)
                return {false, "within seed " + std::to_string(s) + " off " +
                                   r.get_str()};
        }
    }
    return {true, "into pairs near 1/4, within near r, all within 0.02"};
}

// ---- 11: join permutation bound and probe flags ----------------------------

Outcome criterion_join_permutation() {
    const nat N = 100'000;
    SetHandle F = factorials();
    PermutationHandle jh = join_hat(identity_permutation());
    for (std::uint64_t s = 1; s <= 20; ++s) {
        SetHandle A = bernoulli_set(Rational(1, 2), 400 + s);
        SetHandle image = apply(jh, join(A, empty_set()));
        nat ca = 0, ci = 0, cf = 0;
        for (nat n = 1; n <= N; ++n) {
            ca += A.member(n - 1);
            ci += image.member(n - 1);
            cf += F.member(n - 1);
            nat gap = ca > ci ? ca - ci : ci - ca;
            if (gap > cf + 1)
                return {false, "counting bound fails at seed " + std::to_string(s) +
                                   ", N=" + std::to_string(n)};
        }
    }

    GridSpec grid{N, 64, 1.3};
    auto family = family_from_spec("default");
    auto unstable = intrinsic_probe(join(bernoulli_set(Rational(1, 2), 1), empty_set()),
                                    family, grid);
    if (unstable.spread < Rational(1, 5))
        return {false, "join(A,empty) spread below 0.2: " +
                           unstable.spread.get_str()};
    auto stable = intrinsic_probe(bernoulli_set(Rational(1, 2), 1), family, grid);
    if (stable.spread > Rational(1, 50))
        return {false, "bern(1/2) spread above 0.02: " + stable.spread.get_str()};
    return {true, "bound holds for 20 seeds; spreads " + unstable.spread.get_str() +
                      " vs " + stable.spread.get_str()};
}

// ---- 12: sparse subset, exactly ---------------------------------------------

Outcome criterion_sparse_subset() {
    std::vector<std::function<nat(nat)>> id = {[](nat n) { return n; }};
    SetHandle H = sparse_subset(omega(), id, 6);
    if (H.prefix(100'000) != std::vector<nat>({0, 1, 2, 3, 6, 720}))
        return {false, "H does not start 0,1,2,3,6,720"};
    for (nat n = 1; n <= 10'000; ++n)
        if (H.count(n) > factorial_index_count(n) + 1)
            return {false, "factorial bound fails at N=" + std::to_string(n)};
    bool refused = false;
    try {
        sparse_subset(omega(), id, 7);
    } catch (const budget_error&) {
        refused = true;  // 720! cannot be reached by any 64-bit value
    }
    return {refused, refused ? "H exact, bound holds, K=7 reports its budget"
                             : "K=7 unexpectedly succeeded"};
}

// ---- 13: DSL round trip and CLI determinism ---------------------------------

std::string run_cli_capture(const std::string& args) {
    std::string command = std::string(NATSET_CLI_PATH) + " " + args + " 2>/dev/null";
    std::string output;
    char buffer[4096];
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe)
        return "<popen failed>";
    size_t got;
    while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0)
        output.append(buffer, got);
    if (pclose(pipe) != 0)
        return "<nonzero exit>";
    return output;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion_dsl_and_cli() {
    testgen::AstGen gen{77};
    for (int trial = 0; trial < 500; ++trial) {
        auto e = gen.set(1 + gen.next(3));
        auto round = dsl::parse(dsl::print(*e));
        if (!(*round == *e))
            return {false, "round trip differs for " + dsl::print(*e)};
    }

    std::string base = "density --expr \"bern(1/3,9)\" --max-n 50000 ";
    for (const char* fmt : {"csv", "json"}) {
        std::string f1 = "/tmp/natset_acc_1." + std::string(fmt);
        std::string f2 = "/tmp/natset_acc_2." + std::string(fmt);
        run_cli_capture(base + "--format " + fmt + " --out " + f1);
        run_cli_capture(base + "--format " + fmt + " --out " + f2);
        std::string a = slurp(f1);
        if (a.empty() || a != slurp(f2))
            return {false, std::string("CLI output not deterministic (") + fmt + ")"};
    }
    return {true, "500 trees round trip; CLI outputs bit-identical"};
}

} // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria = {
        {1, "exact-identity-suite", criterion_identities},
        {2, "non-associativity-witness", criterion_non_assoc},
        {3, "estimator-agreement", criterion_estimator_agreement},
        {4, "finite-perturbation-bound", criterion_density_zero_bound},
        {5, "join-interleaving", criterion_join_interleaving},
        {6, "ruler-partition", criterion_ruler},
        {7, "partition-density-convergence", criterion_partition_density},
        {8, "xr-deterministic", criterion_xr_deterministic},
        {9, "xr-statistical", criterion_xr_statistical},
        {10, "product-density", criterion_product_density},
        {11, "join-permutation-bound", criterion_join_permutation},
        {12, "sparse-subset", criterion_sparse_subset},
        {13, "dsl-roundtrip-cli-determinism", criterion_dsl_and_cli},
    };

    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.id != only)
            continue;
        auto start = std::chrono::steady_clock::now();
        Outcome outcome{false, ""};
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                    start)
                          .count();
        std::printf("%s %2d %-32s (%.1fs) %s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name, secs, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass)
            ++failures;
    }
    return failures;
}
