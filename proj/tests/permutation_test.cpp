#include <doctest.h>

#include <gmpxx.h>

#include "natset/construct.hpp"
#include "natset/identities.hpp"
#include "natset/permutation.hpp"
#include "oracles.hpp"

using namespace natset;

namespace {
const Budget kSmall{1'000'000, 1'000'000};
}

TEST_CASE("join_hat sends odds to factorials and evens to non-factorials") {
    auto jh = join_hat(identity_permutation());
    CHECK(jh.forward(1) == 1);
    CHECK(jh.forward(3) == 2);
    CHECK(jh.forward(5) == 6);
    CHECK(jh.forward(7) == 24);
    CHECK(jh.forward(0) == 0);
    CHECK(jh.forward(2) == 3);
    CHECK(jh.forward(4) == 4);
    CHECK(jh.forward(6) == 5);

    // the odd half does not depend on the inner permutation
    auto jh_shuffled = join_hat(block_shuffle(8, 42));
    for (nat n = 1; n < 22; n += 2)  // odd inputs: 12! would pass the budget
        CHECK(jh_shuffled.forward(n) == jh.forward(n));

    for (nat n = 0; n < 22; ++n)
        CHECK(jh.inverse(jh.forward(n)) == n);
    CHECK_THROWS_AS(jh.forward(99), budget_error);  // 50! has no 64-bit home
}

TEST_CASE("patched bijection follows the worked example") {
    // C the evens with index map f(2n) = n, H the multiples of 4
    auto patched = patch_bijection(evens(), arithmetic(0, 4));
    std::vector<nat> expected = {0, 2, 1, 4, 6, 8, 3, 10};
    for (nat n = 0; n < expected.size(); ++n)
        CHECK(patched.forward(n) == expected[n]);

    auto report = verify_bijection_prefix(patched, 2000);
    CHECK(report.injective());
    for (nat n = 0; n < 500; ++n)
        CHECK(patched.inverse(patched.forward(n)) == n);
}

TEST_CASE("patched bijection with full fill is the identity") {
    auto patched = patch_bijection(omega(), omega());
    for (nat n = 0; n < 1000; ++n)
        CHECK(patched.forward(n) == n);
}

TEST_CASE("patched bijection maps sets the way the index map does") {
    SetHandle A = bernoulli_set(Rational(1, 2), 31, kSmall);
    SetHandle C = evens(kSmall);
    SetHandle H = arithmetic(0, 4, kSmall);
    auto patched = patch_bijection(C, H);

    // pi_f((A ∩ C) ∖ H) = f(A ∩ C) ∖ f(H), with f images given by within
    SetHandle lhs = apply(patched, difference(intersect(A, C), H));
    SetHandle rhs = difference(within(intersect(A, C), C), within(H, C));
    CHECK(lhs.prefix(1500) == rhs.prefix(1500));
}

TEST_CASE("patch against omega needs fill only on H") {
    auto patched = patch_bijection(omega(kSmall), finite({0, 1}, kSmall));
    // fill values are within({0,1}, omega) = {0,1}; inputs 0 and 1 use them up
    CHECK(patched.forward(0) == 0);
    CHECK(patched.forward(1) == 1);
    for (nat n = 2; n < 50; ++n)
        CHECK(patched.forward(n) == n);  // off H the index map is the identity
}

TEST_CASE("patch reports exhausted fill for finite C") {
    auto patched = patch_bijection(finite({0, 2}, kSmall), finite({0}, kSmall));
    CHECK(patched.forward(0) == 0);
    CHECK_THROWS_AS(patched.forward(1), fill_exhausted);
}

TEST_CASE("patch rejects H not contained in C") {
    auto patched = patch_bijection(evens(kSmall), odds(kSmall));
    CHECK_THROWS_AS(patched.forward(1), domain_error);
}

TEST_CASE("apply basics") {
    SetHandle A = bernoulli_set(Rational(1, 2), 12, kSmall);
    CHECK(apply(identity_permutation(kSmall), A).prefix(800) == A.prefix(800));
    auto shuffle = block_shuffle(32, 5, kSmall);
    CHECK(apply(shuffle, omega(kSmall)).prefix(500) == oracle::iota_list(500));

    // block shuffles permute within blocks, so counts at block edges agree
    SetHandle image = apply(shuffle, A);
    for (nat k = 1; k <= 20; ++k)
        CHECK(image.count(32 * k) == A.count(32 * k));
}

TEST_CASE("join_hat image tracks the original set within the factorial count") {
    SetHandle A = bernoulli_set(Rational(1, 2), 77, kSmall);
    SetHandle image = apply(join_hat(identity_permutation(kSmall)),
                            join(A, empty_set(kSmall)));
    SetHandle F = factorials(kSmall);
    for (nat n = 1; n <= 3000; ++n) {
        nat ca = A.count(n), ci = image.count(n);
        nat gap = ca > ci ? ca - ci : ci - ca;
        CHECK(gap <= F.count(n) + 1);
    }
}

TEST_CASE("sparse subset construction") {
    std::vector<std::function<nat(nat)>> id = {[](nat n) { return n; }};

    SetHandle H = sparse_subset(omega(), id, 6);
    CHECK(H.prefix(100'000) == std::vector<nat>{0, 1, 2, 3, 6, 720});
    CHECK_THROWS_AS(sparse_subset(omega(), id, 7), budget_error);

    SetHandle He = sparse_subset(evens(), id, 4);
    CHECK(He.prefix(1000) == std::vector<nat>{0, 2, 4, 24});

    // the defining inequality f(h_{n+1}) >= h_n!
    auto h = H.prefix(1000);
    for (size_t i = 0; i + 1 < h.size(); ++i) {
        mpz_class fact;
        mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(h[i]));
        CHECK(mpz_cmp_ui(fact.get_mpz_t(),
                         static_cast<unsigned long>(h[i + 1])) <= 0);
    }
}

TEST_CASE("sparse subset with several injections") {
    // reference run of the same recurrence, kept independent of the library
    std::vector<std::function<nat(nat)>> fs = {[](nat n) { return n; },
                                               [](nat n) { return 3 * n + 1; }};
    std::vector<nat> expected;
    expected.push_back(0);
    while (expected.size() < 5) {
        mpz_class fact;
        mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(expected.back()));
        nat c = expected.back();
        while (true) {
            ++c;
            bool ok = mpz_cmp_ui(fact.get_mpz_t(), static_cast<unsigned long>(c)) <= 0 &&
                      mpz_cmp_ui(fact.get_mpz_t(),
                                 static_cast<unsigned long>(3 * c + 1)) <= 0;
            if (ok)
                break;
        }
        expected.push_back(c);
    }
    SetHandle H = sparse_subset(omega(), fs, 5);
    CHECK(H.prefix(100'000) == expected);
}

TEST_CASE("factorial index count") {
    CHECK(factorial_index_count(1) == 0);
    CHECK(factorial_index_count(2) == 2);   // 0! and 1!
    CHECK(factorial_index_count(3) == 3);   // plus 2!
    CHECK(factorial_index_count(7) == 4);   // plus 3!
    CHECK(factorial_index_count(721) == 7); // plus 4!, 5!, 6!
}

TEST_CASE("verify_bijection_prefix") {
    auto ident = verify_bijection_prefix(identity_permutation(), 100);
    CHECK(ident.injective());
    CHECK(ident.missing.empty());

    auto jh = verify_bijection_prefix(join_hat(identity_permutation()), 10);
    CHECK(jh.injective());
    CHECK(jh.missing == std::vector<nat>{8, 9});

    auto broken = from_function("halver", [](nat n) { return n / 2 * 2; });
    auto report = verify_bijection_prefix(broken, 10);
    REQUIRE(report.collision.has_value());
    CHECK(report.collision->first == 0);
    CHECK(report.collision->second == 1);
}

TEST_CASE("block shuffle is a bijection and width 1 is the identity") {
    auto w1 = block_shuffle(1, 99);
    for (nat n = 0; n < 200; ++n)
        CHECK(w1.forward(n) == n);

    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto bs = block_shuffle(16, seed);
        auto report = verify_bijection_prefix(bs, 10'000);
        CHECK(report.injective());
        CHECK(report.missing.empty());
        for (nat n = 0; n < 1000; ++n)
            CHECK(bs.inverse(bs.forward(n)) == n);
    }
}

TEST_CASE("composition applies parts left to right") {
    auto bs = block_shuffle(8, 3);
    auto comp = compose({bs, bs});
    for (nat n = 0; n < 200; ++n)
        CHECK(comp.forward(n) == bs.forward(bs.forward(n)));
    for (nat n = 0; n < 200; ++n)
        CHECK(comp.inverse(comp.forward(n)) == n);
}

TEST_CASE("composition is associative on evaluated prefixes") {
    auto a = block_shuffle(4, 1);
    auto b = block_shuffle(16, 2);
    auto c = block_shuffle(64, 3);
    auto left = compose({compose({a, b}), c});
    auto right = compose({a, compose({b, c})});
    for (nat n = 0; n < 500; ++n)
        CHECK(left.forward(n) == right.forward(n));
}

TEST_CASE("permutation specs round trip") {
    for (const char* spec :
         {"identity", "joinhat", "blockshuffle:w=256,seed=7",
          "compose:identity|blockshuffle:w=4,seed=1"}) {
        auto pi = permutation_from_spec(spec);
        CHECK(pi.spec() == spec);
    }
    CHECK_THROWS_AS(permutation_from_spec("wat"), domain_error);
    CHECK_THROWS_AS(permutation_from_spec("blockshuffle:w=4"), domain_error);
    CHECK(family_from_spec("default").size() == 18);
    CHECK(family_from_spec("identity;joinhat").size() == 2);
}
