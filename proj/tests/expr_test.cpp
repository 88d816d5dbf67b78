#include <doctest.h>

#include "ast_gen.hpp"
#include "natset/construct.hpp"
#include "natset/expr.hpp"
#include "natset/sets.hpp"
#include "oracles.hpp"

using namespace natset;
using dsl::Expr;
using dsl::Head;

namespace {
const Budget kSmall{500'000, 500'000};
}

TEST_CASE("parse builds the expected trees") {
    auto e = dsl::parse("within(odds, arith(2,4))");
    CHECK(e->head == Head::within);
    REQUIRE(e->args.size() == 2);
    CHECK(e->args[0]->head == Head::odds);
    CHECK(e->args[1]->head == Head::arith);
    CHECK(e->args[1]->args[0]->number == 2);
    CHECK(e->args[1]->args[1]->number == 4);

    auto xr = dsl::parse("xr(1/3, seed:42)");
    CHECK(xr->head == Head::xr);
    CHECK(xr->args[0]->head == Head::lit_real);
    CHECK(xr->args[0]->text == "1/3");
    CHECK(xr->args[1]->head == Head::lit_source);
    CHECK(xr->args[1]->text == "seed:42");

    auto perm = dsl::parse("perm(blockshuffle:w=256,seed=7, evens)");
    CHECK(perm->head == Head::perm);
    CHECK(perm->args[0]->text == "blockshuffle:w=256,seed=7");
    CHECK(perm->args[1]->head == Head::evens);
}

TEST_CASE("print then parse is the identity on trees") {
    for (const char* text :
         {"into(evens, odds)", "omega", "join(bern(1/2,7), compl(evens))",
          "union(inter(omega,empty), diff(odds,evens))",
          "perm(compose:identity|blockshuffle:w=4,seed=1, factorials)",
          "xr(0.75, column=evens)", "partA(seed:5,mode=pairing, 2)",
          "col(seed:9, 3)", "bern(seed:3, 11)"}) {
        auto e = dsl::parse(text);
        auto round = dsl::parse(dsl::print(*e));
        CHECK(*round == *e);
    }
}

TEST_CASE("decimals normalize to canonical rationals") {
    auto e = dsl::parse("bern(0.25, 7)");
    CHECK(e->args[0]->text == "1/4");
    CHECK(dsl::print(*e) == "bern(1/4,7)");
}

TEST_CASE("parse errors carry byte offsets") {
    auto offset_of = [](const char* text) {
        try {
            dsl::parse(text);
        } catch (const dsl::parse_error& e) {
            return e.offset();
        }
        return size_t(-1);
    };
    CHECK(offset_of("nonsense(1)") == 0);
    CHECK(offset_of("into(evens)") == 10);        // missing second argument
    CHECK(offset_of("into(evens, odds) junk") == 18);
    CHECK(offset_of("arith(2,)") == 8);
    CHECK(offset_of("bern(5/4, 1)") == 5);        // r outside (0,1)
    CHECK(offset_of("omega(3)") == 5);            // nullary head
    CHECK(offset_of("into(evens, odds, omega)") == 16);
}

TEST_CASE("parse accepts and ignores whitespace") {
    CHECK(*dsl::parse(" into( evens ,\todds )  ") == *dsl::parse("into(evens,odds)"));
}

TEST_CASE("random trees survive a print/parse round trip") {
    testgen::AstGen gen{20};
    for (int trial = 0; trial < 500; ++trial) {
        auto e = gen.set(1 + gen.next(3));
        std::string text = dsl::print(*e);
        auto round = dsl::parse(text);
        REQUIRE(*round == *e);
        CHECK(dsl::print(*round) == text);
    }
}

TEST_CASE("eval matches direct construction") {
    CHECK(dsl::eval_text("omega", kSmall).prefix(50) == oracle::iota_list(50));
    CHECK(dsl::eval_text("factorials", kSmall).prefix(25) ==
          std::vector<nat>{1, 2, 6, 24});

    // (B within A) into A = A ∩ B
    auto lhs = dsl::eval_text("into(within(bern(1/2,7), evens), evens)", kSmall);
    auto rhs = dsl::eval_text("inter(bern(1/2,7), evens)", kSmall);
    CHECK(lhs.prefix(3000) == rhs.prefix(3000));

    // ruler piece via the DSL
    auto piece = dsl::eval_text("partA(column=evens, 2)", kSmall);
    std::vector<nat> expect;
    for (nat k = 0; 4 * (2 * k + 1) < 200; ++k)
        expect.push_back(4 * (2 * k + 1));
    CHECK(piece.prefix(200) == expect);

    auto shuffled = dsl::eval_text("perm(identity, evens)", kSmall);
    CHECK(shuffled.prefix(100) == evens(kSmall).prefix(100));
}

TEST_CASE("evaluation is pure") {
    for (const char* text :
         {"xr(1/3, seed:4)", "join(bern(1/3,9), partA(seed:2, 1))"}) {
        auto a = dsl::eval_text(text, kSmall);
        auto b = dsl::eval_text(text, kSmall);
        CHECK(a.prefix(2000) == b.prefix(2000));
    }
}
