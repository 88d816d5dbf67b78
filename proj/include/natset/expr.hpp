#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "natset/budget.hpp"
#include "natset/sets.hpp"

namespace natset::dsl {

// Grammar:  expr := name | name '(' arg {',' arg} ')'
// Arguments are typed by the head: sets, naturals, reals ("p/q", "0.ddd",
// "seed:<n>"), sources ("seed:<n>[,mode=derived|pairing]", "column=evens"),
// or permutation specs (see permutation_from_spec). Case-sensitive ASCII.
enum class Head {
    // set-valued
    omega,
    empty,
    evens,
    odds,
    factorials,
    arith,
    bern,
    col,
    part_a,  // "partA"
    xr,
    into,
    within,
    join,
    compl_,
    union_,
    inter,
    diff,
    perm,
    // literals
    lit_nat,
    lit_real,    // canonical "p/q" or "seed:<n>"
    lit_source,  // canonical source spec
    lit_perm,    // permutation spec
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    Head head = Head::omega;
    std::vector<ExprPtr> args;
    nat number = 0;    // lit_nat
    std::string text;  // lit_real / lit_source / lit_perm, canonical form

    bool operator==(const Expr& other) const;
};

class parse_error : public std::runtime_error {
  public:
    parse_error(const std::string& message, size_t offset)
        : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    size_t offset() const { return offset_; }

  private:
    size_t offset_;
};

ExprPtr parse(std::string_view text);
std::string print(const Expr& e);

// Builds the handle for a set-valued expression. Identical subtrees share
// one handle (and one memo); repeated partition sources share one family.
SetHandle eval(const Expr& e, Budget budget = {});
SetHandle eval_text(std::string_view text, Budget budget = {});

} // namespace natset::dsl
