#include "natset/sets.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <utility>

namespace natset {
namespace detail {

class SetNode {
  public:
    SetNode(std::string label, Budget b) : label_(std::move(label)), budget_(b) {}
    virtual ~SetNode() = default;

    virtual bool member(nat n) = 0;
    virtual nat nth(nat k) = 0;
    virtual nat count_below(nat n) = 0;

    std::vector<nat> prefix(nat n) {
        nat c = count_below(n);
        std::vector<nat> out;
        out.reserve(c);
        for (nat k = 0; k < c; ++k)
            out.push_back(nth(k));
        return out;
    }

    const Budget& budget() const { return budget_; }
    const std::string& label() const { return label_; }

  protected:
    void check_value(nat n) const {
        if (n > budget_.max_value)
            throw budget_error(label_ + ": value " + std::to_string(n) +
                               " exceeds budget max_value " +
                               std::to_string(budget_.max_value));
    }
    void check_index(nat k) const {
        if (k > budget_.max_index)
            throw budget_error(label_ + ": index " + std::to_string(k) +
                               " exceeds budget max_index " +
                               std::to_string(budget_.max_index));
    }

    std::string label_;
    Budget budget_;
};

// Sets with exact formulas for all three views. No memo needed.
class ClosedFormNode : public SetNode {
  public:
    using SetNode::SetNode;

    bool member(nat n) final {
        check_value(n);
        return cf_member(n);
    }
    nat nth(nat k) final {
        check_index(k);
        auto v = cf_nth(k);
        if (!v)
            throw set_exhausted(label_ + ": no element at index " + std::to_string(k));
        check_value(*v);
        return *v;
    }
    nat count_below(nat n) final {
        if (n == 0)
            return 0;
        check_value(n - 1);
        return cf_count(n);
    }

  protected:
    virtual bool cf_member(nat n) const = 0;
    // nullopt means the (finite) set provably has no k-th element.
    virtual std::optional<nat> cf_nth(nat k) const = 0;
    virtual nat cf_count(nat n) const = 0;
};

// Sets defined by a characteristic function. The enumeration view is derived
// by an append-only upward scan; membership answers go straight to decide().
// A subclass that can prove it has no members past some point declares that
// with set_ceiling, which turns endless scans into provable exhaustion.
class MembershipNode : public SetNode {
  public:
    using SetNode::SetNode;

    bool member(nat n) final {
        check_value(n);
        if (n < scanned_below_)
            return std::binary_search(elems_.begin(), elems_.end(), n);
        if (ceiling_ && n >= *ceiling_)
            return false;
        return decide(n);
    }
    nat nth(nat k) final {
        check_index(k);
        while (elems_.size() <= k) {
            if (!scan_one())
                throw set_exhausted(label_ + ": set has only " +
                                    std::to_string(elems_.size()) + " elements");
        }
        return elems_[k];
    }
    nat count_below(nat n) final {
        if (n == 0)
            return 0;
        check_value(n - 1);
        while (scanned_below_ < n && scan_one()) {
        }
        return static_cast<nat>(
            std::lower_bound(elems_.begin(), elems_.end(), n) - elems_.begin());
    }

  protected:
    virtual bool decide(nat n) = 0;

    // Proven exclusive bound on members; may only tighten.
    void set_ceiling(nat c) {
        if (!ceiling_ || c < *ceiling_)
            ceiling_ = c;
    }

  private:
    // One scan step; false when the set is provably complete.
    bool scan_one() {
        if (ceiling_ && scanned_below_ >= *ceiling_)
            return false;
        if (scanned_below_ > budget_.max_value)
            throw budget_error(label_ + ": enumeration scan would pass budget max_value " +
                               std::to_string(budget_.max_value));
        if (decide(scanned_below_))
            elems_.push_back(scanned_below_);
        ++scanned_below_;
        return true;
    }

    std::vector<nat> elems_;  // members below scanned_below_, increasing
    nat scanned_below_ = 0;
    std::optional<nat> ceiling_;
};


// --- primitives ------------------------------------------------------------

class OmegaNode final : public ClosedFormNode {
  public:
    explicit OmegaNode(Budget b) : ClosedFormNode("omega", b) {}
    bool cf_member(nat) const override { return true; }
    std::optional<nat> cf_nth(nat k) const override { return k; }
    nat cf_count(nat n) const override { return n; }
};

class EmptyNode final : public ClosedFormNode {
  public:
    explicit EmptyNode(Budget b) : ClosedFormNode("empty", b) {}
    bool cf_member(nat) const override { return false; }
    std::optional<nat> cf_nth(nat) const override { return std::nullopt; }
    nat cf_count(nat) const override { return 0; }
};

class ArithmeticNode final : public ClosedFormNode {
  public:
    ArithmeticNode(std::string label, nat a, nat m, Budget b)
        : ClosedFormNode(std::move(label), b), a_(a), m_(m) {}
    bool cf_member(nat n) const override { return n >= a_ && (n - a_) % m_ == 0; }
    std::optional<nat> cf_nth(nat k) const override {
        if (k > (std::numeric_limits<nat>::max() - a_) / m_)
            throw budget_error(label_ + ": element overflows 64 bits");
        return a_ + k * m_;
    }
    nat cf_count(nat n) const override { return n > a_ ? (n - 1 - a_) / m_ + 1 : 0; }

  private:
    nat a_, m_;
};

// Distinct factorials representable in 64 bits: 1!, 2!, ..., 20!.
static const std::vector<nat>& factorial_table() {
    static const std::vector<nat> table = [] {
        std::vector<nat> t;
        nat f = 1;
        for (nat i = 1; i <= 20; ++i) {
            f *= i;
            t.push_back(f);
        }
        return t;
    }();
    return table;
}

class FactorialsNode final : public ClosedFormNode {
  public:
    explicit FactorialsNode(Budget b) : ClosedFormNode("factorials", b) {}
    bool cf_member(nat n) const override {
        const auto& t = factorial_table();
        return std::binary_search(t.begin(), t.end(), n);
    }
    std::optional<nat> cf_nth(nat k) const override {
        const auto& t = factorial_table();
        if (k >= t.size())
            throw budget_error(label_ + ": element " + std::to_string(k) +
                               " overflows 64 bits");
        return t[k];
    }
    nat cf_count(nat n) const override {
        const auto& t = factorial_table();
        return static_cast<nat>(std::lower_bound(t.begin(), t.end(), n) - t.begin());
    }
};

class FiniteNode final : public ClosedFormNode {
  public:
    FiniteNode(std::string label, std::vector<nat> elems, Budget b)
        : ClosedFormNode(std::move(label), b), elems_(std::move(elems)) {}
    bool cf_member(nat n) const override {
        return std::binary_search(elems_.begin(), elems_.end(), n);
    }
    std::optional<nat> cf_nth(nat k) const override {
        if (k >= elems_.size())
            return std::nullopt;
        return elems_[k];
    }
    nat cf_count(nat n) const override {
        return static_cast<nat>(
            std::lower_bound(elems_.begin(), elems_.end(), n) - elems_.begin());
    }

  private:
    std::vector<nat> elems_;
};

class FuncNode final : public MembershipNode {
  public:
    FuncNode(std::string label, std::function<bool(nat)> chi, Budget b)
        : MembershipNode(std::move(label), b), chi_(std::move(chi)) {}
    bool decide(nat n) override { return chi_(n); }

  private:
    std::function<bool(nat)> chi_;
};

// --- combinators -----------------------------------------------------------

using NodePtr = std::shared_ptr<SetNode>;

// B into A has two exact views: the k-th element is a_{b_k}, and a value v
// belongs iff v is in A with its A-index in B. Enumeration is pulled and
// memoized (it alone can prove finiteness); membership and counting go
// through the index characterization, which never has to look past the
// queried value: count(B into A, n) = count(B, count(A, n)).
class IntoNode final : public SetNode {
  public:
    IntoNode(std::string label, NodePtr B, NodePtr A, Budget b)
        : SetNode(std::move(label), b), B_(std::move(B)), A_(std::move(A)) {}

    bool member(nat v) override {
        check_value(v);
        return A_->member(v) && B_->member(A_->count_below(v));
    }

    nat count_below(nat n) override {
        if (n == 0)
            return 0;
        check_value(n - 1);
        return B_->count_below(A_->count_below(n));
    }

    nat nth(nat k) override {
        check_index(k);
        while (elems_.size() <= k) {
            if (done_)
                throw set_exhausted(label_ + ": set has only " +
                                    std::to_string(elems_.size()) + " elements");
            pull_one();
        }
        return elems_[k];
    }

  private:
    void pull_one() {
        nat bk, v;
        try {
            bk = B_->nth(elems_.size());
        } catch (const set_exhausted&) {
            done_ = true;  // B finite: into(B, A) is finite too
            return;
        }
        try {
            v = A_->nth(bk);
        } catch (const set_exhausted&) {
            done_ = true;  // A has no b_k-th element
            return;
        }
        check_value(v);
        elems_.push_back(v);
    }

    NodePtr B_, A_;
    std::vector<nat> elems_;
    bool done_ = false;
};

class WithinNode final : public MembershipNode {
  public:
    WithinNode(std::string label, NodePtr B, NodePtr A, Budget b)
        : MembershipNode(std::move(label), b), B_(std::move(B)), A_(std::move(A)) {}

    bool decide(nat k) override {
        nat ak;
        try {
            ak = A_->nth(k);
        } catch (const set_exhausted&) {
            set_ceiling(k);  // A provably has no k-th element, nor any later
            return false;
        }
        return B_->member(ak);
    }

  private:
    NodePtr B_, A_;
};

class JoinNode final : public MembershipNode {
  public:
    JoinNode(std::string label, NodePtr A, NodePtr B, Budget b)
        : MembershipNode(std::move(label), b), A_(std::move(A)), B_(std::move(B)) {}
    bool decide(nat n) override {
        return n % 2 == 0 ? A_->member(n / 2) : B_->member(n / 2);
    }

  private:
    NodePtr A_, B_;
};

enum class BoolOp { complement, unite, intersect, subtract };

class BoolNode final : public MembershipNode {
  public:
    BoolNode(std::string label, BoolOp op, NodePtr A, NodePtr B, Budget b)
        : MembershipNode(std::move(label), b), op_(op), A_(std::move(A)),
          B_(std::move(B)) {}

    bool decide(nat n) override {
        switch (op_) {
        case BoolOp::complement: return !A_->member(n);
        case BoolOp::unite: return A_->member(n) || B_->member(n);
        case BoolOp::intersect: return A_->member(n) && B_->member(n);
        case BoolOp::subtract: return A_->member(n) && !B_->member(n);
        }
        return false;
    }

  private:
    BoolOp op_;
    NodePtr A_, B_;
};

class ColumnNode final : public MembershipNode {
  public:
    ColumnNode(std::string label, NodePtr X, nat i, Budget b)
        : MembershipNode(std::move(label), b), X_(std::move(X)), i_(i) {}
    bool decide(nat n) override { return X_->member(pair_index(i_, n)); }

  private:
    NodePtr X_;
    nat i_;
};

} // namespace detail

// --- SetHandle -------------------------------------------------------------

SetHandle::SetHandle(std::shared_ptr<detail::SetNode> node) : node_(std::move(node)) {}

bool SetHandle::member(nat n) const { return node_->member(n); }
nat SetHandle::nth(nat k) const { return node_->nth(k); }
nat SetHandle::count(nat below) const { return node_->count_below(below); }
std::vector<nat> SetHandle::prefix(nat below) const { return node_->prefix(below); }
const Budget& SetHandle::budget() const { return node_->budget(); }
const std::string& SetHandle::label() const { return node_->label(); }

// --- factories -------------------------------------------------------------

SetHandle omega(Budget b) { return SetHandle(std::make_shared<detail::OmegaNode>(b)); }
SetHandle empty_set(Budget b) { return SetHandle(std::make_shared<detail::EmptyNode>(b)); }
SetHandle evens(Budget b) {
    return SetHandle(std::make_shared<detail::ArithmeticNode>("evens", 0, 2, b));
}
SetHandle odds(Budget b) {
    return SetHandle(std::make_shared<detail::ArithmeticNode>("odds", 1, 2, b));
}

SetHandle arithmetic(nat a, nat m, Budget b) {
    if (m == 0)
        throw domain_error("arith: modulus must be >= 1");
    if (a >= m)
        throw domain_error("arith: offset must be < modulus");
    std::string label = "arith(" + std::to_string(a) + "," + std::to_string(m) + ")";
    return SetHandle(std::make_shared<detail::ArithmeticNode>(std::move(label), a, m, b));
}

SetHandle factorials(Budget b) {
    return SetHandle(std::make_shared<detail::FactorialsNode>(b));
}

SetHandle finite(std::vector<nat> elems, Budget b) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    std::string label = "{";
    for (size_t i = 0; i < elems.size() && i < 8; ++i)
        label += (i ? "," : "") + std::to_string(elems[i]);
    if (elems.size() > 8)
        label += ",...";
    label += "}";
    return SetHandle(
        std::make_shared<detail::FiniteNode>(std::move(label), std::move(elems), b));
}

SetHandle from_membership(std::string label, std::function<bool(nat)> chi, Budget b) {
    return SetHandle(
        std::make_shared<detail::FuncNode>(std::move(label), std::move(chi), b));
}

// --- combinator factories ----------------------------------------------------

namespace {

std::string binop_label(const char* name, const SetHandle& x, const SetHandle& y) {
    return std::string(name) + "(" + x.label() + "," + y.label() + ")";
}

} // namespace

SetHandle into(SetHandle B, SetHandle A) {
    Budget b = Budget::meet(B.budget(), A.budget());
    return SetHandle(std::make_shared<detail::IntoNode>(binop_label("into", B, A),
                                                        B.node(), A.node(), b));
}

SetHandle within(SetHandle B, SetHandle A) {
    Budget b = Budget::meet(B.budget(), A.budget());
    return SetHandle(std::make_shared<detail::WithinNode>(binop_label("within", B, A),
                                                          B.node(), A.node(), b));
}

SetHandle join(SetHandle A, SetHandle B) {
    Budget b = Budget::meet(A.budget(), B.budget());
    return SetHandle(std::make_shared<detail::JoinNode>(binop_label("join", A, B),
                                                        A.node(), B.node(), b));
}

SetHandle complement(SetHandle A) {
    return SetHandle(std::make_shared<detail::BoolNode>("compl(" + A.label() + ")",
                                                        detail::BoolOp::complement,
                                                        A.node(), nullptr, A.budget()));
}

SetHandle set_union(SetHandle A, SetHandle B) {
    Budget b = Budget::meet(A.budget(), B.budget());
    return SetHandle(std::make_shared<detail::BoolNode>(binop_label("union", A, B),
                                                        detail::BoolOp::unite, A.node(),
                                                        B.node(), b));
}

SetHandle intersect(SetHandle A, SetHandle B) {
    Budget b = Budget::meet(A.budget(), B.budget());
    return SetHandle(std::make_shared<detail::BoolNode>(binop_label("inter", A, B),
                                                        detail::BoolOp::intersect,
                                                        A.node(), B.node(), b));
}

SetHandle difference(SetHandle A, SetHandle B) {
    Budget b = Budget::meet(A.budget(), B.budget());
    return SetHandle(std::make_shared<detail::BoolNode>(binop_label("diff", A, B),
                                                        detail::BoolOp::subtract,
                                                        A.node(), B.node(), b));
}

nat pair_index(nat i, nat n) {
    // pair(i, n) = 2^i (2n+1) - 1
    if (n > (std::numeric_limits<nat>::max() - 1) / 2)
        throw budget_error("pair: 2n+1 overflows 64 bits");
    nat odd = 2 * n + 1;
    if (i >= 64 || (i > 0 && odd > (std::numeric_limits<nat>::max() >> i)))
        throw budget_error("pair: 2^i(2n+1) overflows 64 bits");
    return (odd << i) - 1;
}

SetHandle column(SetHandle X, nat i) {
    std::string label = "col(" + X.label() + "," + std::to_string(i) + ")";
    return SetHandle(std::make_shared<detail::ColumnNode>(std::move(label), X.node(), i,
                                                          X.budget()));
}

} // namespace natset
