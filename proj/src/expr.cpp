#include "natset/expr.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <utility>

#include "natset/construct.hpp"
#include "natset/density.hpp"
#include "natset/permutation.hpp"

namespace natset::dsl {

bool Expr::operator==(const Expr& other) const {
    if (head != other.head || number != other.number || text != other.text ||
        args.size() != other.args.size())
        return false;
    for (size_t i = 0; i < args.size(); ++i)
        if (!(*args[i] == *other.args[i]))
            return false;
    return true;
}

namespace {

enum class Arg { set, nat_lit, real_lit, source_lit, perm_spec };

struct HeadInfo {
    Head head;
    std::vector<Arg> args;  // empty = bare name
};

const std::map<std::string, HeadInfo, std::less<>>& head_table() {
    static const std::map<std::string, HeadInfo, std::less<>> table = {
        {"omega", {Head::omega, {}}},
        {"empty", {Head::empty, {}}},
        {"evens", {Head::evens, {}}},
        {"odds", {Head::odds, {}}},
        {"factorials", {Head::factorials, {}}},
        {"arith", {Head::arith, {Arg::nat_lit, Arg::nat_lit}}},
        {"bern", {Head::bern, {Arg::real_lit, Arg::nat_lit}}},
        {"col", {Head::col, {Arg::source_lit, Arg::nat_lit}}},
        {"partA", {Head::part_a, {Arg::source_lit, Arg::nat_lit}}},
        {"xr", {Head::xr, {Arg::real_lit, Arg::source_lit}}},
        {"into", {Head::into, {Arg::set, Arg::set}}},
        {"within", {Head::within, {Arg::set, Arg::set}}},
        {"join", {Head::join, {Arg::set, Arg::set}}},
        {"compl", {Head::compl_, {Arg::set}}},
        {"union", {Head::union_, {Arg::set, Arg::set}}},
        {"inter", {Head::inter, {Arg::set, Arg::set}}},
        {"diff", {Head::diff, {Arg::set, Arg::set}}},
        {"perm", {Head::perm, {Arg::perm_spec, Arg::set}}},
    };
    return table;
}

const char* head_name(Head h) {
    for (const auto& [name, info] : head_table())
        if (info.head == h)
            return name.c_str();
    return "?";
}

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr run() {
        auto e = parse_set();
        skip_ws();
        if (pos_ != text_.size())
            fail("trailing input");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& message) const {
        throw parse_error(message, pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!consume(c))
            fail(std::string("expected '") + c + "'");
    }

    std::string_view take_ident() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start)
            fail("expected a name");
        return text_.substr(start, pos_ - start);
    }

    nat take_number() {
        nat value = 0;
        auto begin = text_.data() + pos_;
        auto end = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr == begin)
            fail("expected a number");
        pos_ += static_cast<size_t>(ptr - begin);
        return value;
    }

    ExprPtr parse_set() {
        skip_ws();
        if (!std::isalpha(static_cast<unsigned char>(peek())))
            fail("expected a set expression");
        size_t name_pos = pos_;
        std::string_view name = take_ident();
        auto it = head_table().find(name);
        if (it == head_table().end()) {
            pos_ = name_pos;
            fail("unknown operation '" + std::string(name) + "'");
        }
        const HeadInfo& info = it->second;
        auto e = std::make_shared<Expr>();
        e->head = info.head;
        skip_ws();
        if (info.args.empty()) {
            if (peek() == '(')
                fail("'" + std::string(name) + "' takes no arguments");
            return e;
        }
        expect('(');
        for (size_t i = 0; i < info.args.size(); ++i) {
            if (i) {
                skip_ws();
                expect(',');
            }
            skip_ws();
            e->args.push_back(parse_arg(info.args[i]));
        }
        skip_ws();
        if (peek() == ',')
            fail("'" + std::string(name) + "' takes " +
                 std::to_string(info.args.size()) + " arguments");
        expect(')');
        return e;
    }

    ExprPtr parse_arg(Arg kind) {
        switch (kind) {
        case Arg::set:
            return parse_set();
        case Arg::nat_lit: {
            auto e = std::make_shared<Expr>();
            e->head = Head::lit_nat;
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail("expected a natural number");
            e->number = take_number();
            return e;
        }
        case Arg::real_lit:
            return parse_real();
        case Arg::source_lit:
            return parse_source();
        case Arg::perm_spec:
            return parse_perm_spec();
        }
        fail("internal: bad argument kind");
    }

    ExprPtr parse_real() {
        size_t start = pos_;
        std::string raw;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            take_number();
            if (consume('/')) {
                take_number();
            } else if (consume('.')) {
                if (!std::isdigit(static_cast<unsigned char>(peek())))
                    fail("expected digits after '.'");
                take_number();
            } else {
                fail("expected p/q or 0.ddd");
            }
            raw = std::string(text_.substr(start, pos_ - start));
        } else if (text_.compare(pos_, 5, "seed:") == 0) {
            pos_ += 5;
            take_number();
            raw = std::string(text_.substr(start, pos_ - start));
        } else {
            fail("expected a real (p/q, 0.ddd or seed:<n>)");
        }
        auto e = std::make_shared<Expr>();
        e->head = Head::lit_real;
        try {
            e->text = RealSpec::parse(raw).spec();  // canonical form
        } catch (const domain_error& err) {
            pos_ = start;
            fail(err.what());
        }
        return e;
    }

    ExprPtr parse_source() {
        size_t start = pos_;
        if (text_.compare(pos_, 5, "seed:") == 0) {
            pos_ += 5;
            take_number();
            // optional ",mode=derived|pairing"; the comma belongs to the
            // source only when followed by "mode="
            if (peek() == ',' && text_.compare(pos_ + 1, 5, "mode=") == 0) {
                pos_ += 6;
                take_ident();
            }
        } else if (text_.compare(pos_, 12, "column=evens") == 0) {
            pos_ += 12;
        } else {
            fail("expected a source (seed:<n>[,mode=...] or column=evens)");
        }
        std::string raw(text_.substr(start, pos_ - start));
        auto e = std::make_shared<Expr>();
        e->head = Head::lit_source;
        try {
            e->text = ColumnSource::parse(raw).spec();  // validates + canonicalizes
        } catch (const domain_error& err) {
            pos_ = start;
            fail(err.what());
        }
        return e;
    }

    // A permutation spec token: letters, digits, ':', '=', '|', and commas
    // that introduce another key=value pair (so "blockshuffle:w=2,seed=7"
    // stays one token while the argument comma still terminates it).
    ExprPtr parse_perm_spec() {
        size_t start = pos_;
        auto spec_char = [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == ':' ||
                   c == '=' || c == '|' || c == '(' || c == ')';
        };
        int depth = 0;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '(')
                ++depth;
            if (c == ')') {
                if (depth == 0)
                    break;
                --depth;
            }
            if (c == ',') {
                if (depth > 0) {
                    ++pos_;
                    continue;
                }
                // lookahead: comma continues the spec only before key '='
                size_t probe = pos_ + 1;
                size_t key_start = probe;
                while (probe < text_.size() &&
                       std::isalpha(static_cast<unsigned char>(text_[probe])))
                    ++probe;
                std::string_view key = text_.substr(key_start, probe - key_start);
                if (probe < text_.size() && text_[probe] == '=' &&
                    (key == "w" || key == "seed")) {
                    ++pos_;
                    continue;
                }
                break;
            }
            if (!spec_char(c))
                break;
            ++pos_;
        }
        if (pos_ == start)
            fail("expected a permutation spec");
        std::string raw(text_.substr(start, pos_ - start));
        try {
            (void)permutation_from_spec(raw);  // validate early
        } catch (const domain_error& err) {
            pos_ = start;
            fail(err.what());
        }
        auto e = std::make_shared<Expr>();
        e->head = Head::lit_perm;
        e->text = std::move(raw);
        return e;
    }

    std::string_view text_;
    size_t pos_ = 0;
};

} // namespace

ExprPtr parse(std::string_view text) { return Parser(text).run(); }

std::string print(const Expr& e) {
    switch (e.head) {
    case Head::lit_nat:
        return std::to_string(e.number);
    case Head::lit_real:
    case Head::lit_source:
    case Head::lit_perm:
        return e.text;
    default:
        break;
    }
    std::string out = head_name(e.head);
    if (!e.args.empty()) {
        out += '(';
        for (size_t i = 0; i < e.args.size(); ++i) {
            if (i)
                out += ',';
            out += print(*e.args[i]);
        }
        out += ')';
    }
    return out;
}

namespace {

struct EvalContext {
    Budget budget;
    std::map<std::string, SetHandle> sets;
    std::map<std::string, std::shared_ptr<PartitionFamily>> families;

    std::shared_ptr<PartitionFamily> family(const std::string& source_spec) {
        auto it = families.find(source_spec);
        if (it != families.end())
            return it->second;
        auto fam = std::make_shared<PartitionFamily>(
            ColumnSource::parse(source_spec), 64, budget);
        families.emplace(source_spec, fam);
        return fam;
    }
};

SetHandle eval_node(const Expr& e, EvalContext& ctx) {
    std::string key = print(e);
    if (auto it = ctx.sets.find(key); it != ctx.sets.end())
        return it->second;

    auto set_arg = [&](size_t i) { return eval_node(*e.args[i], ctx); };
    auto nat_arg = [&](size_t i) { return e.args[i]->number; };
    auto text_arg = [&](size_t i) -> const std::string& { return e.args[i]->text; };

    SetHandle result = [&]() -> SetHandle {
        switch (e.head) {
        case Head::omega: return omega(ctx.budget);
        case Head::empty: return empty_set(ctx.budget);
        case Head::evens: return evens(ctx.budget);
        case Head::odds: return odds(ctx.budget);
        case Head::factorials: return factorials(ctx.budget);
        case Head::arith: return arithmetic(nat_arg(0), nat_arg(1), ctx.budget);
        case Head::bern:
            return bernoulli_set(RealSpec::parse(text_arg(0)), nat_arg(1), ctx.budget);
        case Head::col:
            return ColumnSource::parse(text_arg(0)).column(nat_arg(1), ctx.budget);
        case Head::part_a: return ctx.family(text_arg(0))->piece(nat_arg(1));
        case Head::xr:
            return build_xr(RealSpec::parse(text_arg(0)), ctx.family(text_arg(1)),
                            ctx.budget);
        case Head::into: return into(set_arg(0), set_arg(1));
        case Head::within: return within(set_arg(0), set_arg(1));
        case Head::join: return join(set_arg(0), set_arg(1));
        case Head::compl_: return complement(set_arg(0));
        case Head::union_: return set_union(set_arg(0), set_arg(1));
        case Head::inter: return intersect(set_arg(0), set_arg(1));
        case Head::diff: return difference(set_arg(0), set_arg(1));
        case Head::perm:
            return apply(permutation_from_spec(text_arg(0), ctx.budget), set_arg(1));
        default:
            throw domain_error("eval: not a set-valued expression");
        }
    }();

    ctx.sets.emplace(std::move(key), result);
    return result;
}

} // namespace

SetHandle eval(const Expr& e, Budget budget) {
    EvalContext ctx{budget, {}, {}};
    return eval_node(e, ctx);
}

SetHandle eval_text(std::string_view text, Budget budget) {
    return eval(*parse(text), budget);
}

} // namespace natset::dsl
