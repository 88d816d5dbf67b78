#include "natset/permutation.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <charconv>
#include <unordered_map>
#include <utility>

namespace natset {
namespace detail {

class PermNode {
  public:
    PermNode(std::string spec, Budget b) : spec_(std::move(spec)), budget_(b) {}
    virtual ~PermNode() = default;

    nat forward(nat n) {
        check_value(n);
        nat v = forward_raw(n);
        inverse_memo_.emplace(v, n);
        return v;
    }

    nat inverse(nat m) {
        check_value(m);
        if (auto direct = inverse_direct(m))
            return *direct;
        if (auto it = inverse_memo_.find(m); it != inverse_memo_.end())
            return it->second;
        // Forward-scan until the preimage shows up.
        while (true) {
            if (scan_next_ > budget_.max_value)
                throw budget_error(spec_ + ": inverse of " + std::to_string(m) +
                                   " not found within budget");
            nat v = forward(scan_next_);  // may throw; advance only on success
            ++scan_next_;
            if (v == m)
                return scan_next_ - 1;
        }
    }

    const std::string& spec() const { return spec_; }
    const Budget& budget() const { return budget_; }

  protected:
    virtual nat forward_raw(nat n) = 0;
    virtual std::optional<nat> inverse_direct(nat) { return std::nullopt; }

    void check_value(nat n) const {
        if (n > budget_.max_value)
            throw budget_error(spec_ + ": value " + std::to_string(n) +
                               " exceeds budget max_value");
    }

    std::string spec_;
    Budget budget_;

  private:
    std::unordered_map<nat, nat> inverse_memo_;
    nat scan_next_ = 0;
};

class IdentityNode final : public PermNode {
  public:
    explicit IdentityNode(Budget b) : PermNode("identity", b) {}
    nat forward_raw(nat n) override { return n; }
    std::optional<nat> inverse_direct(nat m) override { return m; }
};

class JoinHatNode final : public PermNode {
  public:
    JoinHatNode(PermutationHandle pi, Budget b)
        : PermNode(pi.spec() == "identity" ? "joinhat"
                                           : "joinhat(" + pi.spec() + ")",
                   b),
          pi_(std::move(pi)), facts_(factorials(b)),
          nonfacts_(complement(factorials(b))) {}

    nat forward_raw(nat n) override {
        if (n % 2 == 1)
            return facts_.nth(n / 2);            // 2k+1 -> f_k
        return nonfacts_.nth(pi_.forward(n / 2));  // 2k -> g_{pi(k)}
    }

    std::optional<nat> inverse_direct(nat m) override {
        if (facts_.member(m)) {
            nat k = facts_.count(m);  // index of m among the factorials
            return 2 * k + 1;
        }
        nat k = nonfacts_.count(m);
        return 2 * pi_.inverse(k);
    }

  private:
    PermutationHandle pi_;
    SetHandle facts_, nonfacts_;
};

class BlockShuffleNode final : public PermNode {
  public:
    BlockShuffleNode(nat width, std::uint64_t seed, Budget b)
        : PermNode("blockshuffle:w=" + std::to_string(width) +
                       ",seed=" + std::to_string(seed),
                   b),
          width_(width), seed_(seed) {
        if (width_ == 0)
            throw domain_error("blockshuffle: width must be >= 1");
    }

    nat forward_raw(nat n) override {
        if (width_ == 1)
            return n;
        nat block = n / width_;
        return block * width_ + block_perm(block).forward[n % width_];
    }

    std::optional<nat> inverse_direct(nat m) override {
        if (width_ == 1)
            return m;
        nat block = m / width_;
        return block * width_ + block_perm(block).inverse[m % width_];
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    struct BlockPerm {
        std::vector<nat> forward;
        std::vector<nat> inverse;
    };

    const BlockPerm& block_perm(nat block) {
        auto it = blocks_.find(block);
        if (it != blocks_.end())
            return it->second;
        BlockPerm bp;
        bp.forward.resize(width_);
        for (nat j = 0; j < width_; ++j)
            bp.forward[j] = j;
        // Fisher-Yates driven by a per-block SplitMix64 stream.
        std::uint64_t state = seed_ ^ mix(block + 1);
        for (nat j = width_ - 1; j > 0; --j) {
            state += 0x9E3779B97F4A7C15ull;
            std::uint64_t r = mix(state);
            std::swap(bp.forward[j], bp.forward[r % (j + 1)]);
        }
        bp.inverse.resize(width_);
        for (nat j = 0; j < width_; ++j)
            bp.inverse[bp.forward[j]] = j;
        return blocks_.emplace(block, std::move(bp)).first->second;
    }

    nat width_;
    std::uint64_t seed_;
    std::unordered_map<nat, BlockPerm> blocks_;
};

class ComposedNode final : public PermNode {
  public:
    ComposedNode(std::vector<PermutationHandle> parts, std::string spec, Budget b)
        : PermNode(std::move(spec), b), parts_(std::move(parts)) {}

    nat forward_raw(nat n) override {
        for (const auto& p : parts_)
            n = p.forward(n);
        return n;
    }
    std::optional<nat> inverse_direct(nat m) override {
        for (auto it = parts_.rbegin(); it != parts_.rend(); ++it)
            m = it->inverse(m);
        return m;
    }

  private:
    std::vector<PermutationHandle> parts_;
};

class FunctionNode final : public PermNode {
  public:
    FunctionNode(std::string spec, std::function<nat(nat)> f, Budget b)
        : PermNode(std::move(spec), b), f_(std::move(f)) {}
    nat forward_raw(nat n) override { return f_(n); }

  private:
    std::function<nat(nat)> f_;
};

// pi_f evaluates strictly in input order: the fill branch needs to know
// every value used before it.
class PatchedNode final : public PermNode {
  public:
    PatchedNode(SetHandle C, SetHandle H, Budget b)
        : PermNode("patch(" + C.label() + "," + H.label() + ")", b),
          C_(std::move(C)), H_(std::move(H)), fill_(within(H_, C_)) {}

    nat forward_raw(nat n) override {
        while (forward_.size() <= n)
            step();
        return forward_[n];
    }

  private:
    void step() {
        nat m = forward_.size();
        bool in_c = C_.member(m);
        bool in_h = H_.member(m);
        if (in_h && !in_c)
            throw domain_error(spec_ + ": H must be a subset of C (witness " +
                               std::to_string(m) + ")");
        nat v;
        if (in_c && !in_h) {
            v = c_count_;  // f(m) = index of m in C
        } else {
            try {
                v = fill_.nth(fill_used_);
            } catch (const set_exhausted&) {
                throw fill_exhausted(spec_ + ": fill values exhausted at input " +
                                     std::to_string(m));
            }
            ++fill_used_;
        }
        if (in_c)
            ++c_count_;
        forward_.push_back(v);
    }

    SetHandle C_, H_;
    SetHandle fill_;  // f(H) = within(H, C), consumed in increasing order
    std::vector<nat> forward_;
    nat c_count_ = 0;    // |C ∩ [0, forward_.size())|
    nat fill_used_ = 0;
};

} // namespace detail

PermutationHandle::PermutationHandle(std::shared_ptr<detail::PermNode> node)
    : node_(std::move(node)) {}

nat PermutationHandle::forward(nat n) const { return node_->forward(n); }
nat PermutationHandle::inverse(nat m) const { return node_->inverse(m); }
const std::string& PermutationHandle::spec() const { return node_->spec(); }
const Budget& PermutationHandle::budget() const { return node_->budget(); }

PermutationHandle identity_permutation(Budget b) {
    return PermutationHandle(std::make_shared<detail::IdentityNode>(b));
}

PermutationHandle join_hat(PermutationHandle pi) {
    Budget b = pi.budget();
    return PermutationHandle(std::make_shared<detail::JoinHatNode>(std::move(pi), b));
}

PermutationHandle block_shuffle(nat width, std::uint64_t seed, Budget b) {
    if (width == 0)
        throw domain_error("blockshuffle: width must be >= 1");
    return PermutationHandle(std::make_shared<detail::BlockShuffleNode>(width, seed, b));
}

PermutationHandle compose(std::vector<PermutationHandle> parts) {
    if (parts.empty())
        throw domain_error("compose: needs at least one permutation");
    Budget b = parts.front().budget();
    std::string spec = "compose:";
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i)
            spec += '|';
        spec += parts[i].spec();
        b = Budget::meet(b, parts[i].budget());
    }
    return PermutationHandle(
        std::make_shared<detail::ComposedNode>(std::move(parts), std::move(spec), b));
}

PermutationHandle from_function(std::string spec, std::function<nat(nat)> f, Budget b) {
    return PermutationHandle(
        std::make_shared<detail::FunctionNode>(std::move(spec), std::move(f), b));
}

PermutationHandle patch_bijection(SetHandle C, SetHandle H) {
    Budget b = Budget::meet(C.budget(), H.budget());
    return PermutationHandle(
        std::make_shared<detail::PatchedNode>(std::move(C), std::move(H), b));
}

SetHandle apply(const PermutationHandle& pi, SetHandle A) {
    Budget b = Budget::meet(pi.budget(), A.budget());
    std::string label = "perm(" + pi.spec() + "," + A.label() + ")";
    return from_membership(
        std::move(label), [pi, A](nat m) { return A.member(pi.inverse(m)); }, b);
}

SetHandle sparse_subset(const SetHandle& C,
                        const std::vector<std::function<nat(nat)>>& fs, nat K) {
    std::vector<nat> h;
    if (K == 0)
        return finite({}, C.budget());
    h.push_back(C.nth(0));
    nat next_index = 1;
    while (h.size() < K) {
        mpz_class threshold;  // h_n!
        mpz_fac_ui(threshold.get_mpz_t(), static_cast<unsigned long>(h.back()));
        if (mpz_sizeinbase(threshold.get_mpz_t(), 2) > 64)
            throw budget_error("sparse_subset: h_" + std::to_string(h.size() - 1) +
                               "! = " + std::to_string(h.back()) +
                               "! exceeds 64 bits; constructed " +
                               std::to_string(h.size()) + " of " + std::to_string(K) +
                               " elements");
        while (true) {
            nat c;
            try {
                c = C.nth(next_index);
            } catch (const budget_error& e) {
                throw budget_error("sparse_subset: constructed " +
                                   std::to_string(h.size()) + " of " +
                                   std::to_string(K) + " elements (" + e.what() + ")");
            }
            ++next_index;
            bool ok = true;
            for (const auto& f : fs) {
                // f(c) >= h_n! as exact integers
                if (mpz_cmp_ui(threshold.get_mpz_t(),
                               static_cast<unsigned long>(f(c))) > 0) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                h.push_back(c);
                break;
            }
        }
    }
    return finite(std::move(h), C.budget());
}

BijectionReport verify_bijection_prefix(const PermutationHandle& pi, nat N) {
    BijectionReport report;
    report.checked = N;
    std::unordered_map<nat, nat> seen;
    seen.reserve(N);
    for (nat n = 0; n < N; ++n) {
        nat v = pi.forward(n);
        auto [it, inserted] = seen.emplace(v, n);
        if (!inserted) {
            report.collision = std::make_pair(it->second, n);
            return report;
        }
    }
    for (nat v = 0; v < N; ++v)
        if (!seen.count(v))
            report.missing.push_back(v);
    return report;
}

namespace {

nat parse_nat(std::string_view s, const char* what) {
    nat value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw domain_error(std::string("permutation spec: bad ") + what + " '" +
                           std::string(s) + "'");
    return value;
}

} // namespace

PermutationHandle permutation_from_spec(std::string_view spec, Budget b) {
    if (spec == "identity")
        return identity_permutation(b);
    if (spec == "joinhat")
        return join_hat(identity_permutation(b));
    if (spec.rfind("joinhat(", 0) == 0 && spec.back() == ')')
        return join_hat(
            permutation_from_spec(spec.substr(8, spec.size() - 9), b));
    if (spec.rfind("blockshuffle:", 0) == 0) {
        std::string_view params = spec.substr(13);
        nat width = 0;
        std::uint64_t seed = 0;
        bool have_w = false, have_seed = false;
        while (!params.empty()) {
            size_t comma = params.find(',');
            std::string_view item = params.substr(0, comma);
            size_t eq = item.find('=');
            if (eq == std::string_view::npos)
                throw domain_error("permutation spec: expected key=value in '" +
                                   std::string(item) + "'");
            std::string_view key = item.substr(0, eq);
            std::string_view val = item.substr(eq + 1);
            if (key == "w") {
                width = parse_nat(val, "width");
                have_w = true;
            } else if (key == "seed") {
                seed = parse_nat(val, "seed");
                have_seed = true;
            } else {
                throw domain_error("permutation spec: unknown key '" +
                                   std::string(key) + "'");
            }
            params = comma == std::string_view::npos ? std::string_view{}
                                                     : params.substr(comma + 1);
        }
        if (!have_w || !have_seed)
            throw domain_error("permutation spec: blockshuffle needs w= and seed=");
        return block_shuffle(width, seed, b);
    }
    if (spec.rfind("compose:", 0) == 0) {
        std::string_view rest = spec.substr(8);
        std::vector<PermutationHandle> parts;
        while (!rest.empty()) {
            size_t bar = rest.find('|');
            parts.push_back(permutation_from_spec(rest.substr(0, bar), b));
            rest = bar == std::string_view::npos ? std::string_view{}
                                                 : rest.substr(bar + 1);
        }
        return compose(std::move(parts));
    }
    throw domain_error("permutation spec: unrecognized '" + std::string(spec) + "'");
}

std::vector<PermutationHandle> family_from_spec(std::string_view spec, Budget b) {
    std::vector<PermutationHandle> family;
    if (spec == "default" || spec.empty()) {
        family.push_back(identity_permutation(b));
        family.push_back(join_hat(identity_permutation(b)));
        for (nat width : {2u, 16u, 256u, 4096u})
            for (std::uint64_t seed = 1; seed <= 4; ++seed)
                family.push_back(block_shuffle(width, seed, b));
        return family;
    }
    while (!spec.empty()) {
        size_t semi = spec.find(';');
        family.push_back(permutation_from_spec(spec.substr(0, semi), b));
        spec = semi == std::string_view::npos ? std::string_view{} : spec.substr(semi + 1);
    }
    return family;
}

} // namespace natset
