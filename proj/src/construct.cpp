#include "natset/construct.hpp"

#include <gmpxx.h>

#include <charconv>
#include <utility>

namespace natset {

std::uint64_t splitmix64_at(std::uint64_t seed, nat i) {
    std::uint64_t z = seed + (i + 1) * kSplitMixGamma;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// --- BitSource ---------------------------------------------------------------

BitSource::BitSource(std::uint64_t seed, ColumnMode mode) : seed_(seed), mode_(mode) {}

BitSource BitSource::child(nat column) const {
    return BitSource(seed_ ^ ((column + 1) * kSplitMixGamma), mode_);
}

namespace {

SetHandle fair_coin_set(std::uint64_t seed, std::string label, Budget b) {
    constexpr std::uint64_t half = 1ull << 63;
    return from_membership(
        std::move(label), [seed](nat n) { return splitmix64_at(seed, n) < half; }, b);
}

} // namespace

SetHandle BitSource::column_set(nat i, Budget b) const {
    if (mode_ == ColumnMode::pairing_view) {
        SetHandle master = fair_coin_set(seed_, spec() + ".master", b);
        return column(master, i);
    }
    return fair_coin_set(child(i).seed(), spec() + "[" + std::to_string(i) + "]", b);
}

std::string BitSource::spec() const {
    std::string s = "seed:" + std::to_string(seed_);
    if (mode_ == ColumnMode::pairing_view)
        s += ",mode=pairing";
    return s;
}

// --- RealSpec ----------------------------------------------------------------

struct RealSpec::State {
    // exactly one source
    std::optional<Rational> rational;      // in (0,1), canonical
    std::optional<std::uint64_t> seed;
    std::string spec_text;

    // long-division memo for rational sources: bits_[n] is the n-th binary
    // digit; remainder_ is the current numerator scaled into [0, den).
    std::vector<bool> bits;
    mpz_class remainder;

    bool bit(nat n) {
        if (seed)
            return (splitmix64_at(*seed, n) >> 63) != 0;
        const mpz_class& den = rational->get_den();
        while (bits.size() <= n) {
            remainder *= 2;
            if (remainder >= den) {
                remainder -= den;
                bits.push_back(true);
            } else {
                bits.push_back(false);
            }
        }
        return bits[n];
    }
};

RealSpec::RealSpec(std::shared_ptr<State> state) : state_(std::move(state)) {}

RealSpec RealSpec::from_rational(const Rational& r) {
    Rational c = r;
    c.canonicalize();
    if (c <= 0 || c >= 1)
        throw domain_error("real: r must lie in (0,1), got " + c.get_str());
    auto st = std::make_shared<State>();
    st->rational = c;
    st->remainder = c.get_num();
    st->spec_text = c.get_str();  // "p/q"
    return RealSpec(std::move(st));
}

RealSpec RealSpec::from_decimal(std::string_view text) {
    if (text.size() < 3 || text[0] != '0' || text[1] != '.')
        throw domain_error("real: decimal must look like 0.ddd, got '" +
                           std::string(text) + "'");
    std::string_view digits = text.substr(2);
    mpz_class num = 0, den = 1;
    for (char c : digits) {
        if (c < '0' || c > '9')
            throw domain_error("real: bad decimal digit in '" + std::string(text) + "'");
        num = num * 10 + (c - '0');
        den *= 10;
    }
    return from_rational(Rational(num, den));
}

RealSpec RealSpec::from_seed(std::uint64_t seed) {
    auto st = std::make_shared<State>();
    st->seed = seed;
    st->spec_text = "seed:" + std::to_string(seed);
    return RealSpec(std::move(st));
}

RealSpec RealSpec::parse(std::string_view text) {
    if (text.rfind("seed:", 0) == 0) {
        std::uint64_t seed = 0;
        auto rest = text.substr(5);
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), seed);
        if (ec != std::errc() || ptr != rest.data() + rest.size())
            throw domain_error("real: bad seed in '" + std::string(text) + "'");
        return from_seed(seed);
    }
    if (text.rfind("0.", 0) == 0)
        return from_decimal(text);
    size_t slash = text.find('/');
    if (slash == std::string_view::npos)
        throw domain_error("real: expected p/q, 0.ddd or seed:<n>, got '" +
                           std::string(text) + "'");
    mpz_class p, q;
    try {
        p = mpz_class(std::string(text.substr(0, slash)));
        q = mpz_class(std::string(text.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw domain_error("real: bad rational '" + std::string(text) + "'");
    }
    if (q == 0)
        throw domain_error("real: zero denominator in '" + std::string(text) + "'");
    return from_rational(Rational(p, q));
}

bool RealSpec::bit(nat n) const { return state_->bit(n); }

SetHandle RealSpec::bits(Budget b) const {
    auto st = state_;
    return from_membership("bits(" + spec() + ")", [st](nat n) { return st->bit(n); },
                           b);
}

std::optional<Rational> RealSpec::exact_value() const { return state_->rational; }

Rational RealSpec::partial_sum(nat j) const {
    mpz_class num = 0;
    for (nat n = 0; n < j; ++n) {
        num *= 2;
        if (state_->bit(n))
            num += 1;
    }
    mpz_class den = 1;
    den <<= j;
    Rational s(num, den);
    s.canonicalize();
    return s;
}

std::uint64_t RealSpec::threshold64() const {
    std::uint64_t t = 0;
    for (nat n = 0; n < 64; ++n)
        t = (t << 1) | (state_->bit(n) ? 1u : 0u);
    return t;
}

std::string RealSpec::spec() const { return state_->spec_text; }

// --- Bernoulli ---------------------------------------------------------------

SetHandle bernoulli_set(const RealSpec& r, std::uint64_t seed, Budget b) {
    std::uint64_t threshold = r.threshold64();
    std::string label = "bern(" + r.spec() + "," + std::to_string(seed) + ")";
    return from_membership(
        std::move(label),
        [seed, threshold](nat n) { return splitmix64_at(seed, n) < threshold; }, b);
}

SetHandle bernoulli_set(const Rational& r, std::uint64_t seed, Budget b) {
    return bernoulli_set(RealSpec::from_rational(r), seed, b);
}

// --- ColumnSource ------------------------------------------------------------

ColumnSource ColumnSource::from_bits(BitSource src) {
    ColumnSource c;
    c.bits_ = src;
    return c;
}

ColumnSource ColumnSource::constant_evens() { return ColumnSource{}; }

ColumnSource ColumnSource::from_generator(std::string spec,
                                          std::function<SetHandle(nat, Budget)> gen,
                                          bool constant) {
    ColumnSource c;
    c.gen_ = std::move(gen);
    c.gen_spec_ = std::move(spec);
    c.gen_constant_ = constant;
    return c;
}

bool ColumnSource::is_constant() const {
    if (gen_)
        return gen_constant_;
    return !bits_.has_value();  // constant_evens
}

ColumnSource ColumnSource::parse(std::string_view text) {
    if (text == "column=evens")
        return constant_evens();
    if (text.rfind("seed:", 0) != 0)
        throw domain_error("source: expected seed:<n>[,mode=...] or column=evens, got '" +
                           std::string(text) + "'");
    std::string_view rest = text.substr(5);
    size_t comma = rest.find(',');
    std::string_view num = rest.substr(0, comma);
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), seed);
    if (ec != std::errc() || ptr != num.data() + num.size())
        throw domain_error("source: bad seed in '" + std::string(text) + "'");
    auto mode = BitSource::ColumnMode::derived_seed;
    if (comma != std::string_view::npos) {
        std::string_view opt = rest.substr(comma + 1);
        if (opt == "mode=derived")
            mode = BitSource::ColumnMode::derived_seed;
        else if (opt == "mode=pairing")
            mode = BitSource::ColumnMode::pairing_view;
        else
            throw domain_error("source: unknown option '" + std::string(opt) + "'");
    }
    return from_bits(BitSource(seed, mode));
}

SetHandle ColumnSource::column(nat i, Budget b) const {
    if (gen_)
        return gen_(i, b);
    if (bits_)
        return bits_->column_set(i, b);
    return evens(b);
}

std::string ColumnSource::spec() const {
    if (gen_)
        return gen_spec_;
    return bits_ ? bits_->spec() : "column=evens";
}

// --- PartitionFamily ---------------------------------------------------------

PartitionFamily::PartitionFamily(ColumnSource src, nat index_cap, Budget b)
    : src_(std::move(src)), index_cap_(index_cap), budget_(b) {
    levels_.push_back(omega(b));  // B_0
}

void PartitionFamily::ensure(nat i) {
    if (i >= index_cap_)
        throw index_cap_error("partition: level " + std::to_string(i) +
                              " exceeds index cap " + std::to_string(index_cap_));
    while (pieces_.size() <= i) {
        nat level = pieces_.size();
        SetHandle col = src_.column(level, budget_);
        SetHandle b_cur = levels_[level];
        cols_.push_back(col);
        pieces_.push_back(into(complement(col), b_cur));     // A_i
        levels_.push_back(into(col, b_cur));                 // B_{i+1}
    }
}

SetHandle PartitionFamily::piece(nat i) {
    ensure(i);
    return pieces_[i];
}

SetHandle PartitionFamily::level_set(nat i) {
    if (i > 0)
        ensure(i - 1);
    return levels_[i];
}

SetHandle PartitionFamily::column(nat i) {
    ensure(i);
    return cols_[i];
}

std::optional<nat> PartitionFamily::try_index_of(nat m) {
    // m sits at index t of B_i; it lands in A_i exactly when column bit t is
    // 0, and otherwise survives into B_{i+1} at index count(col_i, t).
    nat t = m;
    bool constant = src_.is_constant();
    for (nat i = 0;; ++i) {
        if (i >= index_cap_)
            throw index_cap_error("partition: " + std::to_string(m) +
                                  " not in any piece below cap " +
                                  std::to_string(index_cap_));
        ensure(i);
        if (!cols_[i].member(t))
            return i;
        nat next = cols_[i].count(t);
        // With one fixed column, a kept element whose index does not move
        // repeats this exact step forever: provably never placed.
        if (constant && next == t)
            return std::nullopt;
        t = next;
    }
}

nat PartitionFamily::index_of(nat m) {
    auto idx = try_index_of(m);
    if (!idx)
        throw index_cap_error("partition: " + std::to_string(m) +
                              " is provably in no piece");
    return *idx;
}

std::shared_ptr<PartitionFamily> build_partition(ColumnSource src, nat levels,
                                                 nat index_cap, Budget b) {
    if (levels == 0)
        throw domain_error("partition: need at least one level");
    auto family = std::make_shared<PartitionFamily>(std::move(src), index_cap, b);
    family->piece(levels - 1);
    return family;
}

// --- X_r ---------------------------------------------------------------------

SetHandle build_xr(const RealSpec& r, std::shared_ptr<PartitionFamily> part, Budget b) {
    std::string label = "xr(" + r.spec() + "," + part->spec() + ")";
    return from_membership(
        std::move(label),
        [r, part](nat m) {
            // An element provably outside every piece is outside the union;
            // only the undecided cap case propagates as an error.
            auto idx = part->try_index_of(m);
            return idx.has_value() && r.bit(*idx);
        },
        b);
}

} // namespace natset
