#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace natset {

using nat = std::uint64_t;

// Hard caps on how far lazy evaluation may reach. Sets are conceptually
// infinite; a query that would have to decide membership past max_value or
// enumerate past max_index throws budget_error instead of silently
// truncating.
struct Budget {
    nat max_value = 100'000'000;
    nat max_index = 10'000'000;

    static Budget meet(const Budget& a, const Budget& b) {
        return Budget{std::min(a.max_value, b.max_value),
                      std::min(a.max_index, b.max_index)};
    }
};

class evaluation_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Evaluation would touch a value or index beyond the budget.
class budget_error : public evaluation_error {
  public:
    using evaluation_error::evaluation_error;
};

// Enumeration ran past the end of a provably finite set.
class set_exhausted : public evaluation_error {
  public:
    using evaluation_error::evaluation_error;
};

// A patched bijection ran out of fill values (finite H).
class fill_exhausted : public evaluation_error {
  public:
    using evaluation_error::evaluation_error;
};

// partition_index found no piece below the index cap.
class index_cap_error : public evaluation_error {
  public:
    using evaluation_error::evaluation_error;
};

// Structurally invalid argument (r outside (0,1), modulus 0, ...).
class domain_error : public evaluation_error {
  public:
    using evaluation_error::evaluation_error;
};

} // namespace natset
