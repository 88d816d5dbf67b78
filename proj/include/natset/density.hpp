#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "natset/budget.hpp"
#include "natset/permutation.hpp"
#include "natset/sets.hpp"

namespace natset {

// All densities are exact rationals; floating point appears only in
// rendered output.
using Rational = mpq_class;

enum class EstimatorKind { counting, principal };

struct Checkpoint {
    nat n;
    nat count;
    Rational rho;  // count / n, canonical
};

// Checkpoint schedule: the geometric grid ceil(start * ratio^j) clipped to
// max_n, with max_n itself always included.
struct GridSpec {
    nat max_n = 100'000;
    nat start = 64;
    double ratio = 1.3;

    std::vector<nat> points() const;
};

struct DensityReport {
    EstimatorKind estimator = EstimatorKind::counting;
    std::vector<Checkpoint> checkpoints;
    double tail_fraction = 0.25;
    // Extremes of rho over the last ceil(tail_fraction * size) checkpoints.
    // Estimates of limsup/liminf, never certified limits.
    Rational tail_sup;
    Rational tail_inf;
};

// |A ∩ [0,n)| / n. Throws domain_error for n = 0.
Rational density_at(const SetHandle& A, nat n);

DensityReport density_report(const SetHandle& A, const GridSpec& grid,
                             double tail_fraction = 0.25);

// Checkpoints on the principal-function subsequences: (a_k + 1, k+1) where
// the counting sequence peaks and (a_k, k) where it bottoms out, for k < K.
// The lower checkpoint at k = 0 is skipped when a_0 = 0.
DensityReport principal_checkpoints(const SetHandle& A, nat K,
                                    double tail_fraction = 0.25);

struct ProbeEntry {
    std::string spec;
    DensityReport report;
};

struct ProbeReport {
    std::vector<ProbeEntry> entries;
    Rational min_tail_inf;
    Rational max_tail_sup;
    Rational spread;  // max_tail_sup - min_tail_inf
    bool unstable = false;
};

// Spread above this flags the probed set as unstable under the family.
inline const Rational kInstabilityThreshold = Rational(1, 10);

// Density reports for pi(A) over the sampled family. Evidence only: no
// finite family certifies intrinsic density.
ProbeReport intrinsic_probe(const SetHandle& A,
                            const std::vector<PermutationHandle>& family,
                            const GridSpec& grid, double tail_fraction = 0.25);

} // namespace natset
