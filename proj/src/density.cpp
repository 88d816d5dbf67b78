#include "natset/density.hpp"

#include <algorithm>
#include <cmath>

namespace natset {

std::vector<nat> GridSpec::points() const {
    if (max_n == 0)
        throw domain_error("grid: max_n must be >= 1");
    std::vector<nat> pts;
    double x = static_cast<double>(std::max<nat>(start, 1));
    while (x < static_cast<double>(max_n)) {
        nat n = static_cast<nat>(std::ceil(x));
        if (n >= max_n)
            break;
        if (pts.empty() || n > pts.back())
            pts.push_back(n);
        x *= ratio;
    }
    pts.push_back(max_n);
    return pts;
}

Rational density_at(const SetHandle& A, nat n) {
    if (n == 0)
        throw domain_error("density_at: n must be >= 1");
    Rational rho(A.count(n), n);
    rho.canonicalize();
    return rho;
}

namespace {

void fill_tail(DensityReport& r) {
    if (r.checkpoints.empty()) {
        r.tail_sup = 0;
        r.tail_inf = 0;
        return;
    }
    size_t window = static_cast<size_t>(
        std::ceil(r.tail_fraction * static_cast<double>(r.checkpoints.size())));
    window = std::clamp<size_t>(window, 1, r.checkpoints.size());
    size_t first = r.checkpoints.size() - window;
    r.tail_sup = r.checkpoints[first].rho;
    r.tail_inf = r.checkpoints[first].rho;
    for (size_t i = first + 1; i < r.checkpoints.size(); ++i) {
        const Rational& rho = r.checkpoints[i].rho;
        if (rho > r.tail_sup)
            r.tail_sup = rho;
        if (rho < r.tail_inf)
            r.tail_inf = rho;
    }
}

Checkpoint make_checkpoint(nat n, nat count) {
    Rational rho(count, n);
    rho.canonicalize();
    return Checkpoint{n, count, rho};
}

} // namespace

DensityReport density_report(const SetHandle& A, const GridSpec& grid,
                             double tail_fraction) {
    DensityReport r;
    r.estimator = EstimatorKind::counting;
    r.tail_fraction = tail_fraction;
    for (nat n : grid.points())
        r.checkpoints.push_back(make_checkpoint(n, A.count(n)));
    fill_tail(r);
    return r;
}

DensityReport principal_checkpoints(const SetHandle& A, nat K, double tail_fraction) {
    DensityReport r;
    r.estimator = EstimatorKind::principal;
    r.tail_fraction = tail_fraction;
    for (nat k = 0; k < K; ++k) {
        nat ak = A.nth(k);
        if (ak > 0)
            r.checkpoints.push_back(make_checkpoint(ak, k));  // trough: k/a_k
        r.checkpoints.push_back(make_checkpoint(ak + 1, k + 1));  // peak: (k+1)/(a_k+1)
    }
    std::sort(r.checkpoints.begin(), r.checkpoints.end(),
              [](const Checkpoint& a, const Checkpoint& b) { return a.n < b.n; });
    r.checkpoints.erase(std::unique(r.checkpoints.begin(), r.checkpoints.end(),
                                    [](const Checkpoint& a, const Checkpoint& b) {
                                        return a.n == b.n;
                                    }),
                        r.checkpoints.end());
    fill_tail(r);
    return r;
}

ProbeReport intrinsic_probe(const SetHandle& A,
                            const std::vector<PermutationHandle>& family,
                            const GridSpec& grid, double tail_fraction) {
    ProbeReport probe;
    for (const auto& pi : family) {
        SetHandle image = apply(pi, A);
        probe.entries.push_back({pi.spec(), density_report(image, grid, tail_fraction)});
    }
    if (!probe.entries.empty()) {
        probe.min_tail_inf = probe.entries.front().report.tail_inf;
        probe.max_tail_sup = probe.entries.front().report.tail_sup;
        for (const auto& e : probe.entries) {
            if (e.report.tail_inf < probe.min_tail_inf)
                probe.min_tail_inf = e.report.tail_inf;
            if (e.report.tail_sup > probe.max_tail_sup)
                probe.max_tail_sup = e.report.tail_sup;
        }
    }
    probe.spread = probe.max_tail_sup - probe.min_tail_inf;
    probe.unstable = probe.spread > kInstabilityThreshold;
    return probe;
}

} // namespace natset
