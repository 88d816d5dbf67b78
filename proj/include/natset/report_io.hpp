#pragma once

#include <string>
#include <utility>
#include <vector>

#include "natset/density.hpp"

namespace natset {

// Resolved run configuration echoed into every report so outputs are
// reproducible from the file alone. Order is preserved.
using ReportMeta = std::vector<std::pair<std::string, std::string>>;

// 12 significant digits, C locale.
std::string format_float12(const Rational& r);

// CSV layout: "# key=value" comment lines, then the fixed header
// n,count,rho_num,rho_den,rho_float and one row per checkpoint, then
// "# tail_sup=..." / "# tail_inf=..." trailers.
std::string to_csv(const DensityReport& report, const ReportMeta& meta);
std::string to_json(const DensityReport& report, const ReportMeta& meta);

// Multi-series reports add a leading label column ("perm" for probes,
// "level" for partitions).
std::string to_csv(const ProbeReport& report, const ReportMeta& meta,
                   const std::string& series_column = "perm");
std::string to_json(const ProbeReport& report, const ReportMeta& meta,
                    const std::string& series_column = "perm");

} // namespace natset
