#include "natset/report_io.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

namespace natset {

using nlohmann::json;

std::string format_float12(const Rational& r) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", r.get_d());
    return buf;
}

namespace {

const char* estimator_name(EstimatorKind k) {
    return k == EstimatorKind::counting ? "counting" : "principal";
}

void append_rows(std::string& out, const DensityReport& r, const std::string& prefix) {
    for (const auto& cp : r.checkpoints) {
        out += prefix;
        out += std::to_string(cp.n);
        out += ',';
        out += std::to_string(cp.count);
        out += ',';
        out += cp.rho.get_num().get_str();
        out += ',';
        out += cp.rho.get_den().get_str();
        out += ',';
        out += format_float12(cp.rho);
        out += '\n';
    }
}

void append_meta(std::string& out, const ReportMeta& meta) {
    for (const auto& [key, value] : meta) {
        out += "# ";
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
}

json report_json(const DensityReport& r) {
    json checkpoints = json::array();
    for (const auto& cp : r.checkpoints) {
        checkpoints.push_back({{"n", cp.n},
                               {"count", cp.count},
                               {"rho_num", cp.rho.get_num().get_str()},
                               {"rho_den", cp.rho.get_den().get_str()},
                               {"rho_float", format_float12(cp.rho)}});
    }
    return {{"estimator", estimator_name(r.estimator)},
            {"tail_fraction", r.tail_fraction},
            {"tail_sup", r.tail_sup.get_str()},
            {"tail_inf", r.tail_inf.get_str()},
            {"checkpoints", std::move(checkpoints)}};
}

json meta_json(const ReportMeta& meta) {
    json config = json::object();
    for (const auto& [key, value] : meta)
        config[key] = value;
    return config;
}

} // namespace

std::string to_csv(const DensityReport& report, const ReportMeta& meta) {
    std::string out;
    append_meta(out, meta);
    out += "# estimator=";
    out += estimator_name(report.estimator);
    out += '\n';
    out += "n,count,rho_num,rho_den,rho_float\n";
    append_rows(out, report, "");
    out += "# tail_sup=" + report.tail_sup.get_str() + "\n";
    out += "# tail_inf=" + report.tail_inf.get_str() + "\n";
    return out;
}

std::string to_json(const DensityReport& report, const ReportMeta& meta) {
    json j = {{"config", meta_json(meta)}, {"report", report_json(report)}};
    return j.dump(2) + "\n";
}

std::string to_csv(const ProbeReport& report, const ReportMeta& meta,
                   const std::string& series_column) {
    std::string out;
    append_meta(out, meta);
    out += series_column + ",n,count,rho_num,rho_den,rho_float\n";
    for (const auto& entry : report.entries)
        append_rows(out, entry.report, entry.spec + ",");
    out += "# min_tail_inf=" + report.min_tail_inf.get_str() + "\n";
    out += "# max_tail_sup=" + report.max_tail_sup.get_str() + "\n";
    out += "# spread=" + report.spread.get_str() + "\n";
    out += std::string("# unstable=") + (report.unstable ? "true" : "false") + "\n";
    return out;
}

std::string to_json(const ProbeReport& report, const ReportMeta& meta,
                    const std::string& series_column) {
    json entries = json::array();
    for (const auto& entry : report.entries) {
        json e = report_json(entry.report);
        e[series_column] = entry.spec;
        entries.push_back(std::move(e));
    }
    json j = {{"config", meta_json(meta)},
              {"entries", std::move(entries)},
              {"summary",
               {{"min_tail_inf", report.min_tail_inf.get_str()},
                {"max_tail_sup", report.max_tail_sup.get_str()},
                {"spread", report.spread.get_str()},
                {"spread_float", format_float12(report.spread)},
                {"unstable", report.unstable}}}};
    return j.dump(2) + "\n";
}

} // namespace natset
