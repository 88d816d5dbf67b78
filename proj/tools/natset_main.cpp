#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "natset/construct.hpp"
#include "natset/density.hpp"
#include "natset/expr.hpp"
#include "natset/identities.hpp"
#include "natset/permutation.hpp"
#include "natset/report_io.hpp"
#include "natset/sets.hpp"

namespace {

using namespace natset;

struct CommonOptions {
    nat budget_value = Budget{}.max_value;
    nat budget_index = Budget{}.max_index;
    std::string format = "csv";
    std::string out;

    Budget budget() const { return Budget{budget_value, budget_index}; }
};

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open output file '" + out_path + "'");
    file << content;
}

GridSpec parse_grid(const std::string& text, nat max_n) {
    GridSpec grid;
    grid.max_n = max_n;
    std::string_view rest = text;
    while (!rest.empty()) {
        size_t comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw domain_error("grid: expected key=value, got '" + std::string(item) +
                               "'");
        std::string key(item.substr(0, eq));
        std::string value(item.substr(eq + 1));
        if (key == "n0")
            grid.start = std::stoull(value);
        else if (key == "ratio")
            grid.ratio = std::stod(value);
        else
            throw domain_error("grid: unknown key '" + key + "'");
        rest = comma == std::string_view::npos ? std::string_view{}
                                               : rest.substr(comma + 1);
    }
    return grid;
}

void append_common_meta(ReportMeta& meta, const CommonOptions& common) {
    meta.emplace_back("budget_value", std::to_string(common.budget_value));
    meta.emplace_back("budget_index", std::to_string(common.budget_index));
    meta.emplace_back("format", common.format);
}

void append_grid_meta(ReportMeta& meta, const GridSpec& grid, double tail_fraction) {
    meta.emplace_back("grid_n0", std::to_string(grid.start));
    meta.emplace_back("grid_ratio", format_float12(Rational(grid.ratio * 1e6, 1e6)));
    meta.emplace_back("max_n", std::to_string(grid.max_n));
    meta.emplace_back("tail_fraction",
                      format_float12(Rational(tail_fraction * 1e6, 1e6)));
}

int cmd_eval(const CommonOptions& common, const std::string& expr_text, nat prefix_n) {
    SetHandle set = dsl::eval_text(expr_text, common.budget());
    auto elems = set.prefix(prefix_n);
    std::string out;
    for (size_t i = 0; i < elems.size(); ++i) {
        out += std::to_string(elems[i]);
        out += (i + 1 == elems.size()) ? '\n' : ' ';
    }
    out += "count=" + std::to_string(elems.size()) + "\n";
    emit(out, common.out);
    return 0;
}

int cmd_density(const CommonOptions& common, const std::string& expr_text, nat max_n,
                const std::string& grid_text, const std::string& estimator,
                nat principal_k, double tail_fraction) {
    Budget budget = common.budget();
    SetHandle set = dsl::eval_text(expr_text, budget);
    GridSpec grid = parse_grid(grid_text, max_n);

    DensityReport report;
    if (estimator == "counting") {
        report = density_report(set, grid, tail_fraction);
    } else if (estimator == "principal") {
        report = principal_checkpoints(set, principal_k, tail_fraction);
    } else {
        throw domain_error("estimator must be counting or principal");
    }

    ReportMeta meta;
    meta.emplace_back("command", "density");
    meta.emplace_back("expr", dsl::print(*dsl::parse(expr_text)));
    meta.emplace_back("estimator", estimator);
    if (estimator == "principal")
        meta.emplace_back("principal_k", std::to_string(principal_k));
    append_grid_meta(meta, grid, tail_fraction);
    append_common_meta(meta, common);

    emit(common.format == "json" ? to_json(report, meta) : to_csv(report, meta),
         common.out);
    return 0;
}

int cmd_identities(const CommonOptions& common, const std::string& suite, nat trials,
                   std::uint64_t seed, nat prefix_n) {
    SuiteResult result =
        run_identity_suite(suite, trials, seed, prefix_n, common.budget());
    std::string out;
    out += "suite=" + result.suite + " trials=" + std::to_string(result.trials) +
           " prefix_n=" + std::to_string(result.prefix_n) +
           " seed=" + std::to_string(result.seed) + "\n";
    for (const auto& check : result.checks) {
        out += (check.violations.empty() ? "ok   " : "FAIL ") + check.name +
               " runs=" + std::to_string(check.runs) + "\n";
        for (const auto& v : check.violations)
            out += "     witness: " + v + "\n";
    }
    out += result.passed() ? "all identities hold\n"
                           : std::to_string(result.violation_count()) + " violation(s)\n";
    emit(out, common.out);
    return result.passed() ? 0 : 1;
}

int cmd_probe(const CommonOptions& common, const std::string& expr_text, nat max_n,
              const std::string& grid_text, const std::string& family_text,
              double tail_fraction) {
    Budget budget = common.budget();
    SetHandle set = dsl::eval_text(expr_text, budget);
    GridSpec grid = parse_grid(grid_text, max_n);
    auto family = family_from_spec(family_text, budget);
    ProbeReport report = intrinsic_probe(set, family, grid, tail_fraction);

    ReportMeta meta;
    meta.emplace_back("command", "probe");
    meta.emplace_back("expr", dsl::print(*dsl::parse(expr_text)));
    meta.emplace_back("family", family_text);
    append_grid_meta(meta, grid, tail_fraction);
    append_common_meta(meta, common);

    emit(common.format == "json" ? to_json(report, meta) : to_csv(report, meta),
         common.out);
    std::cerr << "spread=" << format_float12(report.spread)
              << (report.unstable ? " (unstable)" : " (stable)") << "\n";
    return 0;
}

int cmd_partition(const CommonOptions& common, const std::string& source_text,
                  nat levels, nat max_n, const std::string& grid_text,
                  double tail_fraction) {
    Budget budget = common.budget();
    auto family = build_partition(ColumnSource::parse(source_text), levels, 64, budget);
    GridSpec grid = parse_grid(grid_text, max_n);

    ReportMeta meta;
    meta.emplace_back("command", "partition");
    meta.emplace_back("source", family->spec());
    meta.emplace_back("levels", std::to_string(levels));
    append_grid_meta(meta, grid, tail_fraction);
    append_common_meta(meta, common);

    // reuse the probe layouts: one labelled report per level
    ProbeReport per_level;
    for (nat i = 0; i < levels; ++i) {
        per_level.entries.push_back(
            {"A" + std::to_string(i),
             density_report(family->piece(i), grid, tail_fraction)});
    }
    per_level.min_tail_inf = per_level.entries.front().report.tail_inf;
    per_level.max_tail_sup = per_level.entries.front().report.tail_sup;
    for (const auto& e : per_level.entries) {
        per_level.min_tail_inf = std::min(per_level.min_tail_inf, e.report.tail_inf);
        per_level.max_tail_sup = std::max(per_level.max_tail_sup, e.report.tail_sup);
    }
    per_level.spread = per_level.max_tail_sup - per_level.min_tail_inf;
    per_level.unstable = false;

    emit(common.format == "json" ? to_json(per_level, meta, "level")
                                 : to_csv(per_level, meta, "level"),
         common.out);
    return 0;
}

int cmd_construct_xr(const CommonOptions& common, const std::string& r_text,
                     const std::string& source_text, nat prefix_n, nat max_n,
                     const std::string& grid_text, double tail_fraction) {
    Budget budget = common.budget();
    RealSpec r = RealSpec::parse(r_text);
    auto family = build_partition(ColumnSource::parse(source_text), 1, 64, budget);
    SetHandle xr = build_xr(r, family, budget);

    if (prefix_n > 0) {
        auto elems = xr.prefix(prefix_n);
        std::string out;
        for (size_t i = 0; i < elems.size(); ++i) {
            out += std::to_string(elems[i]);
            out += (i + 1 == elems.size()) ? '\n' : ' ';
        }
        out += "count=" + std::to_string(elems.size()) + "\n";
        emit(out, common.out);
        return 0;
    }

    GridSpec grid = parse_grid(grid_text, max_n);
    DensityReport report = density_report(xr, grid, tail_fraction);
    ReportMeta meta;
    meta.emplace_back("command", "construct-xr");
    meta.emplace_back("r", r.spec());
    meta.emplace_back("source", family->spec());
    append_grid_meta(meta, grid, tail_fraction);
    append_common_meta(meta, common);
    emit(common.format == "json" ? to_json(report, meta) : to_csv(report, meta),
         common.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"natset: lazy subsets of the naturals, density estimation, "
                 "permutation probes"};
    app.require_subcommand(1);

    CommonOptions common;
    auto add_common = [&](CLI::App* cmd, bool with_format) {
        cmd->add_option("--budget-value", common.budget_value,
                        "largest value evaluation may touch")
            ->envname("NATSET_BUDGET_VALUE")
            ->capture_default_str();
        cmd->add_option("--budget-index", common.budget_index,
                        "largest enumeration index evaluation may touch")
            ->envname("NATSET_BUDGET_INDEX")
            ->capture_default_str();
        cmd->add_option("--out", common.out, "output file (default stdout)");
        if (with_format)
            cmd->add_option("--format", common.format, "csv or json")
                ->check(CLI::IsMember({"csv", "json"}))
                ->capture_default_str();
    };

    std::string expr_text, grid_text, family_text = "default", suite = "core";
    std::string source_text = "seed:1", r_text = "1/2", estimator = "counting";
    nat prefix_n = 100, max_n = 100'000, trials = 100, principal_k = 1000;
    std::uint64_t seed = 1;
    double tail_fraction = 0.25;

    auto* eval_cmd = app.add_subcommand("eval", "print a prefix of a set expression");
    eval_cmd->add_option("--expr", expr_text, "set expression")->required();
    eval_cmd->add_option("--prefix", prefix_n, "list members below this bound")
        ->capture_default_str();
    add_common(eval_cmd, false);

    auto* density_cmd = app.add_subcommand("density", "density report for a set");
    density_cmd->add_option("--expr", expr_text, "set expression")->required();
    density_cmd->add_option("--max-n", max_n, "largest checkpoint")
        ->capture_default_str();
    density_cmd->add_option("--grid", grid_text, "n0=<n>,ratio=<x>");
    density_cmd->add_option("--estimator", estimator, "counting or principal")
        ->check(CLI::IsMember({"counting", "principal"}))
        ->capture_default_str();
    density_cmd->add_option("--principal-k", principal_k,
                            "checkpoints for the principal estimator")
        ->capture_default_str();
    density_cmd->add_option("--tail-fraction", tail_fraction,
                            "fraction of checkpoints in the tail window")
        ->capture_default_str();
    add_common(density_cmd, true);

    auto* ident_cmd =
        app.add_subcommand("identities", "run an exact identity suite on seeded sets");
    ident_cmd->add_option("--suite", suite, "core, weakening, partition, permutation")
        ->check(CLI::IsMember({"core", "weakening", "partition", "permutation"}))
        ->capture_default_str();
    ident_cmd->add_option("--trials", trials, "seeded trials")->capture_default_str();
    ident_cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    nat ident_prefix = 10'000;
    ident_cmd->add_option("--prefix", ident_prefix, "prefix bound for comparisons")
        ->capture_default_str();
    add_common(ident_cmd, false);

    auto* probe_cmd = app.add_subcommand(
        "probe", "density stability of a set under a permutation family");
    probe_cmd->add_option("--expr", expr_text, "set expression")->required();
    probe_cmd->add_option("--max-n", max_n, "largest checkpoint")
        ->capture_default_str();
    probe_cmd->add_option("--grid", grid_text, "n0=<n>,ratio=<x>");
    probe_cmd->add_option("--family", family_text,
                          "'default' or ';'-separated permutation specs")
        ->capture_default_str();
    probe_cmd->add_option("--tail-fraction", tail_fraction,
                          "fraction of checkpoints in the tail window")
        ->capture_default_str();
    add_common(probe_cmd, true);

    auto* part_cmd =
        app.add_subcommand("partition", "per-level density reports of a partition");
    part_cmd->add_option("--source", source_text,
                         "seed:<n>[,mode=derived|pairing] or column=evens")
        ->capture_default_str();
    nat levels = 6;
    part_cmd->add_option("--levels", levels, "pieces to build")->capture_default_str();
    part_cmd->add_option("--max-n", max_n, "largest checkpoint")
        ->capture_default_str();
    part_cmd->add_option("--grid", grid_text, "n0=<n>,ratio=<x>");
    part_cmd->add_option("--tail-fraction", tail_fraction, "tail window fraction")
        ->capture_default_str();
    add_common(part_cmd, true);

    auto* xr_cmd = app.add_subcommand("construct-xr",
                                      "build X_r from a real and a column source");
    xr_cmd->add_option("--r", r_text, "real: p/q, 0.ddd or seed:<n>")
        ->capture_default_str();
    xr_cmd->add_option("--source", source_text,
                       "seed:<n>[,mode=derived|pairing] or column=evens")
        ->capture_default_str();
    nat xr_prefix = 0;
    xr_cmd->add_option("--prefix", xr_prefix,
                       "list members below this bound instead of reporting density");
    xr_cmd->add_option("--max-n", max_n, "largest checkpoint")->capture_default_str();
    xr_cmd->add_option("--grid", grid_text, "n0=<n>,ratio=<x>");
    xr_cmd->add_option("--tail-fraction", tail_fraction, "tail window fraction")
        ->capture_default_str();
    add_common(xr_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(eval_cmd))
            return cmd_eval(common, expr_text, prefix_n);
        if (app.got_subcommand(density_cmd))
            return cmd_density(common, expr_text, max_n, grid_text, estimator,
                               principal_k, tail_fraction);
        if (app.got_subcommand(ident_cmd))
            return cmd_identities(common, suite, trials, seed, ident_prefix);
        if (app.got_subcommand(probe_cmd))
            return cmd_probe(common, expr_text, max_n, grid_text, family_text,
                             tail_fraction);
        if (app.got_subcommand(part_cmd))
            return cmd_partition(common, source_text, levels, max_n, grid_text,
                                 tail_fraction);
        if (app.got_subcommand(xr_cmd))
            return cmd_construct_xr(common, r_text, source_text, xr_prefix, max_n,
                                    grid_text, tail_fraction);
    } catch (const dsl::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const budget_error& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return 3;
    } catch (const evaluation_error& e) {
        std::cerr << "evaluation failed: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
