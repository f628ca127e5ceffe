#pragma once

// Command-line front end: solve, convergence, check, list.
//
// Exit codes: 0 success (check: conditions satisfied), 1 solve failure or
// non-convergence, 2 usage or load error, 3 conditions violated, 4 no
// analysis data to check. On failure the last stderr line reads
// `error: <kind>: <message>`.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbvp/analysis.hpp"
#include "fbvp/problem.hpp"
#include "fbvp/registry.hpp"
#include "fbvp/solver.hpp"

namespace fbvp::cli {

enum ExitCode : int {
    kOk = 0,
    kSolveFailure = 1,
    kUsageOrLoad = 2,
    kViolated = 3,
    kUnknown = 4,
};

/// Five significant digits, as in the printed tables.
inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", x);
    return buf;
}

/// Full precision for CSV.
inline std::string full(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
    std::string one_line = message;
    for (char& c : one_line) {
        if (c == '\n') c = ' ';
    }
    err << "error: " << kind << ": " << one_line << "\n";
}

/// A built-in name or the path of a config file.
inline Problem load_source(const std::string& source) {
    if (is_builtin(source)) return builtin(source);
    if (!std::filesystem::exists(source)) {
        throw ValidationError("file not found: '" + source + "' (and not a built-in name)");
    }
    return load_config_file(source);
}

struct LoadResult {
    std::optional<Problem> problem;
    int code = kOk;
};

inline LoadResult try_load(const std::string& source, std::ostream& err) {
    try {
        return {load_source(source), kOk};
    } catch (const std::exception& e) {
        const bool missing = !is_builtin(source) && !std::filesystem::exists(source);
        report_error(err, missing ? "file-not-found" : "load", e.what());
        return {std::nullopt, kUsageOrLoad};
    }
}

struct SolveArgs {
    std::string source;
    SolveOptions options;
    std::string csv;
};

inline void write_solution_csv(std::ostream& os, const Solution& sol) {
    os << "t,U,Y,V,Z\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        os << full(sol.grid.node(i)) << ',' << full(sol.final.u()[i]) << ',' << full(sol.final.y()[i])
           << ',' << full(sol.final.v()[i]) << ',' << full(sol.final.z()[i]) << '\n';
    }
}

inline int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
    auto loaded = try_load(args.source, err);
    if (!loaded.problem) return loaded.code;
    const Problem& p = *loaded.problem;

    Solution sol;
    try {
        sol = solve(p, args.options);
    } catch (const std::exception& e) {
        report_error(err, "solve", e.what());
        return kSolveFailure;
    }

    out << "problem: " << p.name << "\n";
    out << "N: " << args.options.N << "\n";
    out << "K: " << sol.K << "\n";
    out << "converged: " << (sol.converged ? "yes" : "no") << "\n";
    out << "final difference: " << sci(sol.final_difference()) << "\n";
    if (sol.errors) {
        out << "Error: " << sci(sol.errors->error) << "\n";
        out << "Error1: " << sci(sol.errors->error1) << "\n";
    }

    if (!args.csv.empty()) {
        std::ofstream f(args.csv);
        if (!f) {
            report_error(err, "io", "cannot write '" + args.csv + "'");
            return kSolveFailure;
        }
        write_solution_csv(f, sol);
    }
    if (!sol.converged) {
        report_error(err, "not-converged",
                     "no convergence within " + std::to_string(args.options.max_iter) + " sweeps");
        return kSolveFailure;
    }
    return kOk;
}

/// One row of a convergence table.
struct RunRecord {
    std::size_t N = 0;
    double h2 = 0.0;
    std::size_t K = 0;
    bool converged = false;
    std::optional<double> error;
    std::optional<double> error1;
    /// empty on success
    std::string failure;
};

struct ConvergenceTable {
    std::string problem;
    std::vector<RunRecord> rows;
    std::optional<double> order;
    std::optional<double> order1;
};

/// Solve once per grid size, concurrently; rows come back in input order.
inline ConvergenceTable run_convergence(const Problem& p, const std::vector<std::size_t>& ns, double tol,
                                        std::size_t max_iter) {
    std::vector<std::future<RunRecord>> jobs;
    for (std::size_t n : ns) {
        jobs.push_back(std::async(std::launch::async, [&p, n, tol, max_iter] {
            RunRecord r;
            r.N = n;
            r.h2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
            try {
                const Solution sol = solve(p, SolveOptions{n, tol, max_iter});
                r.K = sol.K;
                r.converged = sol.converged;
                if (!sol.converged) r.failure = "not converged";
                if (sol.errors) {
                    r.error = sol.errors->error;
                    r.error1 = sol.errors->error1;
                }
            } catch (const std::exception& e) {
                r.failure = e.what();
            }
            return r;
        }));
    }
    ConvergenceTable table;
    table.problem = p.name;
    for (auto& j : jobs) table.rows.push_back(j.get());

    std::vector<std::pair<std::size_t, double>> e0, e1;
    for (const auto& r : table.rows) {
        if (!r.failure.empty() || !r.error) continue;
        if (*r.error > 0) e0.emplace_back(r.N, *r.error);
        if (*r.error1 > 0) e1.emplace_back(r.N, *r.error1);
    }
    try {
        if (e0.size() >= 2) table.order = empirical_order(e0);
        if (e1.size() >= 2) table.order1 = empirical_order(e1);
    } catch (const ValidationError&) {
    }
    return table;
}

inline void print_table(std::ostream& out, const ConvergenceTable& t) {
    out << "problem: " << t.problem << "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%6s  %-11s %4s  %-11s %-11s\n", "N", "h^2", "K", "Error", "Error1");
    out << line;
    for (const auto& r : t.rows) {
        if (!r.failure.empty() && r.failure != "not converged") {
            std::snprintf(line, sizeof line, "%6zu  %-11s failed: ", r.N, sci(r.h2).c_str());
            out << line << r.failure << "\n";
            continue;
        }
        std::snprintf(line, sizeof line, "%6zu  %-11s %4zu  %-11s %-11s%s\n", r.N, sci(r.h2).c_str(), r.K,
                      r.error ? sci(*r.error).c_str() : "-", r.error1 ? sci(*r.error1).c_str() : "-",
                      r.converged ? "" : "  (not converged)");
        out << line;
    }
    if (t.order) out << "empirical order (Error): " << sci(*t.order) << "\n";
    if (t.order1) out << "empirical order (Error1): " << sci(*t.order1) << "\n";
}

inline void write_table_csv(std::ostream& os, const ConvergenceTable& t) {
    os << "N,h2,K,converged,Error,Error1,failure\n";
    for (const auto& r : t.rows) {
        os << r.N << ',' << full(r.h2) << ',' << r.K << ',' << (r.converged ? 1 : 0) << ','
           << (r.error ? full(*r.error) : "") << ',' << (r.error1 ? full(*r.error1) : "") << ',';
        // keep the failure text in one column
        std::string f = r.failure;
        for (char& c : f) {
            if (c == ',' || c == '\n') c = ';';
        }
        os << f << '\n';
    }
}

struct ConvergenceArgs {
    std::string source;
    std::vector<std::size_t> ns;
    double tol = 1e-14;
    std::size_t max_iter = 100;
    std::string csv;
};

inline int cmd_convergence(const ConvergenceArgs& args, std::ostream& out, std::ostream& err) {
    if (args.ns.size() < 2) {
        report_error(err, "usage", "convergence needs at least two grid sizes in --n-list");
        return kUsageOrLoad;
    }
    for (std::size_t n : args.ns) {
        if (n < 2) {
            report_error(err, "usage", "grid sizes must be at least 2");
            return kUsageOrLoad;
        }
    }
    auto loaded = try_load(args.source, err);
    if (!loaded.problem) return loaded.code;

    const ConvergenceTable table = run_convergence(*loaded.problem, args.ns, args.tol, args.max_iter);
    print_table(out, table);
    if (!args.csv.empty()) {
        std::ofstream f(args.csv);
        if (!f) {
            report_error(err, "io", "cannot write '" + args.csv + "'");
            return kSolveFailure;
        }
        write_table_csv(f, table);
    }
    const bool any_ok = std::any_of(table.rows.begin(), table.rows.end(),
                                    [](const RunRecord& r) { return r.failure.empty(); });
    if (!any_ok) {
        report_error(err, "solve", "every grid size failed");
        return kSolveFailure;
    }
    return kOk;
}

inline void print_report(std::ostream& out, const std::string& name, const ConditionsReport& r) {
    out << "problem: " << name << "\n";
    out << "||g^(i)||, i=0..3: " << full(r.g_norms[0]) << ", " << full(r.g_norms[1]) << ", "
        << full(r.g_norms[2]) << ", " << full(r.g_norms[3]) << "\n";
    if (!r.has_analysis) {
        out << "analysis data: none\n";
        out << "verdict: " << to_string(r.verdict) << "\n";
        return;
    }
    out << "M: " << full(r.M) << "\n";
    out << "L:";
    for (double l : r.L) out << " " << full(l);
    out << "\n";
    out << "q: " << full(r.q) << "\n";
    if (r.reported_q) out << "q (reported): " << full(*r.reported_q) << "\n";
    out << "envelope ||g^(i)|| + M_i M, i=0..3: " << full(r.envelope[0]) << ", " << full(r.envelope[1])
        << ", " << full(r.envelope[2]) << ", " << full(r.envelope[3]) << "\n";
    const BoundCheck& b = r.bound_check;
    out << "bound check (sampled, heuristic): max|f| = " << full(b.max_abs) << " at (";
    for (std::size_t k = 0; k < kVarCount; ++k) out << (k ? ", " : "") << kVarNames[k] << "=" << full(b.argmax[k]);
    out << "), " << b.samples << " samples, density " << b.density << " over " << b.active_dimensions
        << " active dimensions: " << (b.pass ? "pass" : "fail") << "\n";
    if (b.undefined > 0) {
        out << "bound check skipped " << b.undefined << " points where f is undefined (first: "
            << b.first_undefined_message << ")\n";
    }
    if (!r.note.empty()) out << "note: " << r.note << "\n";
    out << "verdict: " << to_string(r.verdict) << "\n";
}

struct CheckArgs {
    std::string source;
    std::size_t density = kDefaultDensity;
};

inline int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
    if (args.density < 2) {
        report_error(err, "usage", "--density must be at least 2");
        return kUsageOrLoad;
    }
    auto loaded = try_load(args.source, err);
    if (!loaded.problem) return loaded.code;
    ConditionsReport r;
    try {
        r = conditions_report(*loaded.problem, args.density);
    } catch (const std::exception& e) {
        report_error(err, "check", e.what());
        return kSolveFailure;
    }
    print_report(out, loaded.problem->name, r);
    switch (r.verdict) {
    case Verdict::Satisfied: return kOk;
    case Verdict::Violated: return kViolated;
    case Verdict::Unknown: return kUnknown;
    }
    return kUnknown;
}

inline int cmd_list(std::ostream& out) {
    for (const auto& name : builtin_names()) {
        const Problem p = builtin(name);
        out << name << "  exact: " << (p.exact ? "yes" : "no")
            << "  analysis: " << (p.analysis ? "yes" : "none") << "  " << p.description << "\n";
    }
    return kOk;
}

/// Parse `args` (without the program name) and run the selected command.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fixed-point solver for fourth-order functional boundary value problems", "fbvp"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "solve one problem on one grid");
    solve_cmd->add_option("source", solve_args.source, "built-in name or config file")->required();
    solve_cmd->add_option("--n", solve_args.options.N, "number of grid intervals")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    solve_cmd->add_option("--tol", solve_args.options.tol, "stopping tolerance on ||U_k - U_{k-1}||")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--max-iter", solve_args.options.max_iter, "maximum number of sweeps")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--csv", solve_args.csv, "write t,U,Y,V,Z columns here");

    ConvergenceArgs conv_args;
    auto* conv_cmd = app.add_subcommand("convergence", "grid-refinement study");
    conv_cmd->add_option("source", conv_args.source, "built-in name or config file")->required();
    conv_cmd->add_option("--n-list", conv_args.ns, "grid sizes, comma separated")
        ->delimiter(',')
        ->required();
    conv_cmd->add_option("--tol", conv_args.tol, "stopping tolerance")->check(CLI::PositiveNumber);
    conv_cmd->add_option("--max-iter", conv_args.max_iter, "maximum number of sweeps")
        ->check(CLI::PositiveNumber);
    conv_cmd->add_option("--csv", conv_args.csv, "write the table here at full precision");

    CheckArgs check_args;
    auto* check_cmd = app.add_subcommand("check", "audit the sufficient conditions");
    check_cmd->add_option("source", check_args.source, "built-in name or config file")->required();
    check_cmd->add_option("--density", check_args.density, "lattice points per active dimension");

    auto* list_cmd = app.add_subcommand("list", "list built-in problems");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        std::ostringstream sink;
        app.exit(e, sink, sink);
        report_error(err, "usage", e.what());
        return kUsageOrLoad;
    }

    if (solve_cmd->parsed()) return cmd_solve(solve_args, out, err);
    if (conv_cmd->parsed()) return cmd_convergence(conv_args, out, err);
    if (check_cmd->parsed()) return cmd_check(check_args, out, err);
    if (list_cmd->parsed()) return cmd_list(out);
    return kUsageOrLoad;
}

} // namespace fbvp::cli
