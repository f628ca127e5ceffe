#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fbvp/error.hpp"
#include "fbvp/expr.hpp"
#include "fbvp/grid.hpp"
#include "fbvp/hermite.hpp"

namespace fbvp {

/// f(t, u, ubar, y, ybar, v, vbar, z, zbar), arguments in Var order.
using RhsFunction = std::function<double(const Arguments&)>;

/// A map of [0,1] (delays, exact solutions).
using ScalarFunction = std::function<double(double)>;

/// Bound M on |f| over D_M and Lipschitz coefficients L0..L7 in
/// (u, ubar, y, ybar, v, vbar, z, zbar).
struct AnalysisData {
    double M = 0.0;
    std::array<double, 8> L{};
    /// Contraction factor as printed by the source of the data, if it differs
    /// from what the L values give.
    std::optional<double> reported_q;
    std::string note;
};

/// Closed-form solution and its derivatives. Entries beyond the second are
/// optional; they are only needed for residual checks.
struct ExactSolution {
    std::array<ScalarFunction, 4> derivatives;

    double u(double t) const { return derivatives[0](t); }
    double du(double t) const { return derivatives[1](t); }
    bool has_derivative(int order) const { return static_cast<bool>(derivatives[order]); }
};

/// u'''' = f(t, U(t)) on (0,1) with Hermite boundary data, where U holds u
/// and its first three derivatives, each at t and at the delayed argument
/// phi_m(t).
struct Problem {
    std::string name;
    std::string description;
    RhsFunction f;
    /// Which arguments f actually reads, in Var order.
    std::array<bool, kVarCount> depends{};
    std::array<ScalarFunction, 4> phi;
    BoundaryData boundary;
    std::optional<ExactSolution> exact;
    std::optional<AnalysisData> analysis;
    /// Source text of f when it came from an expression.
    std::string f_source;
};

struct DelayViolation {
    int delay;        // m in phi_m
    std::size_t node; // grid index i
    double t;
    double value;     // phi_m(t_i)
};

/// Every (m, i) with phi_m(t_i) outside [0,1].
inline std::vector<DelayViolation> validate_delays(const Problem& p, const Grid& grid) {
    std::vector<DelayViolation> out;
    for (int m = 0; m < 4; ++m) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid.node(i);
            const double x = p.phi[m](t);
            if (!(x >= 0.0 && x <= 1.0)) out.push_back({m, i, t, x});
        }
    }
    return out;
}

/// Max deviation of a declared exact solution from the boundary data.
inline double boundary_mismatch(const ExactSolution& ex, const BoundaryData& bd) {
    return std::max({std::abs(ex.u(0.0) - bd.a), std::abs(ex.u(1.0) - bd.b),
                     std::abs(ex.du(0.0) - bd.c), std::abs(ex.du(1.0) - bd.d)});
}

inline constexpr double kBoundaryConsistencyTol = 1e-10;

namespace detail {

inline ScalarFunction time_function(const Expr& e) {
    return [e](double t) { return e.evaluate(EvalContext::time(t)); };
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline Expr parse_field(const std::string& field, const std::string& text) {
    try {
        return Expr::parse(text);
    } catch (const ParseError& err) {
        throw err.with_context("field '" + field + "': ");
    }
}

inline double constant_field(const std::string& field, const std::string& text) {
    const Expr e = parse_field(field, text);
    if (!e.free_variables().empty()) {
        throw SchemaError("field '" + field + "' must be a constant expression", field);
    }
    return e.evaluate(EvalContext{});
}

inline Expr time_field(const std::string& field, const std::string& text) {
    Expr e = parse_field(field, text);
    for (const auto& v : e.free_variables()) {
        if (v != "t") {
            throw SchemaError("field '" + field + "' may only use variable t, found '" + v + "'", field);
        }
    }
    return e;
}

} // namespace detail

inline const std::vector<std::string>& config_fields() {
    static const std::vector<std::string> fields = {
        "name", "f",  "phi0", "phi1", "phi2", "phi3", "a",  "b",  "c",  "d",  "exact_u",
        "exact_du", "M", "L0", "L1", "L2", "L3", "L4", "L5", "L6", "L7"};
    return fields;
}

/// Parse a problem from `key = value` lines; `#` starts a comment.
///
/// Required: name, f, a, b, c, d. Delays phi0..phi3 default to "t".
/// exact_u and exact_du come as a pair; M enables L0..L7 (default 0).
inline Problem load_config(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string stripped = detail::trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw SchemaError("line " + std::to_string(line_no) + ": expected 'key = value'", "");
        }
        const std::string key = detail::trim(std::string_view(stripped).substr(0, eq));
        const std::string value = detail::trim(std::string_view(stripped).substr(eq + 1));
        const auto& fields = config_fields();
        if (std::find(fields.begin(), fields.end(), key) == fields.end()) {
            throw SchemaError("unknown field '" + key + "' on line " + std::to_string(line_no), key);
        }
        if (!kv.emplace(key, value).second) {
            throw SchemaError("duplicate field '" + key + "' on line " + std::to_string(line_no), key);
        }
        if (value.empty()) throw SchemaError("field '" + key + "' has no value", key);
    }

    for (const char* required : {"name", "f", "a", "b", "c", "d"}) {
        if (!kv.count(required)) {
            throw SchemaError(std::string("missing required field '") + required + "'", required);
        }
    }

    Problem p;
    p.name = kv["name"];
    p.f_source = kv["f"];
    const Expr f = detail::parse_field("f", p.f_source);
    p.f = [f](const Arguments& args) { return f.evaluate(args); };
    p.depends = f.dependency_mask();

    for (int m = 0; m < 4; ++m) {
        const std::string key = "phi" + std::to_string(m);
        const auto it = kv.find(key);
        p.phi[m] = detail::time_function(detail::time_field(key, it == kv.end() ? "t" : it->second));
    }

    p.boundary = {detail::constant_field("a", kv["a"]), detail::constant_field("b", kv["b"]),
                  detail::constant_field("c", kv["c"]), detail::constant_field("d", kv["d"])};
    if (!p.boundary.finite()) throw ValidationError("boundary data must be finite");

    const bool has_u = kv.count("exact_u") > 0;
    const bool has_du = kv.count("exact_du") > 0;
    if (has_u != has_du) {
        const char* missing = has_u ? "exact_du" : "exact_u";
        throw SchemaError(std::string("exact_u and exact_du must be given together; missing '") +
                              missing + "'",
                          missing);
    }
    if (has_u) {
        ExactSolution ex;
        ex.derivatives[0] = detail::time_function(detail::time_field("exact_u", kv["exact_u"]));
        ex.derivatives[1] = detail::time_function(detail::time_field("exact_du", kv["exact_du"]));
        const double mismatch = boundary_mismatch(ex, p.boundary);
        if (!(mismatch <= kBoundaryConsistencyTol)) {
            throw ValidationError("exact solution violates the boundary data by " +
                                  std::to_string(mismatch));
        }
        p.exact = std::move(ex);
    }

    bool any_l = false;
    for (int i = 0; i < 8; ++i) any_l = any_l || kv.count("L" + std::to_string(i));
    if (kv.count("M")) {
        AnalysisData ad;
        ad.M = detail::constant_field("M", kv["M"]);
        if (!(ad.M > 0.0)) throw ValidationError("M must be positive");
        for (int i = 0; i < 8; ++i) {
            const std::string key = "L" + std::to_string(i);
            if (kv.count(key)) ad.L[i] = detail::constant_field(key, kv[key]);
            if (!(ad.L[i] >= 0.0)) throw ValidationError(key + " must be nonnegative");
        }
        p.analysis = ad;
    } else if (any_l) {
        throw SchemaError("Lipschitz coefficients given without 'M'", "M");
    }
    return p;
}

inline Problem load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

} // namespace fbvp
