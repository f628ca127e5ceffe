#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "fbvp/error.hpp"
#include "fbvp/problem.hpp"

namespace fbvp {

namespace detail {

inline ScalarFunction identity_delay() {
    return [](double t) { return t; };
}

inline std::array<bool, kVarCount> mask(std::initializer_list<Var> vars) {
    std::array<bool, kVarCount> m{};
    for (Var v : vars) m[static_cast<std::size_t>(v)] = true;
    return m;
}

inline ExactSolution exponential_solution() {
    ExactSolution ex;
    for (auto& d : ex.derivatives) d = [](double t) { return std::exp(t); };
    return ex;
}

inline Problem example1() {
    Problem p;
    p.name = "example1";
    p.description = "u'''' = 22/(t+1)^5 + (u^2+u^3) u(t/2)/(t+1)^2, exact u = 1/(t+1)";
    p.f = [](const Arguments& x) {
        const double t = x[0], u = x[1], ub = x[2];
        const double s = t + 1;
        return 22 / std::pow(s, 5) + (u * u + std::pow(u, 3)) * ub / (s * s);
    };
    p.f_source = "22/(t+1)^5 + (u^2+u^3)*ubar/(t+1)^2";
    p.depends = mask({Var::t, Var::u, Var::ubar});
    p.phi = {[](double t) { return t / 2; }, identity_delay(), identity_delay(), identity_delay()};
    p.boundary = {1.0, 0.5, -1.0, -0.25};
    ExactSolution ex;
    ex.derivatives = {[](double t) { return 1 / (t + 1); },
                      [](double t) { return -1 / std::pow(t + 1, 2); },
                      [](double t) { return 2 / std::pow(t + 1, 3); },
                      [](double t) { return -6 / std::pow(t + 1, 4); }};
    p.exact = ex;
    p.analysis = AnalysisData{25.0, {6.0, 2.4, 0, 0, 0, 0, 0, 0}, 0.0219, {}};
    return p;
}

inline Problem example2() {
    Problem p;
    p.name = "example2";
    p.description = "u'''' = exp(-t) u^(3/2) u(t/2), exact u = e^t";
    p.f = [](const Arguments& x) {
        const double t = x[0], u = x[1], ub = x[2];
        if (u < 0) throw MathDomainError("negative base with non-integer exponent", "u^(3/2)");
        return std::exp(-t) * std::pow(u, 1.5) * ub;
    };
    p.f_source = "exp(-t) * u^(3/2) * ubar";
    p.depends = mask({Var::t, Var::u, Var::ubar});
    p.phi = {[](double t) { return t / 2; }, identity_delay(), identity_delay(), identity_delay()};
    p.boundary = {1.0, std::numbers::e, 1.0, std::numbers::e};
    p.exact = exponential_solution();
    p.analysis = AnalysisData{15.0, {7.0, 5.0, 0, 0, 0, 0, 0, 0}, 0.0313, {}};
    return p;
}

inline Problem example3() {
    Problem p;
    p.name = "example3";
    p.description = "u'''' = e^t + (u(t/2)^2 u'''(t/2) - u' u''(t/2) + u u''' - u''^2)/9, exact u = e^t";
    p.f = [](const Arguments& x) {
        const double t = x[0], u = x[1], ub = x[2], y = x[3], v = x[5], vb = x[6], z = x[7],
                     zb = x[8];
        return std::exp(t) + (ub * ub * zb - y * vb + u * z - v * v) / 9;
    };
    p.f_source = "exp(t) + (ubar^2*zbar - y*vbar + u*z - v^2)/9";
    p.depends = mask({Var::t, Var::u, Var::ubar, Var::y, Var::v, Var::vbar, Var::z, Var::zbar});
    const auto half = [](double t) { return t / 2; };
    p.phi = {half, identity_delay(), half, half};
    p.boundary = {1.0, std::numbers::e, 1.0, std::numbers::e};
    p.exact = exponential_solution();
    p.analysis = AnalysisData{20.0,
                              {1.30, 7.20, 0.47, 0.0, 0.94, 0.32, 0.31, 0.86},
                              0.6446,
                              "the listed L values give a larger q than the reported 0.6446"};
    return p;
}

inline Problem example4() {
    Problem p;
    p.name = "example4";
    p.description = "u'''' = t^2 - u/4 + u(t/2)^2/4 + u' u'(t^2) + (u''+u''(t^2/2)) u/8 "
                    "+ (sin u''' + cos u'''(t^2/3))/4";
    p.f = [](const Arguments& x) {
        const double t = x[0], u = x[1], ub = x[2], y = x[3], yb = x[4], v = x[5], vb = x[6],
                     z = x[7], zb = x[8];
        return t * t - u / 4 + ub * ub / 4 + y * yb + (v + vb) * u / 8 +
               (std::sin(z) + std::cos(zb)) / 4;
    };
    p.f_source = "t^2 - u/4 + ubar^2/4 + y*ybar + (v+vbar)*u/8 + (sin(z)+cos(zbar))/4";
    p.depends = mask({Var::t, Var::u, Var::ubar, Var::y, Var::ybar, Var::v, Var::vbar, Var::z,
                      Var::zbar});
    p.phi = {[](double t) { return t / 2; }, [](double t) { return t * t; },
             [](double t) { return t * t / 2; }, [](double t) { return t * t / 3; }};
    p.boundary = {1.0, 19.0 / 6.0, 1.0, 3.5};
    p.analysis = AnalysisData{23.0, {1.48, 1.62, 3.7, 3.7, 0.41, 0.41, 0.25, 0.25}, 0.3857, {}};
    return p;
}

inline Problem example5() {
    Problem p;
    p.name = "example5";
    p.description = "u'''' = u''(t/4)^4, exact u = e^t";
    p.f = [](const Arguments& x) {
        return std::pow(x[6], 4);
    };
    p.f_source = "vbar^4";
    p.depends = mask({Var::vbar});
    p.phi = {identity_delay(), identity_delay(), [](double t) { return t / 4; }, identity_delay()};
    p.boundary = {1.0, std::numbers::e, 1.0, std::numbers::e};
    p.exact = exponential_solution();
    // No M bounds vbar^4 on its own envelope; M = 20 is a probe, and L5 is the
    // Lipschitz constant of vbar^4 on that envelope, 4 (||g''|| + M/12)^3.
    const double vbar_bound = 8 - 2 * std::numbers::e + 20.0 / 12.0;
    p.analysis = AnalysisData{
        20.0, {0, 0, 0, 0, 0, 4 * vbar_bound * vbar_bound * vbar_bound, 0, 0}, std::nullopt,
        "probe value M = 20: no M bounds vbar^4 on its envelope"};
    return p;
}

inline Problem example6() {
    Problem p;
    p.name = "example6";
    p.description = "u'''' = u^2 + u''(t^2/2)^4, solution unknown";
    p.f = [](const Arguments& x) {
        return x[1] * x[1] + std::pow(x[6], 4);
    };
    p.f_source = "u^2 + vbar^4";
    p.depends = mask({Var::u, Var::vbar});
    p.phi = {identity_delay(), identity_delay(), [](double t) { return t * t / 2; },
             identity_delay()};
    p.boundary = {1.0, 19.0 / 6.0, 1.0, 3.5};
    return p;
}

} // namespace detail

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"example1", "example2", "example3",
                                                   "example4", "example5", "example6"};
    return names;
}

inline bool is_builtin(std::string_view name) {
    for (const auto& n : builtin_names()) {
        if (n == name) return true;
    }
    return false;
}

/// The six worked examples, with hand-coded right-hand sides.
inline Problem builtin(std::string_view name) {
    if (name == "example1") return detail::example1();
    if (name == "example2") return detail::example2();
    if (name == "example3") return detail::example3();
    if (name == "example4") return detail::example4();
    if (name == "example5") return detail::example5();
    if (name == "example6") return detail::example6();
    std::string msg = "unknown built-in problem '" + std::string(name) + "'; valid names:";
    for (const auto& n : builtin_names()) msg += " " + n;
    throw UnknownProblem(msg);
}

} // namespace fbvp
