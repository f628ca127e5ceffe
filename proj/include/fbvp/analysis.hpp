#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fbvp/error.hpp"
#include "fbvp/hermite.hpp"
#include "fbvp/kernel.hpp"
#include "fbvp/problem.hpp"

namespace fbvp {

/// q = (L0+L1) M0 + (L2+L3) M1 + (L4+L5) M2 + (L6+L7) M3
inline double contraction_factor(const std::array<double, 8>& L) {
    double q = 0.0;
    for (int i = 0; i < 8; ++i) {
        if (!(L[i] >= 0.0)) throw ValidationError("Lipschitz coefficient L" + std::to_string(i) + " is negative");
    }
    for (int i = 0; i < 4; ++i) q += (L[2 * i] + L[2 * i + 1]) * kernel_constant(i);
    return q;
}

/// Bounds ||g^(i)|| + M_i M on |u^(i)| for any solution with ||psi|| <= M.
inline std::array<double, 4> domain_envelope(const std::array<double, 4>& g_norms, double M) {
    if (!(M >= 0.0)) throw ValidationError("M must be nonnegative");
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = g_norms[i] + kernel_constant(i) * M;
    return out;
}

/// Outcome of sampling |f| over the box D_M.
struct BoundCheck {
    double max_abs = 0.0;
    bool pass = false;
    Arguments argmax{};
    /// lattice points per active dimension actually used
    std::size_t density = 0;
    std::size_t samples = 0;
    std::size_t active_dimensions = 0;
    /// lattice points where f raised a math-domain error
    std::size_t undefined = 0;
    std::optional<Arguments> first_undefined;
    std::string first_undefined_message;
};

/// Upper limit on lattice size; high-dimensional f get a coarser per-axis density.
inline constexpr std::size_t kMaxLatticePoints = 2'000'000;

namespace detail {

/// Per-axis density so that density^dims stays within the budget.
inline std::size_t lattice_density(std::size_t requested, std::size_t dims, std::size_t budget) {
    std::size_t d = std::max<std::size_t>(requested, 2);
    auto total = [&](std::size_t n) {
        double p = 1.0;
        for (std::size_t k = 0; k < dims; ++k) p *= static_cast<double>(n);
        return p;
    };
    while (d > 2 && total(d) > static_cast<double>(budget)) --d;
    return d;
}

/// Axes of the sampling lattice: t (when f reads it) and every variable f reads,
/// each variable spanning +-envelope of its derivative order.
struct LatticeAxes {
    std::vector<std::size_t> var;  // index into Arguments
    std::vector<double> lo, hi;
};

inline LatticeAxes lattice_axes(const Problem& p, const std::array<double, 4>& envelope) {
    LatticeAxes ax;
    for (std::size_t k = 0; k < kVarCount; ++k) {
        if (!p.depends[k]) continue;
        ax.var.push_back(k);
        if (k == 0) {
            ax.lo.push_back(0.0);
            ax.hi.push_back(1.0);
        } else {
            const double b = envelope[(k - 1) / 2];
            ax.lo.push_back(-b);
            ax.hi.push_back(b);
        }
    }
    return ax;
}

/// Calls visit(args) for every lattice point.
template <typename Visit>
void for_each_lattice_point(const LatticeAxes& ax, std::size_t density, Visit&& visit) {
    const std::size_t dims = ax.var.size();
    std::vector<std::size_t> idx(dims, 0);
    auto coord = [&](std::size_t a, std::size_t i) {
        if (i + 1 == density) return ax.hi[a];
        return ax.lo[a] + (ax.hi[a] - ax.lo[a]) * static_cast<double>(i) / static_cast<double>(density - 1);
    };
    for (;;) {
        Arguments args{};
        for (std::size_t a = 0; a < dims; ++a) args[ax.var[a]] = coord(a, idx[a]);
        visit(args);
        std::size_t a = 0;
        while (a < dims && ++idx[a] == density) idx[a++] = 0;
        if (a == dims) return;
    }
}

} // namespace detail

/// Sample |f| on a product lattice over D_M and compare the max against M.
///
/// A heuristic audit, not a proof: the box is sampled, not bounded. Variables
/// f does not read are held at 0. Points where f is undefined (e.g. a
/// fractional power of a negative value) are counted and skipped.
inline BoundCheck sampled_bound_check(const Problem& p, const std::array<double, 4>& envelope,
                                      double M, std::size_t density) {
    if (density < 2) throw ValidationError("sampling density must be at least 2");
    const auto ax = detail::lattice_axes(p, envelope);
    BoundCheck out;
    out.active_dimensions = ax.var.size();
    out.density = detail::lattice_density(density, ax.var.size(), kMaxLatticePoints);
    bool have_value = false;
    detail::for_each_lattice_point(ax, out.density, [&](const Arguments& args) {
        ++out.samples;
        double value = 0.0;
        try {
            value = std::abs(p.f(args));
        } catch (const MathDomainError& e) {
            if (out.undefined++ == 0) {
                out.first_undefined = args;
                out.first_undefined_message = e.what();
            }
            return;
        }
        if (!have_value || !(value <= out.max_abs)) {
            out.max_abs = value;
            out.argmax = args;
            have_value = true;
        }
    });
    out.pass = have_value && out.max_abs <= M;
    return out;
}

/// Finite-difference estimate of L0..L7 over the D_M lattice. Heuristic only:
/// the true Lipschitz constant may be larger between samples.
inline std::array<double, 8> estimate_lipschitz(const Problem& p, const std::array<double, 4>& envelope,
                                                std::size_t density) {
    const auto ax = detail::lattice_axes(p, envelope);
    const std::size_t d = detail::lattice_density(density, ax.var.size(), kMaxLatticePoints / 20);
    std::array<double, 8> L{};
    detail::for_each_lattice_point(ax, d, [&](const Arguments& args) {
        for (std::size_t k = 1; k < kVarCount; ++k) {
            if (!p.depends[k]) continue;
            const double step = 1e-6 * std::max(1.0, envelope[(k - 1) / 2]);
            Arguments lo = args, hi = args;
            lo[k] -= step;
            hi[k] += step;
            try {
                const double slope = std::abs(p.f(hi) - p.f(lo)) / (2 * step);
                if (std::isfinite(slope)) L[k - 1] = std::max(L[k - 1], slope);
            } catch (const MathDomainError&) {
            }
        }
    });
    return L;
}

/// Per-iteration error bounds M_i p_k d with p_k = q^k / (1 - q).
struct AprioriSchedule {
    double q = 0.0;
    double d = 0.0;
    /// p[k-1] = p_k, k = 1..K
    std::vector<double> p;
    /// bounds[i][k-1] = M_i p_k d
    std::array<std::vector<double>, 4> bounds;
};

inline AprioriSchedule apriori_schedule(double q, double d, std::size_t K) {
    if (!(q >= 0.0 && q < 1.0)) throw ValidationError("a-priori schedule needs 0 <= q < 1");
    if (!(d >= 0.0)) throw ValidationError("d must be nonnegative");
    AprioriSchedule s;
    s.q = q;
    s.d = d;
    s.p.reserve(K);
    for (std::size_t k = 1; k <= K; ++k) s.p.push_back(std::pow(q, static_cast<double>(k)) / (1 - q));
    for (int i = 0; i < 4; ++i) {
        for (double pk : s.p) s.bounds[i].push_back(kernel_constant(i) * pk * d);
    }
    return s;
}

/// Least-squares slope of log(error) against log(h), h = 1/N.
inline double empirical_order(const std::vector<std::pair<std::size_t, double>>& errors) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, e] : errors) {
        if (n == 0) throw ValidationError("grid size must be positive");
        if (!(e > 0.0)) throw ValidationError("errors must be positive to fit an order");
        pts.emplace_back(std::log(1.0 / static_cast<double>(n)), std::log(e));
    }
    std::vector<std::size_t> ns;
    for (const auto& pr : errors) ns.push_back(pr.first);
    std::sort(ns.begin(), ns.end());
    if (std::unique(ns.begin(), ns.end()) - ns.begin() < 2) {
        throw ValidationError("empirical order needs at least two distinct grid sizes");
    }
    double mx = 0, my = 0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0, sxx = 0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxy / sxx;
}

enum class Verdict { Satisfied, Violated, Unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Unknown: return "unknown";
    }
    return "?";
}

/// Audit of the sufficient conditions for existence, uniqueness and
/// convergence: bounded f on D_M and q < 1.
struct ConditionsReport {
    std::array<double, 4> g_norms{};
    bool has_analysis = false;
    double M = 0.0;
    std::array<double, 8> L{};
    double q = 0.0;
    std::optional<double> reported_q;
    std::array<double, 4> envelope{};
    BoundCheck bound_check;
    Verdict verdict = Verdict::Unknown;
    std::string note;
};

inline constexpr std::size_t kDefaultDensity = 33;

inline ConditionsReport conditions_report(const Problem& p, std::size_t density = kDefaultDensity) {
    ConditionsReport r;
    r.g_norms = derivative_norms(hermite_interpolant(p.boundary));
    if (!p.analysis) return r;
    const AnalysisData& ad = *p.analysis;
    r.has_analysis = true;
    r.M = ad.M;
    r.L = ad.L;
    r.q = contraction_factor(ad.L);
    r.reported_q = ad.reported_q;
    r.note = ad.note;
    r.envelope = domain_envelope(r.g_norms, ad.M);
    r.bound_check = sampled_bound_check(p, r.envelope, ad.M, density);
    r.verdict = (r.q < 1.0 && r.bound_check.pass) ? Verdict::Satisfied : Verdict::Violated;
    return r;
}

/// One grid size of a total-error check.
struct TotalErrorRun {
    std::size_t N;
    std::size_t K;
    double d;
    double error;
};

struct TotalErrorFit {
    /// discretization constant C, fitted on the coarsest grid
    double C = 0.0;
    /// per run: M_0 p_K d + C h^2
    std::vector<double> bound;
    std::vector<bool> holds;
    bool all_hold = false;
};

/// Check error <= M_0 p_K d + C h^2 with C fitted once, on the coarsest grid,
/// and then held fixed for the finer ones.
inline TotalErrorFit fit_total_error_bound(double q, const std::vector<TotalErrorRun>& runs) {
    if (runs.empty()) throw ValidationError("no runs to fit");
    if (!(q >= 0.0 && q < 1.0)) throw ValidationError("total-error bound needs 0 <= q < 1");
    auto iterative = [&](const TotalErrorRun& r) {
        return kernel_constant(0) * std::pow(q, static_cast<double>(r.K)) / (1 - q) * r.d;
    };
    const auto coarsest = std::min_element(runs.begin(), runs.end(),
                                           [](const auto& a, const auto& b) { return a.N < b.N; });
    const double hc = 1.0 / static_cast<double>(coarsest->N);
    TotalErrorFit fit;
    fit.C = std::max(0.0, (coarsest->error - iterative(*coarsest)) / (hc * hc));
    fit.all_hold = true;
    for (const auto& r : runs) {
        const double h = 1.0 / static_cast<double>(r.N);
        const double b = iterative(r) + fit.C * h * h;
        fit.bound.push_back(b);
        fit.holds.push_back(r.error <= b);
        fit.all_hold = fit.all_hold && r.error <= b;
    }
    return fit;
}

} // namespace fbvp
