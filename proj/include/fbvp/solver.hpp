#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbvp/error.hpp"
#include "fbvp/grid.hpp"
#include "fbvp/hermite.hpp"
#include "fbvp/kernel.hpp"
#include "fbvp/problem.hpp"

namespace fbvp {

/// Position of a reconstructed quantity in f's argument list, minus t.
enum class Slot : int { u = 0, ubar, y, ybar, v, vbar, z, zbar };

inline constexpr std::size_t kSlotCount = 8;

/// Derivative order carried by a slot (u -> 0, y -> 1, v -> 2, z -> 3).
inline constexpr int slot_order(std::size_t slot) { return static_cast<int>(slot / 2); }
inline constexpr bool slot_delayed(std::size_t slot) { return slot % 2 == 1; }

/// The nine grid functions of one iteration.
struct GridFunctionSet {
    std::vector<double> psi;
    std::array<std::vector<double>, kSlotCount> values;

    const std::vector<double>& operator[](Slot s) const { return values[static_cast<std::size_t>(s)]; }
    std::vector<double>& operator[](Slot s) { return values[static_cast<std::size_t>(s)]; }

    const std::vector<double>& u() const { return (*this)[Slot::u]; }
    const std::vector<double>& y() const { return (*this)[Slot::y]; }
    const std::vector<double>& v() const { return (*this)[Slot::v]; }
    const std::vector<double>& z() const { return (*this)[Slot::z]; }

    bool finite() const {
        auto ok = [](const std::vector<double>& x) {
            return std::all_of(x.begin(), x.end(), [](double d) { return std::isfinite(d); });
        };
        return ok(psi) && std::all_of(values.begin(), values.end(), ok);
    }
};

struct SolveOptions {
    std::size_t N = 100;
    /// Stop once the max-norm of successive U iterates is at most tol.
    double tol = 1e-14;
    /// Cap on the number of sweeps.
    std::size_t max_iter = 100;
};

struct SolutionErrors {
    double error;  // max_i |U_K(t_i) - u(t_i)|
    double error1; // max_i |Y_K(t_i) - u'(t_i)|
};

struct Solution {
    Grid grid{1};
    /// Grid functions of the last sweep; final.psi is the Psi they were built from.
    GridFunctionSet final;
    /// Number of sweeps performed (Psi -> U computations).
    std::size_t K = 0;
    /// history[k] = ||U_k - U_{k-1}||, with history[0] = ||U_0||.
    std::vector<double> history;
    /// psi_history[k] = ||Psi_{k+1} - Psi_k||; psi_history[0] is d.
    std::vector<double> psi_history;
    bool converged = false;
    std::optional<SolutionErrors> errors;

    double final_difference() const { return history.empty() ? 0.0 : history.back(); }
    double d() const { return psi_history.empty() ? 0.0 : psi_history.front(); }
};

inline double max_norm_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("max_norm_diff: length mismatch " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_norm(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

/// Trapezoid weights rho_j: 1/2 at both ends, 1 inside.
inline std::vector<double> quadrature_weights(const Grid& grid) {
    if (grid.intervals() < 2) throw ValidationError("quadrature needs N >= 2");
    std::vector<double> rho(grid.size(), 1.0);
    rho.front() = 0.5;
    rho.back() = 0.5;
    return rho;
}

/// sum_j h rho_j G_order(x, t_j) psi_j, with G_3* standing in for order 3.
inline double apply_kernel_row(int order, double x, std::span<const double> psi, const Grid& grid,
                               std::span<const double> rho) {
    const KernelOrder k = quadrature_order(order);
    const double h = grid.step();
    double sum = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        sum += (h * rho[j]) * eval_kernel(k, x, grid.node(j)) * psi[j];
    }
    return sum;
}

/// psi_0(t_i) = f(t_i, 0, ..., 0)
inline std::vector<double> init_psi(const Problem& p, const Grid& grid) {
    std::vector<double> psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Arguments args{};
        args[0] = grid.node(i);
        try {
            psi[i] = p.f(args);
        } catch (const MathDomainError& e) {
            throw MathDomainError(std::string(e.what()) + " at t_" + std::to_string(i) + " = " +
                                      std::to_string(args[0]),
                                  e.expression());
        }
    }
    return psi;
}

namespace detail {

inline std::string describe_arguments(const Arguments& a) {
    std::string s = "(";
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (k) s += ", ";
        s += std::string(kVarNames[k]) + "=" + std::to_string(a[k]);
    }
    return s + ")";
}

/// phi_m(t_i) for every delay, or DelayRangeError on the first one outside [0,1].
inline std::array<std::vector<double>, 4> delayed_points(const Problem& p, const Grid& grid) {
    if (const auto bad = validate_delays(p, grid); !bad.empty()) {
        const auto& v = bad.front();
        throw DelayRangeError("phi" + std::to_string(v.delay) + "(t_" + std::to_string(v.node) +
                                  " = " + std::to_string(v.t) + ") = " + std::to_string(v.value) +
                                  " lies outside [0,1]",
                              v.delay, v.node);
    }
    std::array<std::vector<double>, 4> xi;
    for (int m = 0; m < 4; ++m) {
        xi[m].resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) xi[m][i] = p.phi[m](grid.node(i));
    }
    return xi;
}

} // namespace detail

/// psi_{k+1}(t_i) = f(t_i, U_k(t_i), ..., Zbar_k(t_i))
inline std::vector<double> update_psi(const Problem& p, const GridFunctionSet& gfs, const Grid& grid) {
    std::vector<double> next(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Arguments args{};
        args[0] = grid.node(i);
        for (std::size_t s = 0; s < kSlotCount; ++s) args[s + 1] = gfs.values[s][i];
        try {
            next[i] = p.f(args);
        } catch (const MathDomainError& e) {
            throw MathDomainError(std::string(e.what()) + " at node " + std::to_string(i) + " " +
                                      detail::describe_arguments(args),
                                  e.expression());
        }
    }
    return next;
}

/// The linear part of one iteration, Psi -> (U, Ubar, ..., Zbar), with every
/// kernel row h rho_j G(x_i, t_j) precomputed for the evaluation points
/// x_i in {t_i} and {phi_m(t_i)}.
class SweepOperator {
public:
    SweepOperator(const Problem& p, const Grid& grid)
        : grid_(grid), g_(hermite_interpolant(p.boundary)) {
        const auto rho = quadrature_weights(grid);
        const auto xi = detail::delayed_points(p, grid);
        const auto nodes = grid.nodes();
        const std::size_t n = grid.size();

        for (std::size_t s = 0; s < kSlotCount; ++s) {
            const int order = slot_order(s);
            const auto& points = slot_delayed(s) ? xi[order] : nodes;
            const CubicPoly gd = derivative(g_, order);
            base_[s].resize(n);
            for (std::size_t i = 0; i < n; ++i) base_[s][i] = gd(points[i]);

            // a delay that is the identity on the grid reuses the undelayed rows
            if (slot_delayed(s) && points == nodes) {
                rows_[s] = rows_[s - 1];
                continue;
            }
            auto m = std::make_shared<std::vector<double>>(n * n);
            const KernelOrder k = quadrature_order(order);
            const double h = grid.step();
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    (*m)[i * n + j] = (h * rho[j]) * eval_kernel(k, points[i], nodes[j]);
                }
            }
            rows_[s] = std::move(m);
        }
    }

    const Grid& grid() const noexcept { return grid_; }
    const CubicPoly& boundary_interpolant() const noexcept { return g_; }

    GridFunctionSet apply(std::span<const double> psi) const {
        const std::size_t n = grid_.size();
        if (psi.size() != n) throw ValidationError("psi has the wrong length");
        GridFunctionSet out;
        out.psi.assign(psi.begin(), psi.end());
        for (std::size_t s = 0; s < kSlotCount; ++s) {
            const auto& m = *rows_[s];
            auto& dst = out.values[s];
            dst.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double* row = m.data() + i * n;
                double sum = 0.0;
                for (std::size_t j = 0; j < n; ++j) sum += row[j] * psi[j];
                dst[i] = base_[s][i] + sum;
            }
        }
        return out;
    }

private:
    Grid grid_;
    CubicPoly g_;
    std::array<std::vector<double>, kSlotCount> base_;
    std::array<std::shared_ptr<const std::vector<double>>, kSlotCount> rows_;
};

/// One sweep without the row cache: each entry is g^(order)(x_i) plus
/// apply_kernel_row at x_i. Produces the same bits as SweepOperator::apply.
inline GridFunctionSet sweep(const Problem& p, std::span<const double> psi, const Grid& grid,
                             std::span<const double> rho, const CubicPoly& g) {
    const auto xi = detail::delayed_points(p, grid);
    GridFunctionSet out;
    out.psi.assign(psi.begin(), psi.end());
    for (std::size_t s = 0; s < kSlotCount; ++s) {
        const int order = slot_order(s);
        const CubicPoly gd = derivative(g, order);
        auto& dst = out.values[s];
        dst.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = slot_delayed(s) ? xi[order][i] : grid.node(i);
            dst[i] = gd(x) + apply_kernel_row(order, x, psi, grid, rho);
        }
    }
    return out;
}

/// Discrete fixed-point iteration Psi_k -> U_k -> Psi_{k+1} until
/// ||U_k - U_{k-1}|| <= tol or max_iter sweeps.
inline Solution solve(const Problem& p, const SolveOptions& opts) {
    if (!(opts.tol > 0.0)) throw ValidationError("tol must be positive");
    if (opts.max_iter < 1) throw ValidationError("max_iter must be at least 1");
    const Grid grid(opts.N);
    const SweepOperator op(p, grid);

    Solution sol;
    sol.grid = grid;
    std::vector<double> psi = init_psi(p, grid);
    std::vector<double> previous_u;
    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        GridFunctionSet gfs = op.apply(psi);
        if (!gfs.finite()) {
            throw NonFiniteError("non-finite grid function in sweep " + std::to_string(k), k);
        }
        const double diff =
            previous_u.empty() ? max_norm(gfs.u()) : max_norm_diff(gfs.u(), previous_u);
        sol.history.push_back(diff);
        previous_u = gfs.u();
        sol.final = std::move(gfs);
        sol.K = k + 1;
        if (k > 0 && diff <= opts.tol) {
            sol.converged = true;
            break;
        }
        if (k + 1 == opts.max_iter) break;
        std::vector<double> next = update_psi(p, sol.final, grid);
        if (!std::all_of(next.begin(), next.end(), [](double x) { return std::isfinite(x); })) {
            throw NonFiniteError("non-finite right-hand side after sweep " + std::to_string(k), k);
        }
        sol.psi_history.push_back(max_norm_diff(next, psi));
        psi = std::move(next);
    }

    if (p.exact) {
        SolutionErrors e{0.0, 0.0};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid.node(i);
            e.error = std::max(e.error, std::abs(sol.final.u()[i] - p.exact->u(t)));
            e.error1 = std::max(e.error1, std::abs(sol.final.y()[i] - p.exact->du(t)));
        }
        sol.errors = e;
    }
    return sol;
}

/// u^(order)(x) at any x in [0,1] from the converged Psi (Nystrom interpolation).
inline double reconstruct(const Problem& p, const Solution& sol, int order, double x) {
    const CubicPoly g = derivative(hermite_interpolant(p.boundary), order);
    const auto rho = quadrature_weights(sol.grid);
    return g(x) + apply_kernel_row(order, x, sol.final.psi, sol.grid, rho);
}

} // namespace fbvp
