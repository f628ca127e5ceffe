#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "fbvp/error.hpp"

namespace fbvp {

/// Which t-derivative of the Green function to evaluate.
///
/// G(t,s) solves u'''' = psi with u(0)=u(1)=u'(0)=u'(1)=0. Orders 0..2 are
/// continuous across s = t; order 3 jumps by one there. ThirdStar replaces
/// the seam value of the third derivative with the mean of its one-sided
/// limits, which is what trapezoidal quadrature across the seam needs.
enum class KernelOrder { Zero = 0, First = 1, Second = 2, Third = 3, ThirdStar = 4 };

inline constexpr KernelOrder kernel_order(int order) {
    switch (order) {
    case 0: return KernelOrder::Zero;
    case 1: return KernelOrder::First;
    case 2: return KernelOrder::Second;
    case 3: return KernelOrder::Third;
    default: throw DomainError("kernel order must be 0..3, got " + std::to_string(order));
    }
}

/// The order used in quadrature rows: the starred kernel replaces order 3.
inline constexpr KernelOrder quadrature_order(int order) {
    return order == 3 ? KernelOrder::ThirdStar : kernel_order(order);
}

/// Tolerance for arguments that fall just outside [0,1] through rounding.
inline constexpr double kKernelDomainEps = 1e-12;

namespace detail {

inline double clamp_unit(double x, const char* name) {
    if (!(x >= -kKernelDomainEps && x <= 1.0 + kKernelDomainEps)) {
        throw DomainError(std::string("kernel argument ") + name + " = " + std::to_string(x) +
                          " outside [0,1]");
    }
    return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
}

} // namespace detail

/// Closed-form G, G_1, G_2, G_3 or G_3* at (t, s).
inline double eval_kernel(KernelOrder order, double t, double s) {
    t = detail::clamp_unit(t, "t");
    s = detail::clamp_unit(s, "s");
    const bool lower = s <= t;
    switch (order) {
    case KernelOrder::Zero:
        if (lower) return s * s * (1 - t) * (1 - t) * (3 * t - s - 2 * t * s) / 6;
        return t * t * (1 - s) * (1 - s) * (3 * s - t - 2 * t * s) / 6;
    case KernelOrder::First:
        if (lower) {
            return -(s * s * (2 * t - 2) * (s - 3 * t + 2 * s * t)) / 6 -
                   (s * s * (2 * s - 3) * (t - 1) * (t - 1)) / 6;
        }
        return -(t * t * (2 * s + 1) * (s - 1) * (s - 1)) / 6 -
               (t * (s - 1) * (s - 1) * (t - 3 * s + 2 * s * t)) / 3;
    case KernelOrder::Second:
        if (lower) {
            return -(s * s * (s - 3 * t + 2 * s * t)) / 3 - (s * s * (2 * s - 3) * (2 * t - 2)) / 3;
        }
        return -((s - 1) * (s - 1) * (t - 3 * s + 2 * s * t)) / 3 -
               (2 * t * (2 * s + 1) * (s - 1) * (s - 1)) / 3;
    case KernelOrder::Third:
        // at s == t this is the left limit (s -> t-0)
        if (lower) return s * s * (3 - 2 * s);
        return s * s * (3 - 2 * s) - 1;
    case KernelOrder::ThirdStar:
        if (s < t) return s * s * (3 - 2 * s);
        if (s == t) return t * t * (3 - 2 * t) - 0.5;
        return s * s * (3 - 2 * s) - 1;
    }
    throw DomainError("invalid kernel order");
}

/// Bounds M_i on the integral over s of |G_i(t,s)|, uniform in t.
inline double kernel_constant(int order) {
    switch (order) {
    case 0: return 1.0 / 384.0;
    case 1: return 1.0 / (72.0 * std::sqrt(3.0));
    case 2: return 1.0 / 12.0;
    case 3: return 0.5;
    default: throw DomainError("kernel order must be 0..3, got " + std::to_string(order));
    }
}

/// Composite trapezoidal approximation of the integral over s of |G_order(t,s)|
/// with n_quad subintervals. Order 3 integrates G_3*.
inline double integral_abs_kernel(int order, double t, std::size_t n_quad) {
    if (n_quad < 2) throw DomainError("n_quad must be at least 2");
    const KernelOrder k = quadrature_order(order);
    detail::clamp_unit(t, "t");
    const double h = 1.0 / static_cast<double>(n_quad);
    double sum = 0.5 * (std::abs(eval_kernel(k, t, 0.0)) + std::abs(eval_kernel(k, t, 1.0)));
    for (std::size_t j = 1; j < n_quad; ++j) {
        sum += std::abs(eval_kernel(k, t, static_cast<double>(j) * h));
    }
    return sum * h;
}

} // namespace fbvp
