#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "fbvp/error.hpp"

namespace fbvp {

/// u(0) = a, u(1) = b, u'(0) = c, u'(1) = d.
struct BoundaryData {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    bool finite() const {
        return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
    }
};

/// c0 + c1 t + c2 t^2 + c3 t^3
struct CubicPoly {
    std::array<double, 4> c{};

    double operator()(double t) const { return c[0] + t * (c[1] + t * (c[2] + t * c[3])); }

    friend bool operator==(const CubicPoly&, const CubicPoly&) = default;
};

/// The cubic matching the Hermite boundary data at both ends.
inline CubicPoly hermite_interpolant(const BoundaryData& bd) {
    if (!bd.finite()) throw ValidationError("boundary data must be finite");
    return CubicPoly{{bd.a, bd.c, 3 * (bd.b - bd.a) - 2 * bd.c - bd.d, 2 * (bd.a - bd.b) + bd.c + bd.d}};
}

inline CubicPoly derivative(const CubicPoly& p, int order = 1) {
    if (order < 0 || order > 3) throw DomainError("derivative order must be 0..3");
    CubicPoly r = p;
    for (int k = 0; k < order; ++k) {
        r = CubicPoly{{r.c[1], 2 * r.c[2], 3 * r.c[3], 0.0}};
    }
    return r;
}

/// max |p(t)| over [0,1], from the endpoints and the real critical points.
inline double sup_norm(const CubicPoly& p) {
    double best = std::max(std::abs(p(0.0)), std::abs(p(1.0)));
    auto consider = [&](double t) {
        if (t > 0.0 && t < 1.0) best = std::max(best, std::abs(p(t)));
    };
    // p'(t) = qa t^2 + qb t + qc
    const double qa = 3 * p.c[3];
    const double qb = 2 * p.c[2];
    const double qc = p.c[1];
    if (qa == 0.0) {
        if (qb != 0.0) consider(-qc / qb);
        return best;
    }
    const double disc = qb * qb - 4 * qa * qc;
    if (disc < 0.0) return best;
    // stable quadratic roots
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (qb + std::copysign(sq, qb));
    if (qq != 0.0) {
        consider(qq / qa);
        consider(qc / qq);
    } else {
        consider(0.0);
    }
    return best;
}

/// (||g||, ||g'||, ||g''||, ||g'''||)
inline std::array<double, 4> derivative_norms(const CubicPoly& g) {
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = sup_norm(derivative(g, i));
    return out;
}

} // namespace fbvp
