#include <gtest/gtest.h>

#include <cmath>

#include "fbvp/kernel.hpp"

using namespace fbvp;

namespace {

constexpr KernelOrder kOrders[] = {KernelOrder::Zero, KernelOrder::First, KernelOrder::Second,
                                   KernelOrder::Third, KernelOrder::ThirdStar};

} // namespace

TEST(Kernel, VanishesAtLeftBoundary) { EXPECT_EQ(eval_kernel(KernelOrder::Zero, 0.0, 0.7), 0.0); }

TEST(Kernel, InteriorValue) {
    // s^2 (1-t)^2 (3t - s - 2ts) / 6 at (1/2, 1/4): (1/16)(1/4)(1)/6 = 1/384
    EXPECT_NEAR(eval_kernel(KernelOrder::Zero, 0.5, 0.25), 1.0 / 384.0, 1e-17);
}

TEST(Kernel, StarredSeamIsMeanOfOneSidedLimits) {
    EXPECT_NEAR(eval_kernel(KernelOrder::ThirdStar, 0.5, 0.5), 0.0, 1e-16);
    for (double t : {0.1, 0.33, 0.5, 0.9}) {
        const double left = eval_kernel(KernelOrder::Third, t, std::nextafter(t, 0.0));
        const double right = eval_kernel(KernelOrder::Third, t, std::nextafter(t, 1.0));
        EXPECT_NEAR(eval_kernel(KernelOrder::ThirdStar, t, t), 0.5 * (left + right), 1e-12) << t;
    }
}

TEST(Kernel, ThirdDerivativeUpperBranch) {
    EXPECT_NEAR(eval_kernel(KernelOrder::Third, 0.5, 0.75), -0.15625, 1e-15);
    // one-sided finite differences of G_2 in t, staying on the t < s side
    const double h = 1e-5;
    const double fd = (eval_kernel(KernelOrder::Second, 0.5, 0.75) -
                       eval_kernel(KernelOrder::Second, 0.5 - h, 0.75)) / h;
    EXPECT_NEAR(fd, -0.15625, 1e-9);
}

TEST(Kernel, ThirdAtSeamIsLeftLimit) {
    EXPECT_DOUBLE_EQ(eval_kernel(KernelOrder::Third, 0.4, 0.4), 0.4 * 0.4 * (3 - 0.8));
}

TEST(Kernel, Constants) {
    EXPECT_DOUBLE_EQ(kernel_constant(0), 1.0 / 384.0);
    EXPECT_NEAR(kernel_constant(0), 0.00260416667, 1e-11);
    EXPECT_DOUBLE_EQ(kernel_constant(1), 1.0 / (72.0 * std::sqrt(3.0)));
    EXPECT_DOUBLE_EQ(kernel_constant(2), 1.0 / 12.0);
    EXPECT_DOUBLE_EQ(kernel_constant(3), 0.5);
    EXPECT_THROW(kernel_constant(4), DomainError);
}

TEST(Kernel, DomainErrors) {
    EXPECT_THROW(eval_kernel(KernelOrder::Zero, 1.1, 0.5), DomainError);
    EXPECT_THROW(eval_kernel(KernelOrder::First, 0.5, -0.01), DomainError);
    EXPECT_THROW(integral_abs_kernel(0, 2.0, 100), DomainError);
    EXPECT_THROW(integral_abs_kernel(0, 0.5, 1), DomainError);
    // rounding-level excursions are clamped
    EXPECT_NO_THROW(eval_kernel(KernelOrder::Zero, 1.0 + 1e-15, 0.5));
}

TEST(Kernel, IntegralAbsExamples) {
    for (std::size_t n : {2u, 10u, 1000u}) EXPECT_EQ(integral_abs_kernel(0, 0.0, n), 0.0);
    const double i0 = integral_abs_kernel(0, 0.5, 2000);
    EXPECT_LE(i0, 1.0 / 384 + 1e-6);
    EXPECT_GE(i0, 1.0 / 384 - 1e-4);
    EXPECT_LE(integral_abs_kernel(3, 0.5, 2000), 0.5 + 1e-6);
}

TEST(Kernel, IntegralAbsConvergesUnderRefinement) {
    const double t = 0.37;
    const double ref = integral_abs_kernel(0, t, 200000);
    double prev_err = 1.0;
    for (std::size_t n : {7u, 15u, 31u, 63u}) {
        const double err = std::abs(integral_abs_kernel(0, t, n) - ref);
        EXPECT_LT(err, prev_err);
        prev_err = err;
    }
}

// Invariants -------------------------------------------------------------

TEST(KernelInvariants, Symmetry) {
    for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= 100; ++j) {
            const double t = i / 100.0, s = j / 100.0;
            ASSERT_NEAR(eval_kernel(KernelOrder::Zero, t, s), eval_kernel(KernelOrder::Zero, s, t), 1e-14)
                << t << "," << s;
        }
    }
}

TEST(KernelInvariants, BoundaryAnnihilation) {
    for (int j = 0; j <= 100; ++j) {
        const double s = j / 100.0;
        EXPECT_EQ(eval_kernel(KernelOrder::Zero, 0.0, s), 0.0);
        EXPECT_NEAR(eval_kernel(KernelOrder::Zero, 1.0, s), 0.0, 1e-14);
        EXPECT_NEAR(eval_kernel(KernelOrder::First, 0.0, s), 0.0, 1e-14);
        EXPECT_NEAR(eval_kernel(KernelOrder::First, 1.0, s), 0.0, 1e-14);
    }
}

TEST(KernelInvariants, CentralDifferencesMatchNextOrder) {
    const double h = 1e-4;
    for (double s : {0.1, 0.35, 0.6, 0.85}) {
        for (int i = 1; i < 50; ++i) {
            const double t = i / 50.0;
            if (std::abs(t - s) < 3 * h) continue;
            for (int k = 0; k < 2; ++k) {
                const double fd = (eval_kernel(kernel_order(k), t + h, s) -
                                   eval_kernel(kernel_order(k), t - h, s)) / (2 * h);
                EXPECT_NEAR(fd, eval_kernel(kernel_order(k + 1), t, s), 1e-7) << k << " " << t << " " << s;
            }
        }
    }
}

TEST(KernelInvariants, OneSidedDifferencesOfSecondMatchThirdBranches) {
    // G_2 is piecewise linear in t on each side of the seam, so one-sided
    // differences are exact up to rounding.
    const double h = 1e-6;
    for (double s : {0.2, 0.5, 0.7}) {
        for (int i = 1; i < 20; ++i) {
            const double t = i / 20.0;
            if (std::abs(t - s) < 2 * h) continue;
            const double fd = t < s ? (eval_kernel(KernelOrder::Second, t, s) -
                                       eval_kernel(KernelOrder::Second, t - h, s)) / h
                                    : (eval_kernel(KernelOrder::Second, t + h, s) -
                                       eval_kernel(KernelOrder::Second, t, s)) / h;
            EXPECT_NEAR(fd, eval_kernel(KernelOrder::Third, t, s), 1e-8) << t << " " << s;
        }
    }
}

TEST(KernelInvariants, UnitJumpOfThirdDerivative) {
    for (int i = 1; i < 100; ++i) {
        const double t = i / 100.0;
        const double below = eval_kernel(KernelOrder::Third, t, t);  // s -> t-0 branch
        const double above = eval_kernel(KernelOrder::Third, t, std::nextafter(t, 2.0));
        EXPECT_NEAR(below - above, 1.0, 1e-12) << t;
        EXPECT_NEAR(eval_kernel(KernelOrder::ThirdStar, t, t), 0.5 * (below + above), 1e-12);
    }
}

TEST(KernelInvariants, IntegralBoundsHoldForAllOrders) {
    const std::size_t n_quad = 4000;
    for (int order = 0; order < 4; ++order) {
        double worst = 0.0;
        for (int i = 0; i <= 200; ++i) worst = std::max(worst, integral_abs_kernel(order, i / 200.0, n_quad));
        const double quad_tol = 1e-6 * std::max(1.0, kernel_constant(order));
        EXPECT_LE(worst, kernel_constant(order) + quad_tol) << "order " << order;
        // and nearly attained
        EXPECT_GE(worst, 0.9 * kernel_constant(order)) << "order " << order;
    }
}

TEST(KernelInvariants, OrdersAreTotalOnUnitSquare) {
    for (KernelOrder k : kOrders) {
        for (int i = 0; i <= 10; ++i) {
            for (int j = 0; j <= 10; ++j) EXPECT_TRUE(std::isfinite(eval_kernel(k, i / 10.0, j / 10.0)));
        }
    }
}
