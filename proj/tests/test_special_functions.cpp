#include <cmath>

#include <gtest/gtest.h>

#include "kernelcur/error.hpp"
#include "kernelcur/special_functions.hpp"
#include "support/oracles.hpp"

using kernelcur::special::incomplete_beta;
using kernelcur::special::student_t_two_sided;

TEST(IncompleteBeta, ClosedForms) {
    // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 - (1-x)^b.
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
        EXPECT_NEAR(incomplete_beta(1, 1, x), x, 1e-14);
        EXPECT_NEAR(incomplete_beta(3.5, 1, x), std::pow(x, 3.5), 1e-13);
        EXPECT_NEAR(incomplete_beta(1, 2.5, x), 1 - std::pow(1 - x, 2.5), 1e-13);
    }
}

TEST(IncompleteBeta, Symmetry) {
    for (double a : {0.5, 2.0, 7.3})
        for (double b : {0.5, 1.5, 12.0})
            for (double x : {0.05, 0.3, 0.8})
                EXPECT_NEAR(incomplete_beta(a, b, x), 1 - incomplete_beta(b, a, 1 - x), 1e-12);
}

TEST(StudentT, KnownValues) {
    // dof = 1 is Cauchy: P(|T| >= t) = 1 - 2 atan(t) / pi.
    for (double t : {0.0, 0.5, 1.0, 3.0, 40.0}) {
        EXPECT_NEAR(student_t_two_sided(t, 1), 1 - 2 * std::atan(t) / M_PI, 1e-12);
    }
    // dof = 2: P(|T| >= t) = 1 - t / sqrt(2 + t^2).
    for (double t : {0.2, 1.0, 4.0}) {
        EXPECT_NEAR(student_t_two_sided(t, 2), 1 - t / std::sqrt(2 + t * t), 1e-12);
    }
    EXPECT_EQ(student_t_two_sided(INFINITY, 5), 0.0);
    EXPECT_EQ(student_t_two_sided(0.0, 5), 1.0);
}

TEST(StudentT, MatchesIntegratedDensity) {
    for (double dof : {1.0, 3.0, 8.0, 28.0, 150.0}) {
        for (double t : {0.1, 0.9, 2.0, 3.7, 6.0}) {
            EXPECT_NEAR(student_t_two_sided(t, dof), oracle::t_two_sided(t, dof), 1e-9)
                << "t=" << t << " dof=" << dof;
        }
    }
}

TEST(StudentT, SymmetricInSign) {
    EXPECT_DOUBLE_EQ(student_t_two_sided(-2.5, 7), student_t_two_sided(2.5, 7));
}
