#include "kernelcur/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernelcur/error.hpp"

namespace kernelcur::special {

namespace {

constexpr int kMaxIterations = 20000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b) / (x^a y^b / (a B(a, b))), Lentz's method.
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEpsilon) return h;
    }
    throw DomainError("incomplete_beta: continued fraction did not converge");
}

// I_x(a, b) with y = 1 - x supplied separately so callers can avoid cancellation.
double incomplete_beta_xy(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(y);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: a and b must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: x must lie in [0, 1]");
    return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double student_t_two_sided(double t, double dof) {
    if (!(dof > 0.0)) throw DomainError("student_t_two_sided: dof must be > 0");
    if (std::isnan(t)) throw DomainError("student_t_two_sided: t is NaN");
    if (std::isinf(t)) return 0.0;
    const double t2 = t * t;
    const double denom = dof + t2;
    // P(|T| >= |t|) = I_{dof/(dof+t^2)}(dof/2, 1/2)
    const double p = incomplete_beta_xy(0.5 * dof, 0.5, dof / denom, t2 / denom);
    return std::min(1.0, std::max(0.0, p));
}

}  // namespace kernelcur::special
