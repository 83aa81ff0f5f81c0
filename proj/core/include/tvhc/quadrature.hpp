#pragma once

#include <functional>
#include <vector>

namespace tvhc::quad {

struct Tolerance {
    double abs = 1e-10;
    double rel = 1e-12;
};

/// Adaptive Gauss-Kronrod integral of g over the finite interval [a, b].
/// Throws QuadratureError when the error estimate exceeds
/// max(tol.abs, tol.rel * integral of |g|).
double integrate(const std::function<double(double)>& g, double a, double b,
                 Tolerance tol = {});

/// E[g(X)] for X ~ Exp(theta), i.e. the integral of g(s) theta e^{-theta s}
/// over [0, inf). `breakpoints` are points in s where g is not smooth; the
/// integration range is split there. The range is truncated 40/theta past the
/// last breakpoint and continued in further chunks of that width until a
/// chunk no longer contributes at double precision, which is sufficient for
/// integrands of polynomial growth.
double expect_exponential(const std::function<double(double)>& g, double theta,
                          std::vector<double> breakpoints = {}, Tolerance tol = {});

}  // namespace tvhc::quad
