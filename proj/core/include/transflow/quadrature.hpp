#pragma once

#include <functional>
#include <limits>

namespace transflow::numerics {

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (15-point) integral of f over [a, b]; a > b flips the sign.
/// Infinite limits are accepted.
double integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-13,
                 unsigned max_depth = 18);

/// Same as integrate() but splits [a, b] at the given interior breakpoints first.
double integrate_piecewise(const ScalarFn& f, double a, double b,
                           std::initializer_list<double> breaks, double rel_tol = 1e-13);

/// Solves f(x) = target for nondecreasing f on [lo, hi]: Newton steps with fprime
/// while they stay inside the shrinking bracket, bisection otherwise. Starts at
/// `guess` when it lies in the bracket. Values outside [f(lo), f(hi)] clamp to the ends.
double invert_monotone(const ScalarFn& f, double target, double lo, double hi,
                       const ScalarFn& fprime = {},
                       double guess = std::numeric_limits<double>::quiet_NaN());

}  // namespace transflow::numerics
