#include "transflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace transflow::numerics {

double integrate(const ScalarFn& f, double a, double b, double rel_tol, unsigned max_depth) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, rel_tol, max_depth);
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [&f](double x) { return f(x); }, a, b, max_depth, rel_tol, &err);
}

double integrate_piecewise(const ScalarFn& f, double a, double b,
                           std::initializer_list<double> breaks, double rel_tol) {
    const double sign = a <= b ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    std::vector<double> pts{lo};
    for (double c : breaks)
        if (c > lo && c < hi) pts.push_back(c);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate(f, pts[i], pts[i + 1], rel_tol);
    return sign * total;
}

double invert_monotone(const ScalarFn& f, double target, double lo, double hi,
                       const ScalarFn& fprime, double guess) {
    if (!(lo <= hi)) std::swap(lo, hi);
    if (f(lo) >= target) return lo;
    if (f(hi) <= target) return hi;
    // invariant: f(lo) < target <= f(hi); Newton steps are taken only inside the bracket
    double x = (guess > lo && guess < hi) ? guess : lo + 0.5 * (hi - lo);
    for (int it = 0; it < 400; ++it) {
        const double fx = f(x) - target;
        if (fx == 0.0) return x;
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
        if (!(hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) ||
            hi - lo < std::numeric_limits<double>::min())
            break;
        double next = lo + 0.5 * (hi - lo);
        if (fprime) {
            const double d = fprime(x);
            if (std::isfinite(d) && d > 0.0) {
                const double step = fx / d;
                const double cand = x - step;
                if (cand > lo && cand < hi) {
                    next = cand;
                    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) return cand;
                }
            }
        }
        if (next <= lo || next >= hi) break;
        x = next;
    }
    return x;
}

}  // namespace transflow::numerics
