#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "transflow/measure.hpp"
#include "transflow/quadrature.hpp"

namespace transflow {

/// Nondecreasing transport map T between two 1D measures (or an explicitly
/// given strictly increasing C^1 map) with derivative and inverse.
class MonotoneMap {
public:
    /// T = quantile(target) o cdf(source), evaluated through survival functions
    /// in the upper half so that both tails keep full relative precision.
    static MonotoneMap between(const Measure1D& source, const Measure1D& target);

    /// Explicit map on `domain`. Without `inverse` the inverse is found by bisection.
    static MonotoneMap explicit_map(Interval domain, numerics::ScalarFn forward,
                                    numerics::ScalarFn derivative,
                                    numerics::ScalarFn inverse = {});

    static MonotoneMap identity(Interval domain);

    [[nodiscard]] double operator()(double x) const { return forward(x); }
    [[nodiscard]] double forward(double x) const;
    /// T'(x); DomainError outside the domain.
    [[nodiscard]] double derivative(double x) const;
    /// Centered difference of derivative(); used for C^1 seed matching.
    [[nodiscard]] double second_derivative(double x) const;
    [[nodiscard]] double inverse(double y) const;

    /// Finite interval T is evaluated on (window of the source measure).
    [[nodiscard]] Interval domain() const noexcept { return domain_; }
    /// T(domain).
    [[nodiscard]] Interval range() const noexcept { return range_; }
    /// Conv(domain U range): where the velocity field lives.
    [[nodiscard]] Interval hull() const noexcept { return transflow::hull(domain_, range_); }

    [[nodiscard]] const std::optional<Measure1D>& source() const noexcept { return source_; }
    [[nodiscard]] const std::optional<Measure1D>& target() const noexcept { return target_; }

private:
    MonotoneMap() = default;

    double fd_derivative(double x) const;

    Interval domain_{};
    Interval range_{};
    std::optional<Measure1D> source_;
    std::optional<Measure1D> target_;
    numerics::ScalarFn forward_;
    numerics::ScalarFn derivative_;
    numerics::ScalarFn inverse_;
};

[[nodiscard]] MonotoneMap compute_monotone_map(const Measure1D& m0, const Measure1D& m1);

[[nodiscard]] double map_derivative(const MonotoneMap& t, double x);

/// Image measure T#m. Throws InvalidMapError if T' <= 0 somewhere on the window of m.
[[nodiscard]] Measure1D pushforward_by_map(const Measure1D& m, const MonotoneMap& t);

/// A maximal open interval of the hull on which T(x) - x has constant sign.
struct MovingInterval {
    double lo = 0.0;
    double hi = 0.0;
    int direction = 0;      ///< +1 when T(x) > x, -1 when T(x) < x
    bool lo_fixed = false;  ///< lower end is a fixed point of T (else a support end)
    bool hi_fixed = false;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(double x) const noexcept { return x > lo && x < hi; }
    [[nodiscard]] bool contains_closed(double x) const noexcept { return x >= lo && x <= hi; }
};

struct FixedPointPartition {
    Interval hull{};
    double tol = 0.0;
    std::vector<Interval> fixed_set;  ///< maximal fixed components, possibly degenerate
    std::vector<double> boundary;     ///< the discrete set dS, sorted
    std::vector<MovingInterval> moving;

    /// Index of the moving interval containing x in its interior, if any.
    [[nodiscard]] std::optional<std::size_t> locate(double x) const;
    [[nodiscard]] bool is_fixed(double x) const;
};

struct FixedPointOptions {
    double tol_fp = 0.0;           ///< 0 selects 1e-10 * domain width
    std::size_t grid = 1u << 14;   ///< uniform samples before refinement
    int max_refine_depth = 20;
};

[[nodiscard]] FixedPointPartition find_fixed_points(const MonotoneMap& t,
                                                    const FixedPointOptions& opts = {});

struct OrbitStop {
    double delta = 0.0;                 ///< 0 selects 1e-12 * interval width
    std::size_t i_max = 1'000'000;
    std::size_t max_steps = static_cast<std::size_t>(-1);
    bool backward = false;              ///< iterate T^{-1} instead of T
};

struct OrbitGrid {
    std::vector<double> anchors;  ///< alpha_0, alpha_1 = T(alpha_0), ...
    Interval seed_interval{};     ///< [alpha_0, alpha_1] ordered lo < hi
    bool truncated = false;       ///< stopped by delta or i_max near an accumulation point
    std::string stop_reason;
};

/// Iterates x0 under T (or T^{-1}) inside `interval` until the orbit leaves the
/// map's domain, the step drops below delta, or a step budget is exhausted.
/// Throws DegenerateOrbitError if x0 is a fixed point.
[[nodiscard]] OrbitGrid build_orbit_grid(const MonotoneMap& t, const MovingInterval& interval,
                                         double x0, const OrbitStop& stop = {});

}  // namespace transflow
