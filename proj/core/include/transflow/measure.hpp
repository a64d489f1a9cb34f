#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "transflow/quadrature.hpp"

namespace transflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi]; either end may be infinite.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    [[nodiscard]] bool bounded() const noexcept {
        return lo > -kInf && hi < kInf;
    }
    [[nodiscard]] double mid() const noexcept { return 0.5 * (lo + hi); }
};

/// Lower/upper density bounds over a compact piece of the support.
struct DensityBounds {
    double lower = 0.0;
    double upper = 0.0;
};

namespace detail {

/// Model behind a Measure1D. Implementations are immutable.
class MeasureModel {
public:
    virtual ~MeasureModel() = default;

    [[nodiscard]] virtual std::string kind() const = 0;
    [[nodiscard]] virtual Interval support() const = 0;
    /// Finite window carrying all but ~tail_eps of the mass (equals support when bounded).
    [[nodiscard]] virtual Interval window() const = 0;
    [[nodiscard]] virtual double density(double x) const = 0;
    [[nodiscard]] virtual double cdf(double x) const = 0;
    /// mu((x, +inf)); accurate in the upper tail.
    [[nodiscard]] virtual double ccdf(double x) const { return 1.0 - cdf(x); }
    [[nodiscard]] virtual double quantile(double p) const = 0;
    /// Solves ccdf(y) = q.
    [[nodiscard]] virtual double quantile_upper(double q) const { return quantile(1.0 - q); }
};

}  // namespace detail

/// One-dimensional absolutely continuous probability measure with a continuous
/// density that is positive on the interior of a single support interval.
///
/// Cheap to copy: the model is shared and never mutated after construction, so
/// instances can be used from several threads.
class Measure1D {
public:
    static constexpr double kDefaultTailEps = 1e-10;

    static Measure1D uniform(double a, double b);
    static Measure1D gaussian(double mean, double sigma, double tail_eps = kDefaultTailEps);

    /// Image of `base` under y = x / alpha + beta, i.e. density alpha * f(alpha * (y - beta)).
    static Measure1D affine_image(const Measure1D& base, double alpha, double beta);

    /// Piecewise-linear density through (x[i], density[i]). Mass must already be 1.
    static Measure1D piecewise_linear(std::vector<double> x, std::vector<double> density);

    /// Sampled grid with linear interpolation, rescaled to unit mass.
    static Measure1D grid(std::vector<double> x, std::vector<double> density);

    /// Arbitrary continuous density on a bounded support; the CDF is tabulated
    /// at construction with adaptive quadrature. With `normalize` the density is
    /// rescaled to unit mass, otherwise the mass must be 1 within 1e-8.
    static Measure1D from_density(numerics::ScalarFn density, Interval support,
                                  bool normalize = false, std::size_t cells = 1024);

    /// Image of `base` under a strictly increasing C^1 map given with its
    /// derivative and inverse.
    static Measure1D pushforward(const Measure1D& base, numerics::ScalarFn map,
                                 numerics::ScalarFn derivative, numerics::ScalarFn inverse);

    [[nodiscard]] std::string kind() const { return model_->kind(); }
    [[nodiscard]] Interval support() const { return model_->support(); }
    [[nodiscard]] Interval window() const { return model_->window(); }

    [[nodiscard]] double density(double x) const;
    [[nodiscard]] double cdf(double x) const;
    [[nodiscard]] double ccdf(double x) const;
    /// Throws DomainError for p outside [0, 1].
    [[nodiscard]] double quantile(double p) const;
    [[nodiscard]] double quantile_upper(double q) const;

    /// Sampled min/max of the density over K (clipped to the window), 1025 points.
    [[nodiscard]] DensityBounds density_bounds(Interval k) const;

    [[nodiscard]] const detail::MeasureModel& model() const noexcept { return *model_; }

    explicit Measure1D(std::shared_ptr<const detail::MeasureModel> model);

private:
    std::shared_ptr<const detail::MeasureModel> model_;
};

/// W1 via the 1D identity W1 = integral of |F0 - F1|.
[[nodiscard]] double wasserstein1(const Measure1D& m0, const Measure1D& m1);

/// Integral of |density0 - density1|.
[[nodiscard]] double l1_distance(const Measure1D& m0, const Measure1D& m1);

/// Smallest interval containing both windows.
[[nodiscard]] Interval hull(const Interval& a, const Interval& b) noexcept;

}  // namespace transflow
