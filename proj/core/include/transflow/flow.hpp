#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "transflow/measure.hpp"
#include "transflow/velocity.hpp"

namespace transflow {

/// Flow of an autonomous 1D field through its Abel primitive F (F' = 1/v,
/// F(T x) = F(x) + 1, F(alpha0) = 0 on every moving interval):
/// phi(t, x) = F^{-1}(F(x) + t).
class FlowMap {
public:
    explicit FlowMap(VelocityField1D field);

    /// F(x) on the moving interval containing x; nullopt on the fixed set.
    [[nodiscard]] std::optional<double> primitive(double x) const;
    /// Point of moving interval `interval` where F equals u.
    [[nodiscard]] double inverse_primitive(std::size_t interval, double u) const;

    /// phi(t, x). DomainError outside the hull or when the trajectory leaves the hull before time t.
    [[nodiscard]] double operator()(double t, double x) const;
    /// d phi(t, x) / dx.
    [[nodiscard]] double space_derivative(double t, double x) const;

    [[nodiscard]] const VelocityField1D& field() const noexcept { return field_; }

private:
    VelocityField1D field_;
};

/// phi(t, x) for a one-off evaluation.
[[nodiscard]] double flow(const VelocityField1D& field, double t, double x);

/// Fixed-step classical Runge-Kutta integration of x' = v(x); reference only.
[[nodiscard]] double integrate_explicit(const VelocityField1D& field, double t, double x, std::size_t steps);

/// phi(t, .)#m0 tabulated on n + 1 nodes of the image of the window of m0.
[[nodiscard]] Measure1D push_measure(const FlowMap& flow, const Measure1D& m0, double t, std::size_t n = 4096);
[[nodiscard]] Measure1D push_measure(const VelocityField1D& field, const Measure1D& m0, double t,
                                     std::size_t n = 4096);

struct ResidualSummary {
    double max = 0.0;
    double mean = 0.0;
    std::size_t samples = 0;
    std::size_t excluded = 0;  ///< samples in truncation zones or straddling intervals; Abel also skips the fixed set
};

struct OsgoodRow {
    std::size_t interval = 0;
    double fixed_point = 0.0;
    std::vector<double> partial;  ///< integral of 1/|v| over the first m orbit intervals, m = 1..
};

struct VerifyOptions {
    std::size_t n = 4096;             ///< grid for the pushed measure
    std::size_t samples = 2000;       ///< residual samples
    std::size_t pairs = 10000;        ///< monotonicity and semigroup pairs
    std::size_t osgood_steps = 20;
    std::uint64_t rng_seed = 20240601;
    double tol_w1 = 5e-3;
    double tol_julia = 1e-8;
    double tol_abel = 1e-8;
    double tol_semigroup_rel = 1e-6;  ///< relative to the hull width
};

struct TransportReport {
    static constexpr int schema_version = 1;
    std::size_t n = 0;
    double w1 = 0.0;
    double l1 = 0.0;
    ResidualSummary julia;
    ResidualSummary abel;
    double semigroup = 0.0;
    std::size_t monotonicity_violations = 0;
    std::vector<OsgoodRow> osgood;
    std::vector<TruncationZone> zones;
    std::vector<FieldWarning> warnings;
    std::size_t moving_intervals = 0;
    std::size_t fixed_components = 0;
    VerifyOptions options;

    [[nodiscard]] bool w1_ok() const noexcept { return w1 <= options.tol_w1; }
    [[nodiscard]] bool julia_ok() const noexcept { return julia.max <= options.tol_julia; }
    [[nodiscard]] bool abel_ok() const noexcept { return abel.max <= options.tol_abel; }
    [[nodiscard]] bool semigroup_ok(double width) const noexcept {
        return semigroup <= options.tol_semigroup_rel * width;
    }
    [[nodiscard]] bool passed() const noexcept;
    double hull_width = 0.0;

    [[nodiscard]] std::string to_json() const;
};

[[nodiscard]] TransportReport verify_transport(const VelocityField1D& field, const Measure1D& m0,
                                               const Measure1D& m1, const VerifyOptions& opts = {});

/// CSV with columns x0,t,phi.
void write_trajectories(std::ostream& out, const FlowMap& flow, const std::vector<double>& x0,
                        const std::vector<double>& times);

}  // namespace transflow
