#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transflow/measure.hpp"
#include "transflow/monotone_map.hpp"

namespace transflow {

enum class SeedKind { constant, affine, hermite_ck };

[[nodiscard]] std::string to_string(SeedKind kind);
/// Parses "constant" | "affine" | "hermite_ck"; throws ParseError otherwise.
[[nodiscard]] SeedKind parse_seed_kind(const std::string& text);

/// Free data of v on the seed interval [alpha0, alpha1 = T(alpha0)].
///
/// values, by kind:
///   constant   {c}
///   affine     {} | {v(alpha0)} | {v(alpha0), v(alpha1)}
///   hermite_ck {} | {v(alpha0)} | {v(alpha0), v'(alpha0)}
/// Missing values default to v(alpha0) = direction * |T(alpha0) - alpha0| and the
/// secant slope. Only order_k in {0, 1} is supported for hermite_ck.
struct SeedSpec {
    SeedKind kind = SeedKind::affine;
    int order_k = 0;
    std::vector<double> values;
    std::optional<double> alpha0;
};

struct VelocityOptions {
    double tol_julia = 1e-8;
    double tol_time = 1e-6;
    double delta_orbit_rel = 1e-12;  ///< truncation step, relative to the interval width
    std::size_t i_max = 1'000'000;
    bool normalize_time = true;
    double indeterminate_tol = 1e-6;  ///< |T'(fp) - 1| below this marks a fixed point as indeterminate
    FixedPointOptions fixed_points{};
};

struct FieldWarning {
    std::string code;  ///< "indeterminate_fixed_point" | "truncation_zone"
    std::string message;
    double where = 0.0;
};

/// Closure of v next to a fixed end of a moving interval, where orbit steps
/// fall below delta_orbit or exceed i_max.
struct TruncationZone {
    double fixed_point = 0.0;
    double edge = 0.0;        ///< last resolved anchor; the zone is between edge and fixed_point
    double v_edge = 0.0;      ///< v at the edge (already time-scaled)
    double slope_at_fixed = 1.0;
    bool indeterminate = false;  ///< T'(fixed_point) == 1: closure is not verified
    std::size_t anchors = 0;
    long edge_steps = 0;  ///< edge = T^edge_steps(alpha0)

    [[nodiscard]] bool contains(double x) const noexcept {
        return (x - fixed_point) * (x - edge) < 0.0;
    }
};

/// Per moving interval data of a constructed field.
struct IntervalField {
    MovingInterval interval;
    SeedSpec seed;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    /// raw seed as a cubic in s = (x - alpha0) / (alpha1 - alpha0)
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double time_scale = 1.0;  ///< v = time_scale * raw
    double delta_orbit = 0.0;
    std::optional<TruncationZone> zone_lo;
    std::optional<TruncationZone> zone_hi;

    [[nodiscard]] double raw_seed(double x) const;
    [[nodiscard]] double raw_seed_derivative(double x) const;
    [[nodiscard]] bool affine() const noexcept { return c2 == 0.0 && c3 == 0.0; }
    /// Position along the direction of motion, 0 at alpha0, seed_length() at alpha1.
    [[nodiscard]] double along(double x) const noexcept {
        return interval.direction * (x - alpha0);
    }
    [[nodiscard]] double seed_length() const noexcept { return along(alpha1); }
};

/// Result of pulling a point back to the seed interval along its orbit:
/// x = T^steps(z), with v(x) = v(z) * factor.
struct Pullback {
    std::size_t interval = 0;
    long steps = 0;
    double z = 0.0;
    double factor = 1.0;
    bool truncated = false;
};

/// Autonomous 1D velocity field solving v(T(x)) = T'(x) v(x) on every moving
/// interval, zero on the fixed set. Immutable once built.
class VelocityField1D {
public:
    VelocityField1D(MonotoneMap map, FixedPointPartition partition, std::vector<IntervalField> pieces,
                    std::vector<FieldWarning> warnings, VelocityOptions options);

    /// v(x). Throws DomainError outside the hull of the supports.
    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double value(double x) const { return (*this)(x); }

    /// Pullback of x to its seed interval; nullopt on the fixed set.
    [[nodiscard]] std::optional<Pullback> pull_to_seed(double x) const;
    /// T^steps(z) for z in the seed of `interval`.
    [[nodiscard]] double push_from_seed(std::size_t interval, double z, long steps) const;

    /// Seed primitive: integral of 1/v from alpha0 to z (time-scaled, so G(alpha1) = 1).
    [[nodiscard]] double seed_primitive(std::size_t interval, double z) const;
    [[nodiscard]] double seed_primitive_inverse(std::size_t interval, double u) const;

    [[nodiscard]] bool in_truncation_zone(double x) const;

    [[nodiscard]] const MonotoneMap& map() const noexcept { return map_; }
    [[nodiscard]] const FixedPointPartition& partition() const noexcept { return partition_; }
    [[nodiscard]] const std::vector<IntervalField>& pieces() const noexcept { return pieces_; }
    [[nodiscard]] const std::vector<FieldWarning>& warnings() const noexcept { return warnings_; }
    [[nodiscard]] const VelocityOptions& options() const noexcept { return options_; }
    [[nodiscard]] Interval hull() const noexcept { return partition_.hull; }

    /// Returns a copy whose per-interval scale makes the seed integral of 1/v equal 1.
    [[nodiscard]] VelocityField1D renormalized() const;

private:
    double zone_value(const TruncationZone& zone, double y) const;

    MonotoneMap map_;
    FixedPointPartition partition_;
    std::vector<IntervalField> pieces_;
    std::vector<FieldWarning> warnings_;
    VelocityOptions options_;
};

/// Case S = {}: one moving interval covering the hull.
[[nodiscard]] VelocityField1D build_no_fixed_point(const MonotoneMap& t, const SeedSpec& seed = {},
                                                   const VelocityOptions& opts = {});

/// Case S = {fp}; the same seed is used on both sides. Emits an
/// "indeterminate_fixed_point" warning when T'(fp) = 1.
[[nodiscard]] VelocityField1D build_one_fixed_point(const MonotoneMap& t, const SeedSpec& seed,
                                                    double fp, const VelocityOptions& opts = {});

/// Case of one moving interval bounded by fixed points at both ends.
[[nodiscard]] VelocityField1D build_two_fixed_points(const MonotoneMap& t, const SeedSpec& seed = {},
                                                     const VelocityOptions& opts = {});

/// General gluing: v = 0 on S, one seed per moving interval (missing entries use
/// the default seed). Intervals are built concurrently and merged in order.
[[nodiscard]] VelocityField1D build_general(const MonotoneMap& t, const FixedPointPartition& partition,
                                            const std::map<std::size_t, SeedSpec>& seeds = {},
                                            const VelocityOptions& opts = {});

/// Convenience: partition + build_general with one seed for every interval.
[[nodiscard]] VelocityField1D build_field(const MonotoneMap& t, const SeedSpec& seed = {},
                                          const VelocityOptions& opts = {});

/// Rescales each interval so that the integral of 1/v from x to T(x) is 1.
/// Throws NormalizationError when 1/v is not integrable on a seed.
[[nodiscard]] VelocityField1D time_normalize(const VelocityField1D& v, const MonotoneMap& t);

struct ApproximateResult {
    double shift = 0.0;  ///< lambda in T_lambda = T - lambda
    Measure1D target;    ///< mu1^eps = (T - lambda) # mu0
    MonotoneMap map;
    VelocityField1D field;
    double w1_to_target = 0.0;
    double l1_to_target = 0.0;
    std::vector<double> fixed_point_slopes;  ///< T_lambda' at detected fixed points
};

/// Shifts the target by a small lambda so that T_lambda' != 1 on the fixed set,
/// then builds the field. lambda = 0 is tried first. Throws SearchFailureError
/// when no admissible lambda with W1, L1 < eps exists in the scan.
[[nodiscard]] ApproximateResult approximate_lipschitz(const Measure1D& m0, const Measure1D& m1,
                                                      double eps, const SeedSpec& seed = {},
                                                      const VelocityOptions& opts = {});

/// Max |v(x_{i+1}) - v(x_i)| / h over a uniform grid of n + 1 points on the hull.
[[nodiscard]] double max_difference_quotient(const VelocityField1D& v, std::size_t n);

/// Integrals of 1/|v| over the first m orbit intervals from the seed towards the
/// fixed end `toward_hi` of moving interval `interval`; entry k is the partial sum over k+1 intervals.
[[nodiscard]] std::vector<double> osgood_partial_integrals(const VelocityField1D& v,
                                                           std::size_t interval, bool toward_hi,
                                                           std::size_t m);

/// Relative Julia residual |v(T x) - T'(x) v(x)| / max(|v(T x)|, |v(x)|) (0 when both vanish).
[[nodiscard]] double julia_residual(const VelocityField1D& v, double x);

}  // namespace transflow
