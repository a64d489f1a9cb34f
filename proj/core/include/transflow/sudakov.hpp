#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transflow/flow.hpp"
#include "transflow/measure.hpp"
#include "transflow/monotone_map.hpp"
#include "transflow/velocity.hpp"

namespace transflow {

using Point = std::vector<double>;

/// d-dimensional measure from one of two analytic classes:
///   product  independent coordinates with 1D laws factors[j]
///   radial   rotation invariant about `center`; radius_law is the law of |x - center|
class MeasureND {
public:
    enum class Kind { product, radial };

    static MeasureND product(std::vector<Measure1D> factors);
    static MeasureND box(const Point& lo, const Point& hi);
    static MeasureND gaussian(const Point& mean, const std::vector<double>& sigma);
    /// Uniform ball; the radius law has density d r^(d-1) / R^d on [0, R].
    static MeasureND ball(const Point& center, double radius);
    static MeasureND radial(const Point& center, Measure1D radius_law);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<Measure1D>& factors() const noexcept { return factors_; }
    [[nodiscard]] const Point& center() const noexcept { return center_; }
    [[nodiscard]] const std::optional<Measure1D>& radius_law() const noexcept { return radius_law_; }

    /// Uniform variates consumed by from_uniforms: d for products, 2 (d = 2) or
    /// d + 1 (d > 2) for radial measures.
    [[nodiscard]] std::size_t uniform_count() const noexcept;
    /// Quantile transform of a point of (0, 1)^uniform_count().
    [[nodiscard]] Point from_uniforms(std::span<const double> u) const;

private:
    MeasureND() = default;

    Kind kind_ = Kind::product;
    std::size_t dim_ = 0;
    std::vector<Measure1D> factors_;
    Point center_;
    std::optional<Measure1D> radius_law_;
};

/// Parses a d-dimensional measure description
///
///   {"class": "box",      "params": {"lo": [0, 0], "hi": [1, 1]}}
///   {"class": "gaussian", "params": {"mean": [0, 0], "sigma": 1 | [1, 2]}}
///   {"class": "product",  "params": {"factors": [<1D measure>, ...]}}
///   {"class": "ball",     "params": {"center": [0, 0], "radius": 1}}
///   {"class": "radial",   "params": {"center": [0, 0], "radius_law": <1D measure>}}
///
/// Throws ParseError naming the offending field.
[[nodiscard]] MeasureND parse_measure_nd(std::string_view json_text);
[[nodiscard]] MeasureND load_measure_nd(const std::filesystem::path& path);

enum class RayKind { parallel, radial };

[[nodiscard]] std::string to_string(RayKind kind);

/// One transport ray: base + s * direction for s in `param`.
struct Ray {
    Point base;
    Point direction;
    Interval param{};
};

/// Family of transport rays with its conditional laws. In both supported
/// classes every ray carries the same pair (cond0, cond1) after normalization:
///   parallel  lines x + s e_axis; cond_k is the axis factor of m_k
///   radial    half lines center + r u, |u| = 1; cond_k is the radius law of m_k
struct RayFamilyND {
    RayKind kind = RayKind::parallel;
    std::size_t dim = 0;
    std::size_t axis = 0;
    Point center;
    Measure1D cond0;
    Measure1D cond1;
    MeasureND m0;
    MeasureND m1;

    /// Ray through x and the parameter of x on it; nullopt at the center of a radial family.
    [[nodiscard]] std::optional<std::pair<Ray, double>> ray_through(const Point& x) const;
    /// `count` rays ordered by their index alpha: evenly spaced angles (d = 2),
    /// seeded directions (d > 2), or offsets at stratified quantiles of m0's other factors.
    [[nodiscard]] std::vector<Ray> sample_rays(std::size_t count, std::uint64_t seed) const;
    /// Unnormalized conditional masses of m0 and m1 on `ray`.
    [[nodiscard]] std::pair<double, double> ray_masses(const Ray& ray) const;
};

/// Splits (m0, m1) into rays: two products differing in at most one factor give
/// parallel rays along that axis; two radial measures with a common center give
/// radial rays. Throws UnsupportedClassError otherwise.
[[nodiscard]] RayFamilyND decompose(const MeasureND& m0, const MeasureND& m1);

/// Monotone map between the conditional laws on `ray`.
[[nodiscard]] MonotoneMap per_ray_monotone_map(const RayFamilyND& family, const Ray& ray);

/// v(x) = w(s(x)) e(x), with w the 1D field on the ray parameter and e the ray direction.
class VelocityFieldND {
public:
    VelocityFieldND(RayFamilyND family, FlowMap ray_flow);

    [[nodiscard]] std::size_t dim() const noexcept { return family_.dim; }
    /// Throws DomainError off the transport set (ray parameter outside the 1D hull).
    [[nodiscard]] Point operator()(const Point& x) const;
    [[nodiscard]] Point flow(double t, const Point& x) const;

    [[nodiscard]] const RayFamilyND& family() const noexcept { return family_; }
    [[nodiscard]] const FlowMap& ray_flow() const noexcept { return ray_flow_; }
    [[nodiscard]] const VelocityField1D& ray_field() const noexcept { return ray_flow_.field(); }

private:
    RayFamilyND family_;
    FlowMap ray_flow_;
};

[[nodiscard]] VelocityFieldND assemble_field(const RayFamilyND& family, const SeedSpec& seed = {},
                                             const VelocityOptions& opts = {});

struct NdVerifyOptions {
    std::size_t samples = 10000;
    std::size_t rays = 64;
    std::size_t projections = 64;
    std::size_t quantile_cells = 2048;  ///< midpoint rule for the per-ray W1
    std::uint64_t rng_seed = 20240601;
    double tol_ray_w1 = 1e-4;
    double tol_sliced_w1 = 2e-3;
    double tol_mass = 1e-10;
    double tol_confinement = 1e-12;  ///< relative to the larger of the distance travelled and the ray parameter
};

struct RayCheck {
    std::size_t alpha = 0;
    double w1 = 0.0;
    double mass_defect = 0.0;
};

struct NdReport {
    static constexpr int schema_version = 1;
    RayKind kind = RayKind::parallel;
    std::size_t dim = 0;
    std::size_t samples = 0;
    double sliced_w1 = 0.0;
    std::vector<RayCheck> rays;
    double max_ray_w1 = 0.0;
    double max_mass_defect = 0.0;
    double confinement = 0.0;
    std::size_t off_transport_set = 0;
    NdVerifyOptions options;

    [[nodiscard]] bool passed() const noexcept;
    [[nodiscard]] std::string to_json() const;
};

/// Pushes stratified samples of m0 through phi(1, .) and compares them with
/// samples of m1 drawn from the same uniforms (sliced W1 over seeded
/// directions); per-ray W1 is the quantile integral of |s(phi(1, Q0(p))) - Q1(p)|.
[[nodiscard]] NdReport verify_nd(const VelocityFieldND& field, const NdVerifyOptions& opts = {});

/// Latin hypercube samples of m pushed through from_uniforms. Two measures of
/// the same class and dimension sampled with one seed share their uniforms.
[[nodiscard]] std::vector<Point> stratified_samples(const MeasureND& m, std::size_t n, std::uint64_t seed);

/// CSV with columns x0..x{d-1},v0..v{d-1} at stratified samples of m0.
void write_field_samples(std::ostream& out, const VelocityFieldND& field, std::size_t n, std::uint64_t seed);

}  // namespace transflow
