#include "transflow/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "transflow/errors.hpp"
#include "transflow/quadrature.hpp"
#include "parallel.hpp"

namespace transflow {

std::string to_string(SeedKind kind) {
    switch (kind) {
        case SeedKind::constant: return "constant";
        case SeedKind::affine: return "affine";
        case SeedKind::hermite_ck: return "hermite_ck";
    }
    return "affine";
}

SeedKind parse_seed_kind(const std::string& text) {
    if (text == "constant") return SeedKind::constant;
    if (text == "affine") return SeedKind::affine;
    if (text == "hermite_ck" || text == "hermite") return SeedKind::hermite_ck;
    throw ParseError("unknown seed kind '" + text + "' (expected constant | affine | hermite_ck)");
}

double IntervalField::raw_seed(double x) const {
    const double s = (x - alpha0) / (alpha1 - alpha0);
    return c0 + s * (c1 + s * (c2 + s * c3));
}

double IntervalField::raw_seed_derivative(double x) const {
    const double s = (x - alpha0) / (alpha1 - alpha0);
    return (c1 + s * (2.0 * c2 + s * 3.0 * c3)) / (alpha1 - alpha0);
}

namespace {

/// Integral of 1 / (v0 + (v1 - v0) s) over s in [0, u], times the interval length h.
double affine_reciprocal_integral(double v0, double v1, double h, double u) {
    const double r = (v1 - v0) / v0;
    const double ru = r * u;
    if (std::abs(ru) < 1e-12) return h * u / v0;
    return h * std::log1p(ru) / (v0 * r);
}

double raw_seed_integral(const IntervalField& f, double z) {
    const double h = f.alpha1 - f.alpha0;
    const double u = (z - f.alpha0) / h;
    if (f.affine()) return affine_reciprocal_integral(f.c0, f.c0 + f.c1, h, u);
    constexpr int panels = 8;
    const double w = (z - f.alpha0) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = f.alpha0 + k * w;
        sum += boost::math::quadrature::gauss<double, 20>::integrate([&f](double x) { return 1.0 / f.raw_seed(x); },
                                                                     a, a + w);
    }
    return sum;
}

double choose_alpha0(const MonotoneMap& t, const MovingInterval& mi, const SeedSpec& seed) {
    const Interval dom = t.domain();
    const double a = std::max(mi.lo, dom.lo);
    const double b = std::min(mi.hi, dom.hi);
    if (!(b > a)) throw PreconditionError("moving interval does not meet the source support");
    if (seed.alpha0) {
        const double x0 = *seed.alpha0;
        if (!(x0 >= a && x0 <= b))
            throw DomainError("seed alpha0 lies outside the source support of its moving interval");
        return x0;
    }
    const bool far_is_fixed = mi.direction > 0 ? (b >= mi.hi && mi.hi_fixed) : (a <= mi.lo && mi.lo_fixed);
    if (far_is_fixed) {
        constexpr int kScan = 64;
        double best = 0.5 * (a + b);
        double best_g = mi.direction * (t.forward(best) - best);
        for (int i = 1; i < kScan; ++i) {
            const double x = a + (b - a) * i / kScan;
            const double g = mi.direction * (t.forward(x) - x);
            if (g > best_g) {
                best = x;
                best_g = g;
            }
        }
        return best;
    }
    return mi.direction > 0 ? b : a;
}

void build_seed(const MonotoneMap& t, IntervalField& f) {
    const int d = f.interval.direction;
    const double tp = t.derivative(f.alpha0);
    const double h = f.alpha1 - f.alpha0;
    const auto& vals = f.seed.values;
    const double default_v0 = d * std::abs(f.alpha1 - f.alpha0);

    switch (f.seed.kind) {
        case SeedKind::constant: {
            if (vals.size() != 1) throw SeedCompatibilityError("constant seed takes exactly one value");
            if (std::abs(tp - 1.0) > 1e-12) {
                std::ostringstream os;
                os << "constant seed violates v(alpha1) = T'(alpha0) v(alpha0): T'(alpha0) = " << tp;
                throw SeedCompatibilityError(os.str());
            }
            f.c0 = vals[0];
            break;
        }
        case SeedKind::affine: {
            const double v0 = vals.empty() ? default_v0 : vals[0];
            const double v1 = tp * v0;
            if (vals.size() >= 2 && std::abs(vals[1] - v1) > 1e-10 * std::max(std::abs(v1), 1e-300)) {
                std::ostringstream os;
                os << "affine seed endpoint " << vals[1] << " differs from T'(alpha0) v(alpha0) = " << v1;
                throw SeedCompatibilityError(os.str());
            }
            f.c0 = v0;
            f.c1 = v1 - v0;
            break;
        }
        case SeedKind::hermite_ck: {
            if (f.seed.order_k < 0 || f.seed.order_k > 1)
                throw SeedCompatibilityError("hermite_ck seed supports order_k in {0, 1}");
            const double v0 = vals.empty() ? default_v0 : vals[0];
            const double v1 = tp * v0;
            if (f.seed.order_k == 0) {
                f.c0 = v0;
                f.c1 = v1 - v0;
                break;
            }
            const double m0 = vals.size() >= 2 ? vals[1] : (v1 - v0) / h;
            // differentiating v(T(x)) = T'(x) v(x) at alpha0
            const double m1 = (t.second_derivative(f.alpha0) * v0 + tp * m0) / tp;
            f.c0 = v0;
            f.c1 = h * m0;
            f.c2 = -3.0 * v0 - 2.0 * h * m0 + 3.0 * v1 - h * m1;
            f.c3 = 2.0 * v0 + h * m0 - 2.0 * v1 + h * m1;
            break;
        }
    }

    constexpr int kChecks = 256;
    for (int i = 0; i <= kChecks; ++i) {
        const double x = f.alpha0 + h * i / kChecks;
        if (!(d * f.raw_seed(x) > 0.0)) {
            std::ostringstream os;
            os << "seed is not sign-definite (direction " << d << ") at x = " << x;
            throw SeedSignError(os.str());
        }
    }
}

double normalization_constant(const IntervalField& f) {
    const double integral = raw_seed_integral(f, f.alpha1);
    if (!std::isfinite(integral) || !(integral > 0.0))
        throw NormalizationError("1/v is not integrable on the seed interval");
    return integral;
}

/// Orbit from alpha0 towards a fixed end; returns the zone when the orbit is truncated.
std::optional<TruncationZone> make_zone(const MonotoneMap& t, const IntervalField& f, bool ahead,
                                        double fixed_point, const VelocityOptions& opts) {
    OrbitStop stop;
    stop.delta = f.delta_orbit;
    stop.i_max = opts.i_max;
    stop.backward = !ahead;
    const OrbitGrid grid = build_orbit_grid(t, f.interval, f.alpha0, stop);
    if (!grid.truncated || grid.anchors.size() < 2) return std::nullopt;

    double v = f.time_scale * f.c0;
    if (ahead) {
        for (std::size_t k = 0; k + 1 < grid.anchors.size(); ++k) v *= t.derivative(grid.anchors[k]);
    } else {
        for (std::size_t k = 1; k < grid.anchors.size(); ++k) v /= t.derivative(grid.anchors[k]);
    }
    TruncationZone zone;
    zone.fixed_point = fixed_point;
    zone.edge = grid.anchors.back();
    zone.v_edge = v;
    zone.anchors = grid.anchors.size() - 1;
    zone.edge_steps = ahead ? static_cast<long>(zone.anchors) : -static_cast<long>(zone.anchors);
    const Interval dom = t.domain();
    zone.slope_at_fixed = t.derivative(std::clamp(fixed_point, dom.lo, dom.hi));
    zone.indeterminate = std::abs(zone.slope_at_fixed - 1.0) <= opts.indeterminate_tol;
    return zone;
}

IntervalField build_interval(const MonotoneMap& t, const MovingInterval& mi, const SeedSpec& seed,
                             const VelocityOptions& opts) {
    IntervalField f;
    f.interval = mi;
    f.seed = seed;
    f.alpha0 = choose_alpha0(t, mi, seed);
    if (std::abs(t.forward(f.alpha0) - f.alpha0) <= 1e-10 * t.domain().width())
        throw DegenerateOrbitError("seed anchor is a fixed point of the map");
    f.alpha1 = t.forward(f.alpha0);
    f.delta_orbit = opts.delta_orbit_rel * mi.width();
    build_seed(t, f);
    f.time_scale = opts.normalize_time ? normalization_constant(f) : 1.0;

    const bool ahead_fixed = mi.direction > 0 ? mi.hi_fixed : mi.lo_fixed;
    const bool behind_fixed = mi.direction > 0 ? mi.lo_fixed : mi.hi_fixed;
    const double ahead_end = mi.direction > 0 ? mi.hi : mi.lo;
    const double behind_end = mi.direction > 0 ? mi.lo : mi.hi;
    std::optional<TruncationZone> ahead_zone, behind_zone;
    if (ahead_fixed) ahead_zone = make_zone(t, f, true, ahead_end, opts);
    if (behind_fixed) behind_zone = make_zone(t, f, false, behind_end, opts);
    if (mi.direction > 0) {
        f.zone_hi = ahead_zone;
        f.zone_lo = behind_zone;
    } else {
        f.zone_lo = ahead_zone;
        f.zone_hi = behind_zone;
    }
    return f;
}

void collect_warnings(const MonotoneMap& t, const FixedPointPartition& part, const VelocityOptions& opts,
                      const std::vector<IntervalField>& pieces, std::vector<FieldWarning>& out) {
    const Interval dom = t.domain();
    for (const double b : part.boundary) {
        if (b < dom.lo || b > dom.hi) continue;
        const double slope = t.derivative(b);
        if (std::abs(slope - 1.0) <= opts.indeterminate_tol) {
            std::ostringstream os;
            os << "T'(" << b << ") = " << slope
               << ": densities agree at the fixed point, continuity of v there is not asserted";
            out.push_back({"indeterminate_fixed_point", os.str(), b});
        }
    }
    for (const IntervalField& f : pieces) {
        for (const auto* z : {&f.zone_lo, &f.zone_hi}) {
            if (!*z) continue;
            std::ostringstream os;
            os << "orbit truncated after " << (*z)->anchors << " steps; v closed linearly on ("
               << std::min((*z)->edge, (*z)->fixed_point) << ", " << std::max((*z)->edge, (*z)->fixed_point)
               << ")" << ((*z)->indeterminate ? " (unverified: T' = 1 at the fixed point)" : "");
            out.push_back({"truncation_zone", os.str(), (*z)->fixed_point});
        }
    }
}

}  // namespace

// --- VelocityField1D ---------------------------------------------------------

VelocityField1D::VelocityField1D(MonotoneMap map, FixedPointPartition partition,
                                 std::vector<IntervalField> pieces, std::vector<FieldWarning> warnings,
                                 VelocityOptions options)
    : map_(std::move(map)), partition_(std::move(partition)), pieces_(std::move(pieces)),
      warnings_(std::move(warnings)), options_(options) {}

double VelocityField1D::zone_value(const TruncationZone& zone, double y) const {
    return zone.v_edge * (y - zone.fixed_point) / (zone.edge - zone.fixed_point);
}

std::optional<Pullback> VelocityField1D::pull_to_seed(double x) const {
    const Interval h = partition_.hull;
    const double slack = 1e-12 * h.width();
    if (x < h.lo - slack || x > h.hi + slack) {
        std::ostringstream os;
        os << "x = " << x << " outside the field's domain [" << h.lo << ", " << h.hi << "]";
        throw DomainError(os.str());
    }
    auto idx = partition_.locate(x);
    if (!idx) {
        // ends of the hull that are not fixed belong to the adjacent interval
        for (std::size_t i = 0; i < pieces_.size() && !idx; ++i) {
            const auto& mi = pieces_[i].interval;
            if ((std::abs(x - mi.lo) <= slack && !mi.lo_fixed) || (std::abs(x - mi.hi) <= slack && !mi.hi_fixed))
                idx = i;
        }
        if (!idx) return std::nullopt;
    }
    const IntervalField& f = pieces_[*idx];
    Pullback pb;
    pb.interval = *idx;
    for (const auto* z : {&f.zone_lo, &f.zone_hi}) {
        if (*z && (*z)->contains(x)) {
            pb.truncated = true;
            pb.z = x;
            return pb;
        }
    }
    const double len = f.seed_length();
    double y = x;
    double factor = 1.0;
    long steps = 0;
    const std::size_t cap = options_.i_max + 8;
    double u = f.along(y);
    while (u >= len) {  // ahead of the seed: pull back with T^{-1}
        const double prev = map_.inverse(y);
        factor *= map_.derivative(prev);
        y = prev;
        ++steps;
        u = f.along(y);
        if (static_cast<std::size_t>(steps) > cap) {
            pb.truncated = true;
            break;
        }
    }
    while (u < 0.0) {  // behind the seed: push forward with T
        factor /= map_.derivative(y);
        y = map_.forward(y);
        --steps;
        u = f.along(y);
        if (static_cast<std::size_t>(-steps) > cap) {
            pb.truncated = true;
            break;
        }
    }
    pb.steps = steps;
    pb.z = y;
    pb.factor = factor;
    return pb;
}

double VelocityField1D::push_from_seed(std::size_t interval, double z, long steps) const {
    (void)interval;
    double y = z;
    for (long k = 0; k < steps; ++k) y = map_.forward(y);
    for (long k = 0; k > steps; --k) y = map_.inverse(y);
    return y;
}

double VelocityField1D::operator()(double x) const {
    const auto pb = pull_to_seed(x);
    if (!pb) return 0.0;
    const IntervalField& f = pieces_[pb->interval];
    if (pb->truncated && pb->steps == 0) {
        for (const auto* z : {&f.zone_lo, &f.zone_hi})
            if (*z && (*z)->contains(x)) return zone_value(**z, x);
    }
    return f.time_scale * f.raw_seed(pb->z) * pb->factor;
}

double VelocityField1D::seed_primitive(std::size_t interval, double z) const {
    const IntervalField& f = pieces_.at(interval);
    return raw_seed_integral(f, z) / f.time_scale;
}

double VelocityField1D::seed_primitive_inverse(std::size_t interval, double u) const {
    const IntervalField& f = pieces_.at(interval);
    const double h = f.alpha1 - f.alpha0;
    if (f.affine()) {
        // raw integral = h log(1 + r s) / (v0 r) = u * time_scale
        const double v0 = f.c0;
        const double r = f.c1 / v0;
        const double target = u * f.time_scale;
        double s;
        if (std::abs(r) < 1e-14)
            s = target * v0 / h;
        else
            s = std::expm1(target * v0 * r / h) / r;
        return f.alpha0 + h * std::clamp(s, 0.0, 1.0);
    }
    // primitive increases along the direction of motion
    auto g = [this, interval, &f](double s) { return seed_primitive(interval, f.alpha0 + s * (f.alpha1 - f.alpha0)); };
    auto dg = [&f, h](double s) {
        const double x = f.alpha0 + s * h;
        return h / (f.time_scale * f.raw_seed(x));
    };
    const double guess = u * f.time_scale * f.raw_seed(f.alpha0) / h;
    const double s = numerics::invert_monotone(g, u, 0.0, 1.0, dg, guess);
    return f.alpha0 + s * h;
}

bool VelocityField1D::in_truncation_zone(double x) const {
    for (const IntervalField& f : pieces_)
        for (const auto* z : {&f.zone_lo, &f.zone_hi})
            if (*z && ((*z)->contains(x) || x == (*z)->fixed_point)) return true;
    return false;
}

VelocityField1D VelocityField1D::renormalized() const {
    std::vector<IntervalField> pieces = pieces_;
    for (IntervalField& f : pieces) {
        const double scale = normalization_constant(f);
        const double ratio = scale / f.time_scale;
        f.time_scale = scale;
        for (auto* z : {&f.zone_lo, &f.zone_hi})
            if (*z) (*z)->v_edge *= ratio;
    }
    VelocityOptions opts = options_;
    opts.normalize_time = true;
    return VelocityField1D(map_, partition_, std::move(pieces), warnings_, opts);
}

// --- builders ----------------------------------------------------------------

VelocityField1D build_general(const MonotoneMap& t, const FixedPointPartition& partition,
                              const std::map<std::size_t, SeedSpec>& seeds, const VelocityOptions& opts) {
    std::vector<IntervalField> pieces(partition.moving.size());
    detail::parallel_for(pieces.size(), [&](std::size_t i) {
        const auto it = seeds.find(i);
        const SeedSpec seed = it != seeds.end() ? it->second : SeedSpec{};
        pieces[i] = build_interval(t, partition.moving[i], seed, opts);
    });
    std::vector<FieldWarning> warnings;
    collect_warnings(t, partition, opts, pieces, warnings);
    return VelocityField1D(t, partition, std::move(pieces), std::move(warnings), opts);
}

VelocityField1D build_field(const MonotoneMap& t, const SeedSpec& seed, const VelocityOptions& opts) {
    const FixedPointPartition part = find_fixed_points(t, opts.fixed_points);
    std::map<std::size_t, SeedSpec> seeds;
    for (std::size_t i = 0; i < part.moving.size(); ++i) {
        SeedSpec s = seed;
        // a user anchor only applies to the interval that contains it
        if (s.alpha0 && !part.moving[i].contains_closed(*s.alpha0)) s.alpha0.reset();
        seeds[i] = s;
    }
    return build_general(t, part, seeds, opts);
}

VelocityField1D build_no_fixed_point(const MonotoneMap& t, const SeedSpec& seed, const VelocityOptions& opts) {
    const FixedPointPartition part = find_fixed_points(t, opts.fixed_points);
    if (!part.fixed_set.empty()) {
        std::ostringstream os;
        os << "map has " << part.fixed_set.size() << " fixed component(s); expected none";
        throw PreconditionError(os.str());
    }
    return build_general(t, part, {{0, seed}}, opts);
}

VelocityField1D build_one_fixed_point(const MonotoneMap& t, const SeedSpec& seed, double fp,
                                      const VelocityOptions& opts) {
    const FixedPointPartition part = find_fixed_points(t, opts.fixed_points);
    const double tol = 1e-6 * t.domain().width();
    if (part.fixed_set.size() != 1 || part.fixed_set[0].width() > tol ||
        std::abs(part.fixed_set[0].lo - fp) > tol) {
        std::ostringstream os;
        os << "expected exactly one fixed point at " << fp << ", found " << part.fixed_set.size()
           << " fixed component(s)";
        throw PreconditionError(os.str());
    }
    std::map<std::size_t, SeedSpec> seeds;
    for (std::size_t i = 0; i < part.moving.size(); ++i) {
        SeedSpec s = seed;
        if (s.alpha0 && !part.moving[i].contains_closed(*s.alpha0)) s.alpha0.reset();
        seeds[i] = s;
    }
    return build_general(t, part, seeds, opts);
}

VelocityField1D build_two_fixed_points(const MonotoneMap& t, const SeedSpec& seed, const VelocityOptions& opts) {
    const FixedPointPartition part = find_fixed_points(t, opts.fixed_points);
    if (part.moving.empty()) throw PreconditionError("map has no moving interval");
    if (part.moving.size() != 1 || part.fixed_set.size() != 2 || !part.moving[0].lo_fixed ||
        !part.moving[0].hi_fixed) {
        throw PreconditionError("expected one moving interval bounded by two fixed points and no interior fixed points");
    }
    return build_general(t, part, {{0, seed}}, opts);
}

VelocityField1D time_normalize(const VelocityField1D& v, const MonotoneMap& t) {
    const Interval a = v.map().domain();
    const Interval b = t.domain();
    if (std::abs(a.lo - b.lo) > 1e-12 * a.width() || std::abs(a.hi - b.hi) > 1e-12 * a.width())
        throw PreconditionError("time_normalize: field was built for a different map");
    return v.renormalized();
}

// --- approximate controllability ------------------------------------------

ApproximateResult approximate_lipschitz(const Measure1D& m0, const Measure1D& m1, double eps,
                                        const SeedSpec& seed, const VelocityOptions& opts) {
    if (!(eps > 0.0)) throw DomainError("approximate_lipschitz: eps must be positive");
    std::vector<double> shifts{0.0};
    constexpr double kFactor = 0.9137;
    for (int j = 1; j <= 40; ++j) {
        const double lam = eps * kFactor * std::ldexp(1.0, -j);
        shifts.push_back(lam);
        shifts.push_back(-lam);
    }
    for (const double lam : shifts) {
        const Measure1D target = lam == 0.0 ? m1 : Measure1D::affine_image(m1, 1.0, -lam);
        const MonotoneMap t = MonotoneMap::between(m0, target);
        const FixedPointPartition part = find_fixed_points(t, opts.fixed_points);
        bool ok = true;
        std::vector<double> slopes;
        const Interval dom = t.domain();
        for (const Interval& c : part.fixed_set) {
            if (c.width() > part.tol * 1e3) {
                ok = false;
                break;
            }
            const double s = t.derivative(std::clamp(c.lo, dom.lo, dom.hi));
            slopes.push_back(s);
            if (!(std::abs(s - 1.0) > 1e-6)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        const double w1 = lam == 0.0 ? 0.0 : wasserstein1(m1, target);
        const double l1 = lam == 0.0 ? 0.0 : l1_distance(m1, target);
        if (!(w1 < eps && l1 < eps)) continue;
        std::map<std::size_t, SeedSpec> seeds;
        for (std::size_t i = 0; i < part.moving.size(); ++i) seeds[i] = seed;
        VelocityField1D field = build_general(t, part, seeds, opts);
        return ApproximateResult{lam, target, t, std::move(field), w1, l1, std::move(slopes)};
    }
    throw SearchFailureError("approximate_lipschitz: no admissible shift found in the scan");
}

// --- diagnostics ---------------------------------------------------------------

double max_difference_quotient(const VelocityField1D& v, std::size_t n) {
    const Interval h = v.hull();
    const double step = h.width() / static_cast<double>(n);
    std::vector<double> vals(n + 1);
    detail::parallel_for(n + 1, [&](std::size_t i) {
        const double x = (i == n) ? h.hi : h.lo + step * static_cast<double>(i);
        vals[i] = v(x);
    });
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::abs(vals[i + 1] - vals[i]) / step);
    return best;
}

std::vector<double> osgood_partial_integrals(const VelocityField1D& v, std::size_t interval, bool toward_hi,
                                             std::size_t m) {
    const IntervalField& f = v.pieces().at(interval);
    OrbitStop stop;
    stop.max_steps = m;
    stop.backward = (f.interval.direction > 0) != toward_hi;
    const OrbitGrid grid = build_orbit_grid(v.map(), f.interval, f.alpha0, stop);
    std::vector<double> partial;
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < grid.anchors.size(); ++k) {
        const double a = std::min(grid.anchors[k], grid.anchors[k + 1]);
        const double b = std::max(grid.anchors[k], grid.anchors[k + 1]);
        sum += numerics::integrate([&v](double x) { return 1.0 / std::abs(v(x)); }, a, b, 1e-10, 10);
        partial.push_back(sum);
    }
    return partial;
}

double julia_residual(const VelocityField1D& v, double x) {
    const double lhs = v(v.map().forward(x));
    const double rhs = v.map().derivative(x) * v(x);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale == 0.0) return 0.0;
    return std::abs(lhs - rhs) / scale;
}

}  // namespace transflow
