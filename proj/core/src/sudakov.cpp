#include "transflow/sudakov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "json_fields.hpp"
#include "parallel.hpp"
#include "transflow/errors.hpp"
#include "transflow/measure_io.hpp"

namespace transflow {

namespace {

double norm(const Point& x) { return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0)); }

double dot(const Point& a, const Point& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

void require_finite(const Point& p, const char* what) {
    for (double v : p)
        if (!std::isfinite(v)) throw InvalidMeasureError(std::string(what) + ": non-finite coordinate");
}

double normal_quantile(double u) {
    static const boost::math::normal_distribution<double> n01;
    return boost::math::quantile(n01, u);
}

/// Surface area of the unit sphere in R^d.
double sphere_area(std::size_t d) {
    const double h = 0.5 * static_cast<double>(d);
    return 2.0 * std::pow(std::numbers::pi, h) / boost::math::tgamma(h);
}

bool same_law(const Measure1D& a, const Measure1D& b) {
    const Interval wa = a.window();
    const Interval wb = b.window();
    const double scale = std::max({1.0, std::abs(wa.lo), std::abs(wa.hi)});
    if (std::abs(wa.lo - wb.lo) > 1e-12 * scale || std::abs(wa.hi - wb.hi) > 1e-12 * scale) return false;
    constexpr int kProbe = 64;
    for (int k = 0; k <= kProbe; ++k) {
        const double x = wa.lo + wa.width() * k / kProbe;
        if (std::abs(a.cdf(x) - b.cdf(x)) > 1e-12) return false;
        const double da = a.density(x);
        const double db = b.density(x);
        if (std::abs(da - db) > 1e-12 * std::max({1.0, std::abs(da), std::abs(db)})) return false;
    }
    return true;
}

Point unit_direction(std::span<const double> g) {
    Point u(g.begin(), g.end());
    const double r = norm(u);
    if (!(r > 0.0)) {
        std::fill(u.begin(), u.end(), 0.0);
        u[0] = 1.0;
        return u;
    }
    for (double& c : u) c /= r;
    return u;
}

}  // namespace

// --- measures ------------------------------------------------------------------

MeasureND MeasureND::product(std::vector<Measure1D> factors) {
    if (factors.empty()) throw InvalidMeasureError("product measure: need at least one factor");
    MeasureND m;
    m.kind_ = Kind::product;
    m.dim_ = factors.size();
    m.factors_ = std::move(factors);
    return m;
}

MeasureND MeasureND::box(const Point& lo, const Point& hi) {
    if (lo.size() != hi.size() || lo.empty()) throw InvalidMeasureError("box: lo and hi need equal nonzero length");
    std::vector<Measure1D> f;
    for (std::size_t j = 0; j < lo.size(); ++j) f.push_back(Measure1D::uniform(lo[j], hi[j]));
    return product(std::move(f));
}

MeasureND MeasureND::gaussian(const Point& mean, const std::vector<double>& sigma) {
    if (mean.empty() || (sigma.size() != 1 && sigma.size() != mean.size()))
        throw InvalidMeasureError("gaussian: sigma needs one entry or one per coordinate");
    std::vector<Measure1D> f;
    for (std::size_t j = 0; j < mean.size(); ++j)
        f.push_back(Measure1D::gaussian(mean[j], sigma.size() == 1 ? sigma[0] : sigma[j]));
    return product(std::move(f));
}

MeasureND MeasureND::ball(const Point& center, double radius) {
    if (center.size() < 2) throw InvalidMeasureError("ball: dimension must be at least 2");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidMeasureError("ball: radius must be positive");
    const double d = static_cast<double>(center.size());
    if (center.size() == 2) return radial(center, Measure1D::piecewise_linear({0.0, radius}, {0.0, 2.0 / radius}));
    // r = R u^(1/d) with u uniform on [0, 1]
    return radial(center, Measure1D::pushforward(
                              Measure1D::uniform(0.0, 1.0),
                              [d, radius](double u) { return radius * std::pow(u, 1.0 / d); },
                              [d, radius](double u) { return radius / d * std::pow(u, 1.0 / d - 1.0); },
                              [d, radius](double r) { return std::pow(r / radius, d); }));
}

MeasureND MeasureND::radial(const Point& center, Measure1D radius_law) {
    if (center.size() < 2) throw InvalidMeasureError("radial measure: dimension must be at least 2");
    require_finite(center, "radial measure center");
    if (radius_law.support().lo < 0.0) throw InvalidMeasureError("radial measure: radius law charges r < 0");
    MeasureND m;
    m.kind_ = Kind::radial;
    m.dim_ = center.size();
    m.center_ = center;
    m.radius_law_ = std::move(radius_law);
    return m;
}

std::size_t MeasureND::uniform_count() const noexcept {
    if (kind_ == Kind::product) return dim_;
    return dim_ == 2 ? 2 : dim_ + 1;
}

Point MeasureND::from_uniforms(std::span<const double> u) const {
    if (u.size() != uniform_count()) throw DomainError("from_uniforms: wrong number of variates");
    Point x(dim_);
    if (kind_ == Kind::product) {
        for (std::size_t j = 0; j < dim_; ++j) x[j] = factors_[j].quantile(u[j]);
        return x;
    }
    const double r = radius_law_->quantile(u[0]);
    Point dir;
    if (dim_ == 2) {
        const double a = 2.0 * std::numbers::pi * u[1];
        dir = {std::cos(a), std::sin(a)};
    } else {
        Point g(dim_);
        for (std::size_t j = 0; j < dim_; ++j) g[j] = normal_quantile(u[j + 1]);
        dir = unit_direction(g);
    }
    for (std::size_t j = 0; j < dim_; ++j) x[j] = center_[j] + r * dir[j];
    return x;
}

// --- parsing -------------------------------------------------------------------

namespace {

using detail::JsonCursor;

Measure1D parse_1d(const JsonCursor& node) {
    try {
        return parse_measure(node.raw().dump());
    } catch (const ParseError& e) {
        std::string msg = e.what();
        if (msg.rfind("$", 0) == 0) msg = node.path() + msg.substr(1);
        throw ParseError(msg);
    }
}

MeasureND parse_nd(const JsonCursor& node) {
    const std::string cls = node.field("class").string();
    const JsonCursor params = node.field("params");
    if (cls == "box") return MeasureND::box(params.field("lo").numbers(), params.field("hi").numbers());
    if (cls == "gaussian") {
        const Point mean = params.field("mean").numbers();
        const JsonCursor s = params.field("sigma");
        const std::vector<double> sigma = s.raw().is_array() ? s.numbers() : std::vector<double>{s.positive()};
        for (std::size_t j = 0; j < sigma.size(); ++j)
            if (!(sigma[j] > 0.0)) throw ParseError(s.path() + "[" + std::to_string(j) + "]: expected a positive number");
        if (sigma.size() != 1 && sigma.size() != mean.size())
            throw ParseError(s.path() + ": needs one entry or one per coordinate of mean");
        return MeasureND::gaussian(mean, sigma);
    }
    if (cls == "product") {
        const JsonCursor f = params.field("factors");
        if (!f.raw().is_array() || f.raw().empty()) throw ParseError(f.path() + ": expected a nonempty array");
        std::vector<Measure1D> factors;
        for (std::size_t j = 0; j < f.raw().size(); ++j)
            factors.push_back(parse_1d(JsonCursor(f.raw()[j], f.path() + "[" + std::to_string(j) + "]")));
        return MeasureND::product(std::move(factors));
    }
    if (cls == "ball" || cls == "radial") {
        const Point center = params.field("center").numbers();
        if (center.size() < 2) throw ParseError(params.path() + ".center: dimension must be at least 2");
        if (cls == "ball") return MeasureND::ball(center, params.field("radius").positive());
        return MeasureND::radial(center, parse_1d(params.field("radius_law")));
    }
    throw ParseError(node.path() + ".class: unknown class '" + cls + "' (expected box | gaussian | product | ball | radial)");
}

}  // namespace

MeasureND parse_measure_nd(std::string_view json_text) {
    const nlohmann::json doc = detail::parse_json(json_text);
    return parse_nd(JsonCursor(doc, "$"));
}

MeasureND load_measure_nd(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return parse_measure_nd(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// --- rays ----------------------------------------------------------------------

std::string to_string(RayKind kind) { return kind == RayKind::parallel ? "parallel" : "radial"; }

std::optional<std::pair<Ray, double>> RayFamilyND::ray_through(const Point& x) const {
    if (x.size() != dim) throw DomainError("ray_through: point has the wrong dimension");
    const Interval param = hull(cond0.window(), cond1.window());
    if (kind == RayKind::parallel) {
        Ray ray{x, Point(dim, 0.0), param};
        ray.base[axis] = 0.0;
        ray.direction[axis] = 1.0;
        return std::pair{ray, x[axis]};
    }
    Point d(dim);
    for (std::size_t j = 0; j < dim; ++j) d[j] = x[j] - center[j];
    const double r = norm(d);
    if (!(r > 0.0)) return std::nullopt;
    for (double& c : d) c /= r;
    return std::pair{Ray{center, d, param}, r};
}

std::vector<Ray> RayFamilyND::sample_rays(std::size_t count, std::uint64_t seed) const {
    const Interval param = hull(cond0.window(), cond1.window());
    std::vector<Ray> rays;
    rays.reserve(count);
    if (kind == RayKind::radial) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        for (std::size_t a = 0; a < count; ++a) {
            Point dir(dim);
            if (dim == 2) {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(count);
                dir = {std::cos(angle), std::sin(angle)};
            } else {
                for (double& c : dir) c = g(rng);
                dir = unit_direction(dir);
            }
            rays.push_back({center, dir, param});
        }
        return rays;
    }
    for (std::size_t a = 0; a < count; ++a) {
        const double p = (static_cast<double>(a) + 0.5) / static_cast<double>(count);
        Point base(dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j)
            if (j != axis) base[j] = m0.factors()[j].quantile(p);
        Point dir(dim, 0.0);
        dir[axis] = 1.0;
        rays.push_back({base, dir, param});
    }
    return rays;
}

std::pair<double, double> RayFamilyND::ray_masses(const Ray& ray) const {
    if (kind == RayKind::radial) {
        const double area = sphere_area(dim);
        auto mass = [&](const Measure1D& m) {
            const Interval s = m.window();
            return (m.cdf(s.hi) - m.cdf(s.lo)) / area;
        };
        return {mass(*m0.radius_law()), mass(*m1.radius_law())};
    }
    double a = 1.0, b = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
        if (j == axis) continue;
        a *= m0.factors()[j].density(ray.base[j]);
        b *= m1.factors()[j].density(ray.base[j]);
    }
    return {a, b};
}

RayFamilyND decompose(const MeasureND& m0, const MeasureND& m1) {
    if (m0.dim() != m1.dim()) throw UnsupportedClassError("decompose: measures live in different dimensions");
    if (m0.dim() < 2) throw UnsupportedClassError("decompose: dimension must be at least 2");
    const std::size_t d = m0.dim();
    if (m0.kind() == MeasureND::Kind::radial && m1.kind() == MeasureND::Kind::radial) {
        for (std::size_t j = 0; j < d; ++j)
            if (m0.center()[j] != m1.center()[j])
                throw UnsupportedClassError("decompose: radial measures with different centers");
        return {RayKind::radial, d, 0, m0.center(), *m0.radius_law(), *m1.radius_law(), m0, m1};
    }
    if (m0.kind() == MeasureND::Kind::product && m1.kind() == MeasureND::Kind::product) {
        std::vector<std::size_t> differing;
        for (std::size_t j = 0; j < d; ++j)
            if (!same_law(m0.factors()[j], m1.factors()[j])) differing.push_back(j);
        if (differing.size() > 1)
            throw UnsupportedClassError("decompose: product measures differ in more than one factor");
        const std::size_t axis = differing.empty() ? 0 : differing.front();
        return {RayKind::parallel, d, axis, {}, m0.factors()[axis], m1.factors()[axis], m0, m1};
    }
    throw UnsupportedClassError("decompose: need two product measures or two radial measures");
}

MonotoneMap per_ray_monotone_map(const RayFamilyND& family, const Ray&) {
    return compute_monotone_map(family.cond0, family.cond1);
}

// --- assembled field -----------------------------------------------------------

VelocityFieldND::VelocityFieldND(RayFamilyND family, FlowMap ray_flow)
    : family_(std::move(family)), ray_flow_(std::move(ray_flow)) {}

Point VelocityFieldND::operator()(const Point& x) const {
    const auto on_ray = family_.ray_through(x);
    if (!on_ray) {
        if (ray_field()(0.0) != 0.0) throw DomainError("radial field does not vanish at the center");
        return Point(dim(), 0.0);
    }
    const auto& [ray, s] = *on_ray;
    if (!ray_field().hull().contains(s)) throw DomainError("point outside the transport set");
    const double w = ray_field()(s);
    Point v(dim());
    for (std::size_t j = 0; j < dim(); ++j) v[j] = w * ray.direction[j];
    return v;
}

Point VelocityFieldND::flow(double t, const Point& x) const {
    const auto on_ray = family_.ray_through(x);
    if (!on_ray) {
        (void)(*this)(x);
        return x;
    }
    const auto& [ray, s] = *on_ray;
    if (!ray_field().hull().contains(s)) throw DomainError("point outside the transport set");
    const double s1 = ray_flow_(t, s);
    Point y(dim());
    for (std::size_t j = 0; j < dim(); ++j) y[j] = ray.base[j] + s1 * ray.direction[j];
    return y;
}

VelocityFieldND assemble_field(const RayFamilyND& family, const SeedSpec& seed, const VelocityOptions& opts) {
    const MonotoneMap t = compute_monotone_map(family.cond0, family.cond1);
    return {family, FlowMap(build_field(t, seed, opts))};
}

// --- verification --------------------------------------------------------------

std::vector<Point> stratified_samples(const MeasureND& m, std::size_t n, std::uint64_t seed) {
    const std::size_t k = m.uniform_count();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<double>> u(k, std::vector<double>(n));
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < k; ++j) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < n; ++i)
            u[j][i] = (static_cast<double>(perm[i]) + unif(rng)) / static_cast<double>(n);
    }
    std::vector<Point> out(n);
    std::vector<double> row(k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) row[j] = std::clamp(u[j][i], 1e-300, 1.0 - 1e-16);
        out[i] = m.from_uniforms(row);
    }
    return out;
}

namespace {

std::vector<Point> projection_directions(std::size_t dim, std::size_t count, std::uint64_t seed) {
    std::vector<Point> dirs;
    dirs.reserve(count);
    if (dim == 2) {
        for (std::size_t p = 0; p < count; ++p) {
            const double a = std::numbers::pi * static_cast<double>(p) / static_cast<double>(count);
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return dirs;
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> g;
    for (std::size_t p = 0; p < count; ++p) {
        Point d(dim);
        for (double& c : d) c = g(rng);
        dirs.push_back(unit_direction(d));
    }
    return dirs;
}

double sorted_w1(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace

NdReport verify_nd(const VelocityFieldND& field, const NdVerifyOptions& opts) {
    const RayFamilyND& fam = field.family();
    NdReport rep;
    rep.kind = fam.kind;
    rep.dim = fam.dim;
    rep.samples = opts.samples;
    rep.options = opts;

    // common uniforms for both measures when their classes agree
    const std::vector<Point> x0 = stratified_samples(fam.m0, opts.samples, opts.rng_seed);
    const std::vector<Point> x1 = stratified_samples(fam.m1, opts.samples, opts.rng_seed);
    std::vector<Point> y(opts.samples);
    std::vector<char> ok(opts.samples, 1);
    std::vector<double> drift(opts.samples, 0.0);
    detail::parallel_for(opts.samples, [&](std::size_t i) {
        try {
            y[i] = field.flow(1.0, x0[i]);
        } catch (const DomainError&) {
            ok[i] = 0;
            return;
        }
        const auto on_ray = fam.ray_through(x0[i]);
        if (!on_ray) return;
        const Ray& ray = on_ray->first;
        Point off(fam.dim);
        for (std::size_t j = 0; j < fam.dim; ++j) off[j] = y[i][j] - ray.base[j];
        const double reach = norm(off);
        const double s = dot(off, ray.direction);
        for (std::size_t j = 0; j < fam.dim; ++j) off[j] -= s * ray.direction[j];
        Point moved(fam.dim);
        for (std::size_t j = 0; j < fam.dim; ++j) moved[j] = y[i][j] - x0[i][j];
        drift[i] = norm(off) / std::max({norm(moved), reach, 1e-300});
    });
    rep.off_transport_set = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));
    rep.confinement = *std::max_element(drift.begin(), drift.end());

    const std::vector<Point> dirs = projection_directions(fam.dim, opts.projections, opts.rng_seed);
    double sliced = 0.0;
    for (const Point& d : dirs) {
        std::vector<double> a, b;
        a.reserve(opts.samples);
        b.reserve(opts.samples);
        for (std::size_t i = 0; i < opts.samples; ++i) {
            if (!ok[i]) continue;
            a.push_back(dot(y[i], d));
            b.push_back(dot(x1[i], d));
        }
        if (!a.empty()) sliced += sorted_w1(std::move(a), std::move(b));
    }
    rep.sliced_w1 = dirs.empty() ? 0.0 : sliced / static_cast<double>(dirs.size());

    const std::vector<Ray> rays = fam.sample_rays(opts.rays, opts.rng_seed);
    rep.rays.resize(rays.size());
    const std::size_t cells = opts.quantile_cells;
    detail::parallel_for(rays.size(), [&](std::size_t a) {
        const Ray& ray = rays[a];
        double w1 = 0.0;
        Point x(fam.dim);
        for (std::size_t k = 0; k < cells; ++k) {
            const double p = (static_cast<double>(k) + 0.5) / static_cast<double>(cells);
            const double s0 = fam.cond0.quantile(p);
            for (std::size_t j = 0; j < fam.dim; ++j) x[j] = ray.base[j] + s0 * ray.direction[j];
            Point y1 = field.flow(1.0, x);
            for (std::size_t j = 0; j < fam.dim; ++j) y1[j] -= ray.base[j];
            w1 += std::abs(dot(y1, ray.direction) - fam.cond1.quantile(p));
        }
        const auto [ma, mb] = fam.ray_masses(ray);
        rep.rays[a] = {a, w1 / static_cast<double>(cells), std::abs(ma - mb)};
    });
    for (const RayCheck& r : rep.rays) {
        rep.max_ray_w1 = std::max(rep.max_ray_w1, r.w1);
        rep.max_mass_defect = std::max(rep.max_mass_defect, r.mass_defect);
    }
    return rep;
}

bool NdReport::passed() const noexcept {
    return off_transport_set == 0 && max_ray_w1 <= options.tol_ray_w1 && sliced_w1 <= options.tol_sliced_w1 &&
           max_mass_defect <= options.tol_mass && confinement <= options.tol_confinement;
}

std::string NdReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["passed"] = passed();
    j["family"] = to_string(kind);
    j["dim"] = dim;
    j["samples"] = samples;
    j["rng_seed"] = options.rng_seed;
    j["sliced_w1"] = sliced_w1;
    j["projections"] = options.projections;
    j["max_ray_w1"] = max_ray_w1;
    j["max_mass_defect"] = max_mass_defect;
    j["confinement"] = confinement;
    j["off_transport_set"] = off_transport_set;
    nlohmann::ordered_json rs = nlohmann::ordered_json::array();
    for (const RayCheck& r : rays) rs.push_back({{"alpha", r.alpha}, {"w1", r.w1}, {"mass_defect", r.mass_defect}});
    j["rays"] = std::move(rs);
    j["tolerances"] = {{"ray_w1", options.tol_ray_w1},
                       {"sliced_w1", options.tol_sliced_w1},
                       {"mass", options.tol_mass},
                       {"confinement", options.tol_confinement}};
    return j.dump(2);
}

void write_field_samples(std::ostream& out, const VelocityFieldND& field, std::size_t n, std::uint64_t seed) {
    const std::size_t d = field.dim();
    for (std::size_t j = 0; j < d; ++j) out << (j ? ",x" : "x") << j;
    for (std::size_t j = 0; j < d; ++j) out << ",v" << j;
    out << '\n';
    std::ostringstream row;
    row.precision(17);
    for (const Point& x : stratified_samples(field.family().m0, n, seed)) {
        const Point v = field(x);
        row.str({});
        for (std::size_t j = 0; j < d; ++j) row << (j ? "," : "") << x[j];
        for (std::size_t j = 0; j < d; ++j) row << ',' << v[j];
        out << row.str() << '\n';
    }
}

}  // namespace transflow
