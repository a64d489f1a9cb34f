#include "transflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "transflow/errors.hpp"

namespace transflow {

namespace {

struct Located {
    std::size_t interval;
    double value;
};

const TruncationZone* zone_containing(const IntervalField& f, double x) {
    for (const auto* z : {&f.zone_lo, &f.zone_hi})
        if (*z && (*z)->contains(x)) return &**z;
    return nullptr;
}

double zone_rate(const TruncationZone& z) { return z.v_edge / (z.edge - z.fixed_point); }

std::optional<Located> locate_primitive(const VelocityField1D& field, double x) {
    const auto pb = field.pull_to_seed(x);
    if (!pb) return std::nullopt;
    const IntervalField& f = field.pieces()[pb->interval];
    if (const TruncationZone* z = zone_containing(f, x)) {
        const double r = (x - z->fixed_point) / (z->edge - z->fixed_point);
        return Located{pb->interval, static_cast<double>(z->edge_steps) + std::log(r) / zone_rate(*z)};
    }
    return Located{pb->interval, static_cast<double>(pb->steps) + field.seed_primitive(pb->interval, pb->z)};
}

[[noreturn]] void leaves_domain(double y) {
    std::ostringstream os;
    os << "trajectory leaves the domain of the map at y = " << y;
    throw DomainError(os.str());
}

}  // namespace

FlowMap::FlowMap(VelocityField1D field) : field_(std::move(field)) {}

std::optional<double> FlowMap::primitive(double x) const {
    const auto loc = locate_primitive(field_, x);
    if (!loc) return std::nullopt;
    return loc->value;
}

double FlowMap::inverse_primitive(std::size_t interval, double u) const {
    const IntervalField& f = field_.pieces().at(interval);
    for (const auto* zp : {&f.zone_lo, &f.zone_hi}) {
        if (!*zp) continue;
        const TruncationZone& z = **zp;
        const double k = static_cast<double>(z.edge_steps);
        if ((z.edge_steps > 0 && u > k) || (z.edge_steps < 0 && u < k))
            return z.fixed_point + (z.edge - z.fixed_point) * std::exp(zone_rate(z) * (u - k));
    }
    const double whole = std::floor(u);
    const long steps = static_cast<long>(whole);
    double y = field_.seed_primitive_inverse(interval, u - whole);
    const MonotoneMap& t = field_.map();
    const Interval dom = t.domain();
    const Interval rng = t.range();
    const double slack_d = 1e-12 * dom.width();
    const double slack_r = 1e-12 * rng.width();
    for (long k = 0; k < steps; ++k) {
        if (y < dom.lo - slack_d || y > dom.hi + slack_d) leaves_domain(y);
        y = t.forward(y);
    }
    for (long k = 0; k > steps; --k) {
        if (y < rng.lo - slack_r || y > rng.hi + slack_r) leaves_domain(y);
        y = t.inverse(y);
    }
    return y;
}

double FlowMap::operator()(double t, double x) const {
    if (t < 0.0) throw DomainError("flow: negative time");
    const auto loc = locate_primitive(field_, x);
    if (!loc || t == 0.0) return x;
    return inverse_primitive(loc->interval, loc->value + t);
}

double FlowMap::space_derivative(double t, double x) const {
    if (t == 0.0) return 1.0;
    const auto loc = locate_primitive(field_, x);
    if (!loc) {
        const Interval dom = field_.map().domain();
        if (!dom.contains(x) || field_.partition().is_fixed(x)) {
            // nondegenerate components of the fixed set do not move at all
            for (const Interval& c : field_.partition().fixed_set)
                if (c.width() > 0.0 && c.contains(x)) return 1.0;
        }
        if (!dom.contains(x)) return 1.0;
        return std::pow(field_.map().derivative(x), t);
    }
    const double y = inverse_primitive(loc->interval, loc->value + t);
    const double vx = field_(x);
    const double vy = field_(y);
    if (std::abs(vx) > 1e-300 && std::isfinite(vy / vx) && vy / vx > 0.0) return vy / vx;
    const Interval h = field_.hull();
    const double dx = 1e-7 * h.width();
    const double a = std::max(h.lo, x - dx);
    const double b = std::min(h.hi, x + dx);
    return ((*this)(t, b) - (*this)(t, a)) / (b - a);
}

double flow(const VelocityField1D& field, double t, double x) { return FlowMap(field)(t, x); }

double integrate_explicit(const VelocityField1D& field, double t, double x, std::size_t steps) {
    if (steps == 0) throw DomainError("integrate_explicit: steps must be positive");
    const Interval h = field.hull();
    auto v = [&](double y) { return field(std::clamp(y, h.lo, h.hi)); };
    const double dt = t / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double k1 = v(x);
        const double k2 = v(x + 0.5 * dt * k1);
        const double k3 = v(x + 0.5 * dt * k2);
        const double k4 = v(x + dt * k3);
        x += dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    return x;
}

Measure1D push_measure(const FlowMap& flow, const Measure1D& m0, double t, std::size_t n) {
    if (t == 0.0) return m0;
    if (n < 2) throw DomainError("push_measure: need at least 2 intervals");
    const Interval w = m0.window();
    std::vector<double> xs(n + 1), ys(n + 1), ds(n + 1);
    detail::parallel_for(n + 1, [&](std::size_t i) {
        const double x = (i == n) ? w.hi : w.lo + w.width() * static_cast<double>(i) / static_cast<double>(n);
        xs[i] = x;
        ys[i] = flow(t, x);
        ds[i] = m0.density(x) / flow.space_derivative(t, x);
    });
    std::vector<double> y, d;
    y.reserve(n + 1);
    d.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        if (!y.empty() && !(ys[i] > y.back())) continue;
        y.push_back(ys[i]);
        d.push_back(std::isfinite(ds[i]) ? std::max(ds[i], 0.0) : 0.0);
    }
    return Measure1D::grid(std::move(y), std::move(d));
}

Measure1D push_measure(const VelocityField1D& field, const Measure1D& m0, double t, std::size_t n) {
    return push_measure(FlowMap(field), m0, t, n);
}

// --- verification ------------------------------------------------------------

bool TransportReport::passed() const noexcept {
    return w1_ok() && julia_ok() && abel_ok() && semigroup_ok(hull_width) && monotonicity_violations == 0;
}

TransportReport verify_transport(const VelocityField1D& field, const Measure1D& m0, const Measure1D& m1,
                                 const VerifyOptions& opts) {
    TransportReport rep;
    rep.options = opts;
    rep.n = opts.n;
    rep.hull_width = field.hull().width();
    rep.moving_intervals = field.partition().moving.size();
    rep.fixed_components = field.partition().fixed_set.size();
    rep.warnings = field.warnings();
    for (const IntervalField& f : field.pieces())
        for (const auto* z : {&f.zone_lo, &f.zone_hi})
            if (*z) rep.zones.push_back(**z);

    const FlowMap fm(field);
    const Measure1D pushed = push_measure(fm, m0, 1.0, opts.n);
    rep.w1 = wasserstein1(pushed, m1);
    rep.l1 = l1_distance(pushed, m1);

    const MonotoneMap& t = field.map();
    const Interval dom = t.domain();
    const Interval hull = field.hull();
    std::vector<double> jr(opts.samples, -1.0), ar(opts.samples, -1.0);
    detail::parallel_for(opts.samples, [&](std::size_t i) {
        const double x = dom.lo + dom.width() * (static_cast<double>(i) + 0.5) / static_cast<double>(opts.samples);
        const double tx = t.forward(x);
        if (!hull.contains(tx) || field.in_truncation_zone(x) || field.in_truncation_zone(tx)) return;
        const auto fx = locate_primitive(field, x);
        const auto ftx = locate_primitive(field, tx);
        if (!fx && !ftx) {
            // fixed set: v vanishes at x and T(x), the Abel relation has no primitive
            jr[i] = julia_residual(field, x);
            return;
        }
        if (!fx || !ftx || fx->interval != ftx->interval) return;
        jr[i] = julia_residual(field, x);
        ar[i] = std::abs(ftx->value - fx->value - 1.0);
    });
    auto summarize = [](const std::vector<double>& r) {
        ResidualSummary s;
        double sum = 0.0;
        for (const double e : r) {
            if (e < 0.0) {
                ++s.excluded;
                continue;
            }
            ++s.samples;
            sum += e;
            s.max = std::max(s.max, e);
        }
        s.mean = s.samples ? sum / static_cast<double>(s.samples) : 0.0;
        return s;
    };
    rep.julia = summarize(jr);
    rep.abel = summarize(ar);

    std::mt19937_64 gen(opts.rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    struct Pair {
        double x1, x2, s, t;
    };
    std::vector<Pair> pairs(opts.pairs);
    for (Pair& p : pairs) {
        p.x1 = dom.lo + dom.width() * unit(gen);
        p.x2 = dom.lo + dom.width() * unit(gen);
        if (p.x2 < p.x1) std::swap(p.x1, p.x2);
        p.t = unit(gen);
        p.s = (1.0 - p.t) * unit(gen);
    }
    std::vector<double> sg(opts.pairs, 0.0);
    std::vector<char> bad(opts.pairs, 0);
    detail::parallel_for(opts.pairs, [&](std::size_t i) {
        const Pair& p = pairs[i];
        const double y = fm(p.t, p.x1);
        sg[i] = std::abs(fm(p.s, y) - fm(p.s + p.t, p.x1));
        bad[i] = y > fm(p.t, p.x2) ? 1 : 0;
    });
    for (std::size_t i = 0; i < opts.pairs; ++i) {
        rep.semigroup = std::max(rep.semigroup, sg[i]);
        rep.monotonicity_violations += static_cast<std::size_t>(bad[i]);
    }

    constexpr std::size_t kOsgoodIntervals = 4;
    const auto& pieces = field.pieces();
    std::vector<std::size_t> order(pieces.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&pieces](std::size_t a, std::size_t b) {
        return pieces[a].interval.width() > pieces[b].interval.width();
    });
    order.resize(std::min(order.size(), kOsgoodIntervals));
    std::sort(order.begin(), order.end());
    for (const std::size_t i : order) {
        const MovingInterval& mi = pieces[i].interval;
        for (const bool hi : {false, true}) {
            if (!(hi ? mi.hi_fixed : mi.lo_fixed)) continue;
            OsgoodRow row;
            row.interval = i;
            row.fixed_point = hi ? mi.hi : mi.lo;
            row.partial = osgood_partial_integrals(field, i, hi, opts.osgood_steps);
            rep.osgood.push_back(std::move(row));
        }
    }
    return rep;
}

std::string TransportReport::to_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["schema_version"] = schema_version;
    j["n"] = n;
    j["passed"] = passed();
    j["w1"] = w1;
    j["l1"] = l1;
    auto summary = [](const ResidualSummary& s) {
        return ordered_json{{"max", s.max}, {"mean", s.mean}, {"samples", s.samples}, {"excluded", s.excluded}};
    };
    j["julia_residual"] = summary(julia);
    j["abel_residual"] = summary(abel);
    j["semigroup_error"] = semigroup;
    j["monotonicity_violations"] = monotonicity_violations;
    j["moving_intervals"] = moving_intervals;
    j["fixed_components"] = fixed_components;
    ordered_json os = ordered_json::array();
    for (const OsgoodRow& r : osgood)
        os.push_back({{"interval", r.interval}, {"fixed_point", r.fixed_point}, {"partial", r.partial}});
    j["osgood"] = os;
    ordered_json zs = ordered_json::array();
    for (const TruncationZone& z : zones)
        zs.push_back({{"fixed_point", z.fixed_point},
                      {"edge", z.edge},
                      {"v_edge", z.v_edge},
                      {"slope_at_fixed", z.slope_at_fixed},
                      {"steps", z.anchors},
                      {"unverified", z.indeterminate}});
    j["truncation_zones"] = zs;
    ordered_json ws = ordered_json::array();
    for (const FieldWarning& w : warnings) ws.push_back({{"code", w.code}, {"where", w.where}, {"message", w.message}});
    j["warnings"] = ws;
    j["tolerances"] = {{"w1", options.tol_w1},
                       {"julia", options.tol_julia},
                       {"abel", options.tol_abel},
                       {"semigroup_rel", options.tol_semigroup_rel}};
    j["rng_seed"] = options.rng_seed;
    return j.dump(2);
}

void write_trajectories(std::ostream& out, const FlowMap& flow, const std::vector<double>& x0,
                        const std::vector<double>& times) {
    out << "x0,t,phi\n";
    out.precision(17);
    for (const double x : x0)
        for (const double t : times) out << x << ',' << t << ',' << flow(t, x) << '\n';
}

}  // namespace transflow
