#include "transflow/monotone_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "transflow/errors.hpp"

namespace transflow {

MonotoneMap MonotoneMap::between(const Measure1D& source, const Measure1D& target) {
    MonotoneMap t;
    t.source_ = source;
    t.target_ = target;
    t.forward_ = [source, target](double x) {
        const double p = source.cdf(x);
        if (p <= 0.5) return target.quantile(p);
        return target.quantile_upper(source.ccdf(x));
    };
    t.inverse_ = [source, target](double y) {
        const double p = target.cdf(y);
        if (p <= 0.5) return source.quantile(p);
        return source.quantile_upper(target.ccdf(y));
    };
    t.domain_ = source.window();
    t.range_ = {t.forward_(t.domain_.lo), t.forward_(t.domain_.hi)};
    t.derivative_ = [source, target, fwd = t.forward_](double x) {
        const double num = source.density(x);
        const double den = target.density(fwd(x));
        if (!(num > 0.0) || !(den > 1e-300) || !std::isfinite(num / den))
            return std::numeric_limits<double>::quiet_NaN();
        return num / den;
    };
    return t;
}

MonotoneMap MonotoneMap::explicit_map(Interval domain, numerics::ScalarFn forward,
                                      numerics::ScalarFn derivative, numerics::ScalarFn inverse) {
    if (!domain.bounded() || !(domain.hi > domain.lo))
        throw InvalidMapError("explicit map: domain must be a bounded nonempty interval");
    MonotoneMap t;
    t.domain_ = domain;
    t.forward_ = std::move(forward);
    t.derivative_ = std::move(derivative);
    t.range_ = {t.forward_(domain.lo), t.forward_(domain.hi)};
    if (!(t.range_.hi > t.range_.lo))
        throw InvalidMapError("explicit map: map is not increasing on its domain");
    if (inverse) {
        t.inverse_ = std::move(inverse);
    } else {
        t.inverse_ = [fwd = t.forward_, der = t.derivative_, domain](double y) {
            return numerics::invert_monotone(fwd, y, domain.lo, domain.hi, der, y);
        };
    }
    return t;
}

MonotoneMap MonotoneMap::identity(Interval domain) {
    return explicit_map(
        domain, [](double x) { return x; }, [](double) { return 1.0; }, [](double y) { return y; });
}

double MonotoneMap::forward(double x) const { return forward_(x); }

double MonotoneMap::inverse(double y) const { return inverse_(y); }

double MonotoneMap::fd_derivative(double x) const {
    const double h = 1e-6 * domain_.width();
    const double lo = std::max(domain_.lo, x - h);
    const double hi = std::min(domain_.hi, x + h);
    return (forward_(hi) - forward_(lo)) / (hi - lo);
}

double MonotoneMap::derivative(double x) const {
    const double slack = 1e-12 * domain_.width();
    if (x < domain_.lo - slack || x > domain_.hi + slack) {
        std::ostringstream os;
        os << "map derivative: x = " << x << " outside the domain [" << domain_.lo << ", "
           << domain_.hi << "]";
        throw DomainError(os.str());
    }
    const double d = derivative_(x);
    if (std::isfinite(d) && d > 0.0) return d;
    return fd_derivative(std::clamp(x, domain_.lo, domain_.hi));
}

double MonotoneMap::second_derivative(double x) const {
    const double h = 1e-5 * domain_.width();
    const double lo = std::max(domain_.lo, x - h);
    const double hi = std::min(domain_.hi, x + h);
    return (derivative(hi) - derivative(lo)) / (hi - lo);
}

MonotoneMap compute_monotone_map(const Measure1D& m0, const Measure1D& m1) {
    return MonotoneMap::between(m0, m1);
}

double map_derivative(const MonotoneMap& t, double x) { return t.derivative(x); }

Measure1D pushforward_by_map(const Measure1D& m, const MonotoneMap& t) {
    const Interval w = m.window();
    constexpr int kChecks = 1024;
    for (int i = 0; i <= kChecks; ++i) {
        const double x = w.lo + w.width() * i / kChecks;
        const double raw = t.forward(std::min(w.hi, x + 1e-9 * w.width())) -
                           t.forward(std::max(w.lo, x - 1e-9 * w.width()));
        if (!(raw > 0.0) || !(t.derivative(x) > 0.0)) {
            std::ostringstream os;
            os << "pushforward: map is not strictly increasing near x = " << x;
            throw InvalidMapError(os.str());
        }
    }
    return Measure1D::pushforward(
        m, [t](double x) { return t.forward(x); }, [t](double x) { return t.derivative(x); },
        [t](double y) { return t.inverse(y); });
}

// --- fixed points ----------------------------------------------------------

std::optional<std::size_t> FixedPointPartition::locate(double x) const {
    for (std::size_t i = 0; i < moving.size(); ++i)
        if (moving[i].contains(x)) return i;
    return std::nullopt;
}

bool FixedPointPartition::is_fixed(double x) const {
    return std::any_of(fixed_set.begin(), fixed_set.end(),
                       [x](const Interval& c) { return c.contains(x); });
}

namespace {

struct Sample {
    double x;
    double g;
};

class FixedPointScanner {
public:
    FixedPointScanner(const MonotoneMap& t, double tol, int max_depth)
        : t_(t), tol_(tol), max_depth_(max_depth) {}

    double g(double x) const { return t_.forward(x) - x; }

    /// Appends refined samples of (a, b], assuming a was already emitted.
    void refine(Sample a, Sample b, int depth, std::vector<Sample>& out) const {
        const bool a_moving = std::abs(a.g) > tol_;
        const bool b_moving = std::abs(b.g) > tol_;
        if (depth < max_depth_ && a_moving && b_moving && (a.g > 0) == (b.g > 0)) {
            const double w = b.x - a.x;
            const double slope = std::max({std::abs(t_.derivative(a.x) - 1.0),
                                           std::abs(t_.derivative(b.x) - 1.0),
                                           std::abs(b.g - a.g) / w});
            if (std::abs(a.g) + std::abs(b.g) < 1.5 * slope * w) {
                const double m = a.x + 0.5 * w;
                const Sample mid{m, g(m)};
                refine(a, mid, depth + 1, out);
                refine(mid, b, depth + 1, out);
                return;
            }
        }
        out.push_back(b);
    }

    /// Root of g between samples with opposite signs.
    double root(Sample a, Sample b) const {
        double lo = a.x, hi = b.x;
        const bool lo_pos = a.g > 0;
        for (int it = 0; it < 200; ++it) {
            const double m = lo + 0.5 * (hi - lo);
            if (m <= lo || m >= hi) break;
            const double gm = g(m);
            if (std::abs(gm) <= tol_ * 1e-3) return m;
            if ((gm > 0) == lo_pos)
                lo = m;
            else
                hi = m;
        }
        return 0.5 * (lo + hi);
    }

private:
    const MonotoneMap& t_;
    double tol_;
    int max_depth_;
};

}  // namespace

FixedPointPartition find_fixed_points(const MonotoneMap& t, const FixedPointOptions& opts) {
    const Interval dom = t.domain();
    FixedPointPartition part;
    part.hull = t.hull();
    part.tol = opts.tol_fp > 0.0 ? opts.tol_fp : 1e-10 * dom.width();
    FixedPointScanner scan(t, part.tol, opts.max_refine_depth);

    const std::size_t n = std::max<std::size_t>(opts.grid, 2);
    std::vector<Sample> samples;
    samples.reserve(n + 1);
    Sample prev{dom.lo, scan.g(dom.lo)};
    samples.push_back(prev);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = (i == n) ? dom.hi
                                  : dom.lo + dom.width() * static_cast<double>(i) / static_cast<double>(n);
        const Sample cur{x, scan.g(x)};
        scan.refine(prev, cur, 0, samples);
        prev = cur;
    }

    auto state = [&](const Sample& s) {
        if (std::abs(s.g) <= part.tol) return 0;
        return s.g > 0 ? 1 : -1;
    };

    // fixed components: runs of fixed samples, plus isolated roots at sign flips
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const int si = state(samples[i]);
        if (si == 0) {
            std::size_t j = i;
            while (j + 1 < samples.size() && state(samples[j + 1]) == 0) ++j;
            part.fixed_set.push_back({samples[i].x, samples[j].x});
            i = j;
        } else if (i + 1 < samples.size()) {
            const int sj = state(samples[i + 1]);
            if (sj != 0 && sj != si) {
                const double r = scan.root(samples[i], samples[i + 1]);
                part.fixed_set.push_back({r, r});
            }
        }
    }

    for (const Interval& c : part.fixed_set) {
        part.boundary.push_back(c.lo);
        if (c.hi > c.lo) part.boundary.push_back(c.hi);
    }

    // moving intervals: gaps between fixed components, extended to the hull ends
    std::vector<std::pair<double, bool>> cuts;  // (position, is a fixed point)
    const bool lo_fixed = !part.fixed_set.empty() && part.fixed_set.front().lo <= dom.lo;
    const bool hi_fixed = !part.fixed_set.empty() && part.fixed_set.back().hi >= dom.hi;
    if (!lo_fixed) cuts.push_back({part.hull.lo, false});
    for (const Interval& c : part.fixed_set) {
        cuts.push_back({c.lo, true});
        cuts.push_back({c.hi, true});
    }
    if (!hi_fixed) cuts.push_back({part.hull.hi, false});

    // cuts alternate: gap starts at an odd/even position depending on lo_fixed
    std::size_t start = lo_fixed ? 1 : 0;
    for (std::size_t k = start; k + 1 < cuts.size(); k += 2) {
        MovingInterval mi;
        mi.lo = cuts[k].first;
        mi.hi = cuts[k + 1].first;
        mi.lo_fixed = cuts[k].second;
        mi.hi_fixed = cuts[k + 1].second;
        if (!(mi.hi > mi.lo)) continue;
        // sign from the part of the interval inside the domain
        const double a = std::max(mi.lo, dom.lo);
        const double b = std::min(mi.hi, dom.hi);
        const double mid = 0.5 * (a + b);
        mi.direction = scan.g(mid) > 0 ? 1 : -1;
        part.moving.push_back(mi);
    }
    return part;
}

// --- orbits ------------------------------------------------------------------

OrbitGrid build_orbit_grid(const MonotoneMap& t, const MovingInterval& interval, double x0,
                           const OrbitStop& stop) {
    const double width = interval.width();
    const double fixed_tol = 1e-10 * t.domain().width();
    if (std::abs(t.forward(x0) - x0) <= fixed_tol)
        throw DegenerateOrbitError("orbit requested from a fixed point of the map");
    if (!interval.contains_closed(x0))
        throw DomainError("orbit start lies outside the moving interval");

    const double delta = stop.delta > 0.0 ? stop.delta : 1e-12 * width;
    const Interval dom = stop.backward ? t.range() : t.domain();

    OrbitGrid grid;
    grid.anchors.push_back(x0);
    double x = x0;
    std::size_t steps = 0;
    grid.stop_reason = "left domain";
    while (true) {
        if (steps >= stop.max_steps) {
            grid.stop_reason = "step budget";
            break;
        }
        if (steps >= stop.i_max) {
            grid.truncated = true;
            grid.stop_reason = "i_max";
            break;
        }
        if (!dom.contains(x)) break;
        const double next = stop.backward ? t.inverse(x) : t.forward(x);
        if (!interval.contains_closed(next)) break;
        grid.anchors.push_back(next);
        ++steps;
        if (std::abs(next - x) < delta) {
            grid.truncated = true;
            grid.stop_reason = "delta_orbit";
            break;
        }
        x = next;
    }
    if (grid.anchors.size() >= 2) {
        grid.seed_interval = {std::min(grid.anchors[0], grid.anchors[1]),
                              std::max(grid.anchors[0], grid.anchors[1])};
    } else {
        grid.seed_interval = {x0, x0};
    }
    return grid;
}

}  // namespace transflow
