#include "transflow/pathology.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "transflow/errors.hpp"
#include "transflow/velocity.hpp"

namespace transflow {

std::string to_string(CounterexampleVariant v) {
    return v == CounterexampleVariant::quadratic ? "quadratic" : "log_squared";
}

CounterexampleVariant parse_counterexample_variant(const std::string& text) {
    if (text == "quadratic") return CounterexampleVariant::quadratic;
    if (text == "log_squared" || text == "log-squared") return CounterexampleVariant::log_squared;
    throw ParseError("unknown counterexample variant '" + text + "' (expected quadratic | log_squared)");
}

// --- profile -------------------------------------------------------------------

BumpProfile::BumpProfile(double g) : g_(g) {
    constexpr double L = kKnee;
    a_[0] = 0.0;
    a_[1] = -g;
    a_[2] = 0.5 * (16.0 + 10.0 * g);
    const double r0 = 1.025 - (a_[1] * L + a_[2] * L * L);
    const double r1 = -0.25 - (a_[1] + 2.0 * a_[2] * L);
    const double r2 = (-17.8 - 2.8 * g) - 2.0 * a_[2];
    a_[3] = (20.0 * r0 - 8.0 * r1 * L + r2 * L * L) / (2.0 * L * L * L);
    a_[4] = (-30.0 * r0 + 14.0 * r1 * L - 2.0 * r2 * L * L) / (2.0 * L * L * L * L);
    a_[5] = (12.0 * r0 - 6.0 * r1 * L + r2 * L * L) / (2.0 * L * L * L * L * L);
}

double BumpProfile::operator()(double t) const {
    if (t >= kKnee) return 1.0 + 0.25 * (1.0 - t);
    return t * (a_[1] + t * (a_[2] + t * (a_[3] + t * (a_[4] + t * a_[5]))));
}

double BumpProfile::derivative(double t) const {
    if (t >= kKnee) return -0.25;
    return a_[1] + t * (2.0 * a_[2] + t * (3.0 * a_[3] + t * (4.0 * a_[4] + t * 5.0 * a_[5])));
}

BumpCheck check_bump(const BumpProfile& phi, std::size_t samples) {
    BumpCheck c{phi(0.0), phi(0.0), phi.derivative(0.0), phi.derivative(0.0)};
    for (std::size_t k = 1; k <= samples; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(samples);
        const double y = phi(t);
        const double d = phi.derivative(t);
        c.min_value = std::min(c.min_value, y);
        c.max_value = std::max(c.max_value, y);
        c.min_slope = std::min(c.min_slope, d);
        c.max_slope = std::max(c.max_slope, d);
    }
    return c;
}

// --- map -----------------------------------------------------------------------

namespace {

constexpr long kLogTable = 4096;
constexpr long kMaxPiece = 1L << 60;

double log_f(double n) {
    const double l = std::log(n);
    return 1.0 / (n * l * l);
}

/// Euler-Maclaurin tail of sum_{m >= n} 1 / (m log^2 m).
double log_tail_asymptotic(double n) {
    const double l = std::log(n);
    const double fp = -(l + 2.0) / (n * n * l * l * l);
    return 1.0 / l + 0.5 * log_f(n) - fp / 12.0;
}

}  // namespace

CounterexampleMap::CounterexampleMap(CounterexampleVariant variant) : variant_(variant) {
    if (variant_ == CounterexampleVariant::quadratic) {
        gamma_ = 0.5 / boost::math::trigamma(10.0);
    } else {
        log_suffix_.assign(kLogTable + 1, 0.0);
        log_suffix_[kLogTable] = log_tail_asymptotic(static_cast<double>(kLogTable));
        for (long n = kLogTable - 1; n >= kLogOffset; --n)
            log_suffix_[n] = log_f(static_cast<double>(n)) + log_suffix_[n + 1];
        gamma_ = 0.5 / log_suffix_[kLogOffset];
    }

    constexpr long kChecked = 2000;
    for (long i = 0; i < kChecked; ++i) {
        const double r = beta(i + 1) / beta(i);
        const double g = gbar(i);
        std::ostringstream os;
        if (!(r >= 2.0 / 3.0)) {
            os << "beta ratio " << r << " < 2/3 at i = " << i;
            throw ConstructionError(os.str());
        }
        if (!(g > 0.0 && g < 0.5)) {
            os << "slope-matching parameter " << g << " outside (0, 1/2) at i = " << i;
            throw ConstructionError(os.str());
        }
        const BumpCheck c = check_bump(BumpProfile(g), 512);
        const double drop = 1.0 - r;
        if (c.min_value < -0.25 || c.max_value > 1.25 || drop * c.max_slope > 0.5 || drop * c.min_slope < -0.5 ||
            !(r + drop * c.min_value > 0.0)) {
            os << "profile on piece " << i << " violates the slope or positivity bounds";
            throw ConstructionError(os.str());
        }
    }
}

long CounterexampleMap::offset() const noexcept {
    return variant_ == CounterexampleVariant::quadratic ? 10 : kLogOffset;
}

double CounterexampleMap::f(double n) const {
    return variant_ == CounterexampleVariant::quadratic ? 1.0 / (n * n) : log_f(n);
}

double CounterexampleMap::tail(double n) const {
    if (n < static_cast<double>(kLogTable)) return log_suffix_[static_cast<std::size_t>(n)];
    return log_tail_asymptotic(n);
}

double CounterexampleMap::beta(long i) const {
    if (i < 0) throw DomainError("counterexample: negative index");
    return gamma_ * f(static_cast<double>(i + offset()));
}

double CounterexampleMap::alpha(long i) const {
    if (i < 0) throw DomainError("counterexample: negative index");
    const double n = static_cast<double>(i + offset());
    if (variant_ == CounterexampleVariant::quadratic) return gamma_ * boost::math::trigamma(n);
    return gamma_ * tail(n);
}

namespace {

/// beta_i - beta_{i+1} without cancellation for the quadratic variant.
double beta_drop(const CounterexampleMap& c, long i) {
    if (c.variant() == CounterexampleVariant::quadratic) {
        const double n = static_cast<double>(i + c.offset());
        return c.gamma() * (2.0 * n + 1.0) / (n * n * (n + 1.0) * (n + 1.0));
    }
    return c.beta(i) - c.beta(i + 1);
}

struct Piece {
    double left;  ///< alpha_{i+1}
    double width;  ///< beta_i
    double floor;  ///< beta_{i+1}
    double drop;   ///< beta_i - beta_{i+1}
    BumpProfile phi;
};

Piece make_piece(const CounterexampleMap& c, long i) {
    return {c.alpha(i + 1), c.beta(i), c.beta(i + 1), beta_drop(c, i), BumpProfile(c.gbar(i))};
}

double piece_t(const Piece& p, double x) { return std::clamp((x - p.left) / p.width, 0.0, 1.0); }

}  // namespace

double CounterexampleMap::gbar(long i) const {
    const double b0 = beta(i);
    const double b1 = beta(i + 1);
    return b0 * beta_drop(*this, i + 1) / (4.0 * b1 * beta_drop(*this, i));
}

long CounterexampleMap::piece(double x) const {
    if (!(x > 0.0) || x > 0.5) throw DomainError("counterexample: piece lookup needs x in (0, 1/2]");
    if (x <= alpha(kMaxPiece)) return kMaxPiece;
    long lo = 0, hi = 1;
    while (alpha(hi) >= x) {
        lo = hi;
        hi *= 2;
    }
    // alpha(lo) >= x > alpha(hi)
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (alpha(mid) >= x)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double CounterexampleMap::s(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 0.5) return beta(0) - beta_drop(*this, 0) / (4.0 * beta(0)) * (x - 0.5);
    const long i = piece(x);
    if (i >= kMaxPiece) return x * beta(kMaxPiece) / alpha(kMaxPiece);
    return x - t_on_piece(i, x);
}

double CounterexampleMap::t_prime(double x) const {
    if (x <= 0.0) return 1.0;
    if (x >= 0.5) return t_prime_at_anchor(0);
    const long i = piece(x);
    if (i >= kMaxPiece) return 1.0;
    return t_prime_on_piece(i, x);
}

double CounterexampleMap::t_on_piece(long i, double x) const {
    const Piece p = make_piece(*this, i);
    return x - (p.floor + p.drop * p.phi(piece_t(p, x)));
}

double CounterexampleMap::t_prime_on_piece(long i, double x) const {
    const Piece p = make_piece(*this, i);
    return 1.0 - p.drop / p.width * p.phi.derivative(piece_t(p, x));
}

double CounterexampleMap::t_prime_at_anchor(long i) const { return 1.0 + beta_drop(*this, i) / (4.0 * beta(i)); }

MonotoneMap CounterexampleMap::as_map(Interval domain) const {
    if (domain.lo < 0.0 || domain.hi > 1.0 || !(domain.hi > domain.lo))
        throw DomainError("counterexample map lives on [0, 1]");
    const CounterexampleMap self = *this;
    return MonotoneMap::explicit_map(
        domain, [self](double x) { return self.t(x); }, [self](double x) { return self.t_prime(x); });
}

BumpCheck CounterexampleMap::profile_extremes(long pieces) const {
    BumpCheck out = check_bump(BumpProfile(gbar(0)), 1024);
    for (long i = 1; i < pieces; ++i) {
        const BumpCheck c = check_bump(BumpProfile(gbar(i)), 1024);
        out.min_value = std::min(out.min_value, c.min_value);
        out.max_value = std::max(out.max_value, c.max_value);
        out.min_slope = std::min(out.min_slope, c.min_slope);
        out.max_slope = std::max(out.max_slope, c.max_slope);
    }
    return out;
}

CounterexampleMap build_counterexample(CounterexampleVariant variant) { return CounterexampleMap(variant); }

// --- probes --------------------------------------------------------------------

GrowthTable probe_velocity_growth(const CounterexampleMap& cmap, long i_max, double threshold) {
    if (i_max < 1) throw DomainError("probe_velocity_growth: i_max must be positive");
    GrowthTable table;
    table.variant = cmap.variant();
    table.i_max = i_max;
    table.threshold = threshold;

    std::set<long> keep;
    for (long i = 0; i < std::min(10L, i_max + 1); ++i) keep.insert(i);
    for (int k = 10; ; ++k) {
        const long i = std::lround(std::pow(10.0, k / 10.0));
        if (i > i_max) break;
        keep.insert(i);
    }
    keep.insert(i_max);

    double product = 1.0;
    double bound = 0.0;
    bool have_ratio = false;
    for (long i = 0; i <= i_max; ++i) {
        if (product < bound) table.lower_bound_holds = false;
        if (!table.first_exceeding && product > threshold) table.first_exceeding = i;
        const double beta_i = cmap.beta(i);
        const double drop = beta_drop(cmap, i);
        const double tp = 1.0 + drop / (4.0 * beta_i);
        if (keep.count(i)) {
            GrowthRow row;
            row.i = i;
            row.alpha = cmap.alpha(i);
            row.beta = beta_i;
            row.t_prime = tp;
            row.product = product;
            row.lower_bound = bound;
            row.log_bound = 1.0 / row.alpha - 2.0 * std::log(row.alpha);
            if (i >= 10) {
                const double ratio = product / row.log_bound;
                table.min_log_ratio = have_ratio ? std::min(table.min_log_ratio, ratio) : ratio;
                have_ratio = true;
            }
            table.rows.push_back(row);
        }
        const double next = product * tp;
        if (!(next > product)) table.strictly_increasing = false;
        product = next;
        bound += 0.25 * drop / beta_i;
    }
    return table;
}

IntegrabilityTable probe_non_integrability(const CounterexampleMap& cmap, int decades) {
    if (decades < 1 || decades > 6) throw DomainError("probe_non_integrability: decades must be in 1..6");
    IntegrabilityTable table;
    table.variant = cmap.variant();

    // time-normalized affine seed on [T(1/2), 1/2] from the generic builder
    VelocityOptions opts;
    opts.i_max = 64;
    SeedSpec seed_spec;
    seed_spec.alpha0 = 0.5;
    const VelocityField1D field = build_field(cmap.as_map({0.0, 0.5}), seed_spec, opts);
    const auto pb = field.pull_to_seed(0.5);
    if (!pb) throw ConstructionError("counterexample: 1/2 is not in a moving interval");
    const IntervalField seed = field.pieces()[pb->interval];
    auto v = [&seed](double z) { return seed.time_scale * seed.raw_seed(z); };
    table.v_half = v(0.5);

    // Gauss-Legendre panels on the seed, halving in width towards both anchors
    using GL = boost::math::quadrature::gauss<double, 8>;
    const double a = cmap.alpha(1);
    const double b = cmap.alpha(0);
    const double half = 0.5 * (b - a);
    std::vector<double> z, w;
    auto panel = [&](double lo, double hi) {
        const double c = 0.5 * (lo + hi);
        const double r = 0.5 * (hi - lo);
        for (std::size_t k = 0; k < GL::abscissa().size(); ++k) {
            z.push_back(c - r * GL::abscissa()[k]);
            w.push_back(r * GL::weights()[k]);
            z.push_back(c + r * GL::abscissa()[k]);
            w.push_back(r * GL::weights()[k]);
        }
    };
    constexpr int kLevels = 40;
    for (int k = 0; k < kLevels; ++k) {
        const double outer = half * std::ldexp(1.0, -k);
        const double inner = k + 1 == kLevels ? 0.0 : 0.5 * outer;
        panel(a + inner, a + outer);
        panel(b - outer, b - inner);
    }
    std::vector<double> speed(z.size()), slope(z.size(), 1.0);
    for (std::size_t k = 0; k < z.size(); ++k) speed[k] = std::abs(v(z[k]));

    std::vector<long> marks;
    for (int k = 2; k <= 2 * decades + 2; ++k) marks.push_back(std::lround(std::pow(10.0, k / 2.0)));
    const long j_max = marks.back();

    double l1 = 0.0, osgood = 0.0, beta_sum = 0.0;
    double anchor = std::abs(table.v_half);
    std::size_t next_mark = 0;
    for (long j = 0; j <= j_max; ++j) {
        if (j == marks[next_mark]) {
            IntegrabilityRow row;
            row.j = j;
            row.delta = cmap.alpha(j);
            row.l1 = l1;
            row.osgood = osgood;
            row.beta_sum = beta_sum;
            row.v_anchor = anchor;
            if (!table.rows.empty() && !(row.l1 > table.rows.back().l1)) table.l1_strictly_increasing = false;
            table.max_osgood_defect = std::max(table.max_osgood_defect, std::abs(osgood - static_cast<double>(j)));
            table.rows.push_back(row);
            if (++next_mark == marks.size()) break;
        }
        // orbit interval j: integrals pulled back to the seed
        double lj = 0.0, oj = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            lj += w[k] * speed[k] * slope[k] * slope[k];
            oj += w[k] / speed[k];
        }
        l1 += lj;
        osgood += oj;
        beta_sum += cmap.beta(j) * anchor;

        const Piece p = make_piece(cmap, j);
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double t = piece_t(p, z[k]);
            slope[k] *= 1.0 - p.drop / p.width * p.phi.derivative(t);
            z[k] -= p.floor + p.drop * p.phi(t);
        }
        const double next_anchor = anchor * cmap.t_prime_at_anchor(j);
        if (!(next_anchor > anchor)) table.anchors_strictly_increasing = false;
        anchor = next_anchor;
    }

    // decade increments of the L1 mass
    std::vector<double> per_decade;
    for (std::size_t r = 0; r + 2 < table.rows.size(); r += 2) per_decade.push_back(table.rows[r + 2].l1 - table.rows[r].l1);
    for (std::size_t d = 1; d < per_decade.size(); ++d)
        if (per_decade[d] < 0.5 * per_decade[d - 1]) table.no_plateau = false;
    return table;
}

void write_growth_csv(std::ostream& out, const GrowthTable& table) {
    out << "i,alpha,beta,Tp,P,lower_bound,log_bound\n";
    out.precision(17);
    for (const GrowthRow& r : table.rows)
        out << r.i << ',' << r.alpha << ',' << r.beta << ',' << r.t_prime << ',' << r.product << ','
            << r.lower_bound << ',' << r.log_bound << '\n';
}

void write_integrability_csv(std::ostream& out, const IntegrabilityTable& table) {
    out << "j,delta,l1,osgood,beta_sum,v_anchor\n";
    out.precision(17);
    for (const IntegrabilityRow& r : table.rows)
        out << r.j << ',' << r.delta << ',' << r.l1 << ',' << r.osgood << ',' << r.beta_sum << ',' << r.v_anchor
            << '\n';
}

}  // namespace transflow
