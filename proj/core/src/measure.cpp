#include "transflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "transflow/errors.hpp"

namespace transflow {
namespace {

using numerics::ScalarFn;

class UniformModel final : public detail::MeasureModel {
public:
    UniformModel(double a, double b) : a_(a), b_(b) {}

    std::string kind() const override { return "uniform"; }
    Interval support() const override { return {a_, b_}; }
    Interval window() const override { return {a_, b_}; }
    double density(double x) const override {
        return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
    }
    double cdf(double x) const override {
        if (x <= a_) return 0.0;
        if (x >= b_) return 1.0;
        return (x - a_) / (b_ - a_);
    }
    double ccdf(double x) const override {
        if (x <= a_) return 1.0;
        if (x >= b_) return 0.0;
        return (b_ - x) / (b_ - a_);
    }
    double quantile(double p) const override { return a_ + p * (b_ - a_); }
    double quantile_upper(double q) const override { return b_ - q * (b_ - a_); }

private:
    double a_;
    double b_;
};

class GaussianModel final : public detail::MeasureModel {
public:
    GaussianModel(double mean, double sigma, double tail_eps)
        : mean_(mean), sigma_(sigma), tail_eps_(tail_eps) {}

    std::string kind() const override { return "gaussian"; }
    Interval support() const override { return {-kInf, kInf}; }
    Interval window() const override { return {quantile(tail_eps_), quantile_upper(tail_eps_)}; }
    double density(double x) const override {
        const double z = (x - mean_) / sigma_;
        return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
    }
    double cdf(double x) const override {
        return 0.5 * std::erfc(-(x - mean_) / (sigma_ * std::numbers::sqrt2));
    }
    double ccdf(double x) const override {
        return 0.5 * std::erfc((x - mean_) / (sigma_ * std::numbers::sqrt2));
    }
    double quantile(double p) const override {
        if (p <= 0.0) return -kInf;
        if (p >= 1.0) return kInf;
        if (p > 0.5) return quantile_upper(1.0 - p);
        return mean_ - sigma_ * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    }
    double quantile_upper(double q) const override {
        if (q <= 0.0) return kInf;
        if (q >= 1.0) return -kInf;
        if (q > 0.5) return quantile(1.0 - q);
        return mean_ + sigma_ * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
    }

private:
    double mean_;
    double sigma_;
    double tail_eps_;
};

class AffineImageModel final : public detail::MeasureModel {
public:
    AffineImageModel(Measure1D base, double alpha, double beta)
        : base_(std::move(base)), alpha_(alpha), beta_(beta) {}

    std::string kind() const override { return "affine_image"; }
    Interval support() const override { return map(base_.support()); }
    Interval window() const override { return map(base_.window()); }
    double density(double y) const override { return alpha_ * base_.density(pull(y)); }
    double cdf(double y) const override { return base_.cdf(pull(y)); }
    double ccdf(double y) const override { return base_.ccdf(pull(y)); }
    double quantile(double p) const override { return push(base_.quantile(p)); }
    double quantile_upper(double q) const override { return push(base_.quantile_upper(q)); }

private:
    double push(double x) const { return x / alpha_ + beta_; }
    double pull(double y) const { return alpha_ * (y - beta_); }
    Interval map(Interval i) const { return {push(i.lo), push(i.hi)}; }

    Measure1D base_;
    double alpha_;
    double beta_;
};

/// Exact CDF/quantile for a piecewise-linear density (quadratic per cell).
class PiecewiseLinearModel final : public detail::MeasureModel {
public:
    PiecewiseLinearModel(std::string kind, std::vector<double> x, std::vector<double> d)
        : kind_(std::move(kind)), x_(std::move(x)), d_(std::move(d)) {
        const std::size_t n = x_.size();
        left_.assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i)
            left_[i + 1] = left_[i] + cell_mass(i);
        right_.assign(n, 0.0);
        for (std::size_t i = n - 1; i > 0; --i)
            right_[i - 1] = right_[i] + cell_mass(i - 1);
    }

    double total() const { return left_.back(); }

    std::string kind() const override { return kind_; }
    Interval support() const override { return {x_.front(), x_.back()}; }
    Interval window() const override { return support(); }

    double density(double x) const override {
        if (x < x_.front() || x > x_.back()) return 0.0;
        const std::size_t i = cell(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        return d_[i] + t * (d_[i + 1] - d_[i]);
    }
    double cdf(double x) const override {
        if (x <= x_.front()) return 0.0;
        if (x >= x_.back()) return 1.0;
        const std::size_t i = cell(x);
        return std::min(1.0, left_[i] + partial_from_left(i, x - x_[i]));
    }
    double ccdf(double x) const override {
        if (x <= x_.front()) return 1.0;
        if (x >= x_.back()) return 0.0;
        const std::size_t i = cell(x);
        return std::min(1.0, right_[i + 1] + partial_from_right(i, x_[i + 1] - x));
    }
    double quantile(double p) const override {
        if (p <= 0.0) return x_.front();
        if (p >= 1.0) return x_.back();
        auto it = std::upper_bound(left_.begin(), left_.end(), p);
        std::size_t i = static_cast<std::size_t>(std::distance(left_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        const double slope = (d_[i + 1] - d_[i]) / h;
        const double t = solve_quadratic(0.5 * slope, d_[i], p - left_[i]);
        return std::clamp(x_[i] + t, x_[i], x_[i + 1]);
    }
    double quantile_upper(double q) const override {
        if (q <= 0.0) return x_.back();
        if (q >= 1.0) return x_.front();
        // right_ is nonincreasing in the index
        std::size_t i = 0;
        {
            std::size_t lo = 0, hi = x_.size() - 1;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                if (right_[mid] > q)
                    lo = mid;
                else
                    hi = mid;
            }
            i = lo;
        }
        const double h = x_[i + 1] - x_[i];
        const double slope = (d_[i] - d_[i + 1]) / h;  // measured leftwards from x_{i+1}
        const double s = solve_quadratic(0.5 * slope, d_[i + 1], q - right_[i + 1]);
        return std::clamp(x_[i + 1] - s, x_[i], x_[i + 1]);
    }

private:
    double cell_mass(std::size_t i) const { return 0.5 * (d_[i] + d_[i + 1]) * (x_[i + 1] - x_[i]); }

    std::size_t cell(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
        return std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
    }
    double partial_from_left(std::size_t i, double t) const {
        const double slope = (d_[i + 1] - d_[i]) / (x_[i + 1] - x_[i]);
        return t * (d_[i] + 0.5 * slope * t);
    }
    double partial_from_right(std::size_t i, double s) const {
        const double slope = (d_[i] - d_[i + 1]) / (x_[i + 1] - x_[i]);
        return s * (d_[i + 1] + 0.5 * slope * s);
    }
    /// Nonnegative root of a t^2 + b t = c with b >= 0, c >= 0, in the stable form.
    static double solve_quadratic(double a, double b, double c) {
        if (c <= 0.0) return 0.0;
        const double disc = b * b + 4.0 * a * c;
        const double root = std::sqrt(std::max(0.0, disc));
        const double denom = b + root;
        if (denom <= 0.0) return 0.0;
        return 2.0 * c / denom;
    }

    std::string kind_;
    std::vector<double> x_;
    std::vector<double> d_;
    std::vector<double> left_;
    std::vector<double> right_;
};

/// General continuous density on a bounded interval, CDF tabulated per cell.
class TabulatedModel final : public detail::MeasureModel {
public:
    TabulatedModel(ScalarFn density, Interval support, bool normalize, std::size_t cells)
        : f_(std::move(density)), support_(support) {
        const std::size_t n = std::max<std::size_t>(cells, 1);
        nodes_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            nodes_[i] = support_.lo + support_.width() * static_cast<double>(i) / static_cast<double>(n);
        nodes_.back() = support_.hi;
        left_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            left_[i + 1] = left_[i] + numerics::integrate(f_, nodes_[i], nodes_[i + 1], 1e-13);
        const double mass = left_.back();
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw InvalidMeasureError("density has no positive finite mass on the support");
        if (normalize) {
            scale_ = 1.0 / mass;
        } else if (std::abs(mass - 1.0) > 1e-8) {
            std::ostringstream os;
            os << "density integrates to " << mass << ", expected 1";
            throw InvalidMeasureError(os.str());
        }
        for (double& c : left_) c *= scale_;
    }

    std::string kind() const override { return "function"; }
    Interval support() const override { return support_; }
    Interval window() const override { return support_; }
    double density(double x) const override {
        if (!support_.contains(x)) return 0.0;
        return scale_ * f_(x);
    }
    double cdf(double x) const override {
        if (x <= support_.lo) return 0.0;
        if (x >= support_.hi) return 1.0;
        const std::size_t i = cell(x);
        const double part = scale_ * numerics::integrate(f_, nodes_[i], x, 1e-13);
        return std::clamp(left_[i] + part, 0.0, 1.0);
    }
    double ccdf(double x) const override {
        if (x <= support_.lo) return 1.0;
        if (x >= support_.hi) return 0.0;
        const std::size_t i = cell(x);
        const double part = scale_ * numerics::integrate(f_, x, nodes_[i + 1], 1e-13);
        return std::clamp((left_.back() - left_[i + 1]) + part, 0.0, 1.0);
    }
    double quantile(double p) const override {
        if (p <= 0.0) return support_.lo;
        if (p >= 1.0) return support_.hi;
        auto it = std::upper_bound(left_.begin(), left_.end(), p);
        std::size_t i = static_cast<std::size_t>(std::distance(left_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, nodes_.size() - 1) - 1;
        return numerics::invert_monotone([this](double x) { return cdf(x); }, p, nodes_[i],
                                         nodes_[i + 1], [this](double x) { return density(x); });
    }

private:
    std::size_t cell(double x) const {
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
        std::size_t i = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
        return std::clamp<std::size_t>(i, 1, nodes_.size() - 1) - 1;
    }

    ScalarFn f_;
    Interval support_;
    double scale_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> left_;
};

class PushforwardModel final : public detail::MeasureModel {
public:
    PushforwardModel(Measure1D base, ScalarFn map, ScalarFn derivative, ScalarFn inverse)
        : base_(std::move(base)), map_(std::move(map)), deriv_(std::move(derivative)),
          inverse_(std::move(inverse)) {}

    std::string kind() const override { return "pushforward"; }
    Interval support() const override {
        const Interval s = base_.support();
        return {s.lo > -kInf ? map_(s.lo) : -kInf, s.hi < kInf ? map_(s.hi) : kInf};
    }
    Interval window() const override {
        const Interval w = base_.window();
        return {map_(w.lo), map_(w.hi)};
    }
    double density(double y) const override {
        const Interval s = support();
        if (!s.contains(y)) return 0.0;
        const double x = inverse_(y);
        return base_.density(x) / deriv_(x);
    }
    double cdf(double y) const override {
        const Interval s = support();
        if (y <= s.lo) return 0.0;
        if (y >= s.hi) return 1.0;
        return base_.cdf(inverse_(y));
    }
    double ccdf(double y) const override {
        const Interval s = support();
        if (y <= s.lo) return 1.0;
        if (y >= s.hi) return 0.0;
        return base_.ccdf(inverse_(y));
    }
    double quantile(double p) const override { return map_(base_.quantile(p)); }
    double quantile_upper(double q) const override { return map_(base_.quantile_upper(q)); }

private:
    Measure1D base_;
    ScalarFn map_;
    ScalarFn deriv_;
    ScalarFn inverse_;
};

void validate_piecewise(const std::vector<double>& x, const std::vector<double>& d) {
    if (x.size() != d.size())
        throw InvalidMeasureError("piecewise density: 'x' and 'density' have different lengths");
    if (x.size() < 2) throw InvalidMeasureError("piecewise density: need at least two nodes");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i + 1] > x[i]) || !std::isfinite(x[i]) || !std::isfinite(x[i + 1]))
            throw InvalidMeasureError("piecewise density: nodes must be finite and strictly increasing");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] >= 0.0) || !std::isfinite(d[i]))
            throw InvalidMeasureError("piecewise density: negative or non-finite density value");
        if (i > 0 && i + 1 < d.size() && d[i] <= 0.0)
            throw InvalidMeasureError("piecewise density: density must be positive inside the support");
    }
}

}  // namespace

Measure1D::Measure1D(std::shared_ptr<const detail::MeasureModel> model) : model_(std::move(model)) {
    if (!model_) throw InvalidMeasureError("null measure model");
}

Measure1D Measure1D::uniform(double a, double b) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
        throw InvalidMeasureError("uniform: need finite a < b");
    return Measure1D(std::make_shared<UniformModel>(a, b));
}

Measure1D Measure1D::gaussian(double mean, double sigma, double tail_eps) {
    if (!(sigma > 0.0) || !std::isfinite(mean))
        throw InvalidMeasureError("gaussian: need finite mean and sigma > 0");
    if (!(tail_eps > 0.0 && tail_eps < 0.5))
        throw InvalidMeasureError("gaussian: tail_eps must lie in (0, 1/2)");
    return Measure1D(std::make_shared<GaussianModel>(mean, sigma, tail_eps));
}

Measure1D Measure1D::affine_image(const Measure1D& base, double alpha, double beta) {
    if (!(alpha > 0.0) || !std::isfinite(beta))
        throw InvalidMeasureError("affine_image: need alpha > 0 and finite beta");
    return Measure1D(std::make_shared<AffineImageModel>(base, alpha, beta));
}

Measure1D Measure1D::piecewise_linear(std::vector<double> x, std::vector<double> density) {
    validate_piecewise(x, density);
    auto model = std::make_shared<PiecewiseLinearModel>("piecewise", std::move(x), std::move(density));
    if (std::abs(model->total() - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "piecewise density integrates to " << model->total() << ", expected 1";
        throw InvalidMeasureError(os.str());
    }
    return Measure1D(std::move(model));
}

Measure1D Measure1D::grid(std::vector<double> x, std::vector<double> density) {
    validate_piecewise(x, density);
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        mass += 0.5 * (density[i] + density[i + 1]) * (x[i + 1] - x[i]);
    if (!(mass > 0.0)) throw InvalidMeasureError("grid density has zero mass");
    for (double& d : density) d /= mass;
    return Measure1D(std::make_shared<PiecewiseLinearModel>("grid", std::move(x), std::move(density)));
}

Measure1D Measure1D::from_density(numerics::ScalarFn density, Interval support, bool normalize,
                                  std::size_t cells) {
    if (!support.bounded() || !(support.hi > support.lo))
        throw InvalidMeasureError("from_density: support must be a bounded nonempty interval");
    return Measure1D(std::make_shared<TabulatedModel>(std::move(density), support, normalize, cells));
}

Measure1D Measure1D::pushforward(const Measure1D& base, numerics::ScalarFn map,
                                 numerics::ScalarFn derivative, numerics::ScalarFn inverse) {
    return Measure1D(std::make_shared<PushforwardModel>(base, std::move(map), std::move(derivative),
                                                        std::move(inverse)));
}

double Measure1D::density(double x) const { return model_->density(x); }
double Measure1D::cdf(double x) const { return model_->cdf(x); }
double Measure1D::ccdf(double x) const { return model_->ccdf(x); }

double Measure1D::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
    return model_->quantile(p);
}

double Measure1D::quantile_upper(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile_upper: q must lie in [0, 1]");
    return model_->quantile_upper(q);
}

DensityBounds Measure1D::density_bounds(Interval k) const {
    const Interval w = window();
    const double lo = std::max(k.lo, w.lo);
    const double hi = std::min(k.hi, w.hi);
    DensityBounds b{kInf, 0.0};
    constexpr int kSamples = 1024;
    for (int i = 0; i <= kSamples; ++i) {
        const double x = lo + (hi - lo) * i / kSamples;
        const double d = density(x);
        b.lower = std::min(b.lower, d);
        b.upper = std::max(b.upper, d);
    }
    return b;
}

Interval hull(const Interval& a, const Interval& b) noexcept {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

namespace {

/// Integrates f over [lo, hi] in `pieces` equal parts, with extra breaks.
double integrate_split(const ScalarFn& f, double lo, double hi, std::vector<double> breaks,
                       int pieces = 64) {
    for (int i = 1; i < pieces; ++i) breaks.push_back(lo + (hi - lo) * i / pieces);
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i] < lo || breaks[i + 1] > hi) continue;
        total += numerics::integrate(f, breaks[i], breaks[i + 1], 1e-12, 12);
    }
    return total;
}

}  // namespace

double wasserstein1(const Measure1D& m0, const Measure1D& m1) {
    const Interval w0 = m0.window();
    const Interval w1 = m1.window();
    const Interval h = hull(w0, w1);
    // left of the joint median the CDFs are small, right of it the survival functions are
    auto integrand = [&](double x) {
        if (m0.cdf(x) < 0.5 && m1.cdf(x) < 0.5) return std::abs(m0.cdf(x) - m1.cdf(x));
        return std::abs(m0.ccdf(x) - m1.ccdf(x));
    };
    return integrate_split(integrand, h.lo, h.hi, {w0.lo, w0.hi, w1.lo, w1.hi});
}

double l1_distance(const Measure1D& m0, const Measure1D& m1) {
    const Interval w0 = m0.window();
    const Interval w1 = m1.window();
    const Interval h = hull(w0, w1);
    auto integrand = [&](double x) { return std::abs(m0.density(x) - m1.density(x)); };
    return integrate_split(integrand, h.lo, h.hi, {w0.lo, w0.hi, w1.lo, w1.hi});
}

}  // namespace transflow
