#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "transflow/monotone_map.hpp"

namespace transflow {

enum class CounterexampleVariant { quadratic, log_squared };

[[nodiscard]] std::string to_string(CounterexampleVariant v);
/// "quadratic" | "log_squared"; throws ParseError otherwise.
[[nodiscard]] CounterexampleVariant parse_counterexample_variant(const std::string& text);

/// Transition profile on [0, 1]: a quintic on [0, 9/10] followed by the line
/// 1 + (1 - t) / 4. phi(0) = 0, phi'(0) = -g, phi(1) = 1, phi' = -1/4 on [9/10, 1].
class BumpProfile {
public:
    explicit BumpProfile(double g);

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double derivative(double t) const;
    [[nodiscard]] double g() const noexcept { return g_; }

    static constexpr double kKnee = 0.9;

private:
    double g_;
    double a_[6];
};

struct BumpCheck {
    double min_value = 0.0;
    double max_value = 0.0;
    double min_slope = 0.0;
    double max_slope = 0.0;
};

/// Sampled range and slope of a profile on [0, 1].
[[nodiscard]] BumpCheck check_bump(const BumpProfile& phi, std::size_t samples = 4096);

/// Map T(x) = x - S(x) on [0, 1] with T(alpha_i) = alpha_{i+1}, alpha_0 = 1/2,
/// alpha_{i+1} = alpha_i - beta_i and sum beta_i = 1/2, whose product of slopes
/// along the orbit of 1/2 diverges.
///   quadratic:   beta_i = gamma / (i + 10)^2
///   log_squared: beta_i = gamma / (n log^2 n), n = i + offset()
class CounterexampleMap {
public:
    static constexpr long kLogOffset = 5;

    /// Throws ConstructionError when a slope-matching parameter reaches 1/2 or a
    /// profile leaves its admissible range.
    explicit CounterexampleMap(CounterexampleVariant variant);

    [[nodiscard]] CounterexampleVariant variant() const noexcept { return variant_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    /// Index shift n = i + offset in the closed form of beta_i.
    [[nodiscard]] long offset() const noexcept;

    [[nodiscard]] double beta(long i) const;
    [[nodiscard]] double alpha(long i) const;
    /// Slope-matching parameter of the profile used on [alpha_{i+1}, alpha_i].
    [[nodiscard]] double gbar(long i) const;
    /// i with alpha_{i+1} <= x <= alpha_i, for x in (0, 1/2].
    [[nodiscard]] long piece(double x) const;

    [[nodiscard]] double s(double x) const;
    [[nodiscard]] double t(double x) const { return x - s(x); }
    [[nodiscard]] double t_prime(double x) const;
    /// T and T' for x known to lie on piece i.
    [[nodiscard]] double t_on_piece(long i, double x) const;
    [[nodiscard]] double t_prime_on_piece(long i, double x) const;
    /// T'(alpha_i) = 1 + (beta_i - beta_{i+1}) / (4 beta_i).
    [[nodiscard]] double t_prime_at_anchor(long i) const;

    /// T restricted to `domain` (a subinterval of [0, 1]) as a MonotoneMap.
    [[nodiscard]] MonotoneMap as_map(Interval domain = {0.0, 1.0}) const;

    /// Largest profile slope, smallest profile slope and the extreme profile values
    /// over the first `pieces` pieces (the parameters converge to 1/4).
    [[nodiscard]] BumpCheck profile_extremes(long pieces = 2000) const;

private:
    double f(double n) const;  ///< beta as a function of the shifted index
    double tail(double n) const;  ///< sum of f(m) for m >= n (log_squared)

    CounterexampleVariant variant_;
    double gamma_ = 0.0;
    std::vector<double> log_suffix_;  ///< suffix sums of f for shifted index < kLogTable
};

[[nodiscard]] CounterexampleMap build_counterexample(CounterexampleVariant variant);

struct GrowthRow {
    long i = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double t_prime = 0.0;  ///< T'(alpha_i)
    double product = 1.0;  ///< P_i = prod_{j<i} T'(alpha_j)
    double lower_bound = 0.0;  ///< sum_{j<i} (1 - beta_{j+1}/beta_j) / 4
    double log_bound = 0.0;  ///< 1/alpha_i - 2 log(alpha_i)
};

struct GrowthTable {
    CounterexampleVariant variant = CounterexampleVariant::quadratic;
    long i_max = 0;
    std::vector<GrowthRow> rows;  ///< i = 0..9, then about ten rows per decade, then i_max
    bool strictly_increasing = true;  ///< over every i <= i_max, not only the stored rows
    bool lower_bound_holds = true;
    double min_log_ratio = 0.0;  ///< min over rows with i >= 10 of product / log_bound
    std::optional<long> first_exceeding;  ///< first i with P_i > threshold
    double threshold = 1e3;
};

/// Products of T' along the orbit of 1/2, checked at every index up to i_max.
[[nodiscard]] GrowthTable probe_velocity_growth(const CounterexampleMap& cmap, long i_max,
                                                double threshold = 1e3);

struct IntegrabilityRow {
    long j = 0;             ///< number of orbit intervals between delta and 1/2
    double delta = 0.0;     ///< alpha_j
    double l1 = 0.0;        ///< integral of |v| over (alpha_j, 1/2)
    double osgood = 0.0;    ///< integral of 1/|v| over (alpha_j, 1/2)
    double beta_sum = 0.0;  ///< sum_{k<j} beta_k P_k |v(1/2)|
    double v_anchor = 0.0;  ///< |v(alpha_j)|
};

struct IntegrabilityTable {
    CounterexampleVariant variant = CounterexampleVariant::quadratic;
    double v_half = 0.0;  ///< v(1/2) of the time-normalized affine seed
    std::vector<IntegrabilityRow> rows;
    bool l1_strictly_increasing = true;
    bool anchors_strictly_increasing = true;  ///< |v(alpha_j)| over every j
    bool no_plateau = true;  ///< each decade adds at least half the previous decade's L1 mass
    double max_osgood_defect = 0.0;  ///< max |osgood - j|
};

/// Velocity for mu0 = uniform[0, 1/2] and mu1 = T#mu0, seeded affinely on
/// [T(1/2), 1/2]; integrals over orbit intervals are pulled back to the seed.
/// Rows at j = 10^(k/2) for k = 2..2*decades+2.
[[nodiscard]] IntegrabilityTable probe_non_integrability(const CounterexampleMap& cmap, int decades = 4);

/// CSV columns i,alpha,beta,Tp,P,lower_bound,log_bound.
void write_growth_csv(std::ostream& out, const GrowthTable& table);
/// CSV columns j,delta,l1,osgood,beta_sum,v_anchor.
void write_integrability_csv(std::ostream& out, const IntegrabilityTable& table);

}  // namespace transflow
