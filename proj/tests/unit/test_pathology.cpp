#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "transflow/errors.hpp"
#include "transflow/pathology.hpp"

using transflow::BumpProfile;
using transflow::CounterexampleMap;
using transflow::CounterexampleVariant;

namespace {

double log_squared_gamma_oracle() {
    constexpr long n_cut = 1'000'000;
    auto f = [](double n) { return 1.0 / (n * std::log(n) * std::log(n)); };
    double sum = 0.0;
    for (long n = n_cut - 1; n >= CounterexampleMap::kLogOffset; --n) sum += f(static_cast<double>(n));
    const double n = n_cut;
    const double l = std::log(n);
    const double fprime = -(l * l + 2.0 * l) / (n * n * l * l * l * l);
    sum += 1.0 / l + 0.5 * f(n) - fprime / 12.0;
    return 0.5 / sum;
}

}  // namespace

TEST_SUITE("pathology") {
    TEST_CASE("bump profile boundary data") {
        for (double g : {0.2, 0.25, 0.3}) {
            const BumpProfile phi(g);
            CHECK(std::abs(phi(0.0)) < 1e-15);
            CHECK(phi(1.0) == doctest::Approx(1.0));
            CHECK(phi.derivative(0.0) == doctest::Approx(-g));
            CHECK(phi.derivative(0.95) == doctest::Approx(-0.25));
            CHECK(phi(0.95) == doctest::Approx(1.0 + 0.05 / 4.0));
            const double h = 1e-6;
            for (double t : {0.1, 0.5, 0.89}) {
                CHECK(phi.derivative(t) == doctest::Approx((phi(t + h) - phi(t - h)) / (2 * h)).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("quadratic gamma sums to one half") {
        const CounterexampleMap c(CounterexampleVariant::quadratic);
        double head = 0.0;
        for (int k = 1; k <= 9; ++k) head += 1.0 / (k * k);
        const double trigamma10 = std::numbers::pi * std::numbers::pi / 6.0 - head;
        CHECK(c.gamma() == doctest::Approx(0.5 / trigamma10).epsilon(1e-12));
        CHECK(c.alpha(0) == 0.5);
        CHECK(c.beta(3) == doctest::Approx(c.gamma() / 169.0));
        CHECK(c.alpha(1000) == doctest::Approx(c.gamma() * (1.0 / 1009.5)).epsilon(1e-4));
    }

    TEST_CASE("log squared gamma sums to one half") {
        const CounterexampleMap c(CounterexampleVariant::log_squared);
        CHECK(c.gamma() == doctest::Approx(log_squared_gamma_oracle()).epsilon(1e-9));
        const double n = 100.0 + CounterexampleMap::kLogOffset;
        CHECK(c.beta(100) == doctest::Approx(c.gamma() / (n * std::log(n) * std::log(n))));
    }

    TEST_CASE("map moves anchors along the orbit") {
        for (auto var : {CounterexampleVariant::quadratic, CounterexampleVariant::log_squared}) {
            const CounterexampleMap c(var);
            for (long i : {0L, 1L, 7L, 50L, 1000L}) {
                CHECK(c.t(c.alpha(i)) == doctest::Approx(c.alpha(i + 1)).epsilon(1e-12));
                const double expected = 1.0 + (c.beta(i) - c.beta(i + 1)) / (4.0 * c.beta(i));
                CHECK(c.t_prime_at_anchor(i) == doctest::Approx(expected).epsilon(1e-12));
                CHECK(c.t_prime(c.alpha(i)) == doctest::Approx(expected).epsilon(1e-9));
            }
            const double x = 0.5 * (c.alpha(4) + c.alpha(5));
            CHECK(c.piece(x) == 4);
            const double h = 1e-8;
            CHECK(c.t_prime(x) == doctest::Approx((c.t(x + h) - c.t(x - h)) / (2 * h)).epsilon(1e-6));
            const auto ext = c.profile_extremes(200);
            CHECK(ext.min_slope < 0.0);
            for (long i : {0L, 3L, 40L}) {
                for (int k = 0; k <= 64; ++k) {
                    const double y = c.alpha(i + 1) + (c.alpha(i) - c.alpha(i + 1)) * k / 64.0;
                    CHECK(c.t_prime_on_piece(i, y) > 0.0);
                }
            }
        }
    }

    TEST_CASE("growth products increase above the lower bound") {
        const CounterexampleMap c(CounterexampleVariant::quadratic);
        const auto g = transflow::probe_velocity_growth(c, 20000);
        CHECK(g.strictly_increasing);
        CHECK(g.lower_bound_holds);
        CHECK(g.rows.back().i == 20000);
        for (std::size_t k = 1; k < g.rows.size(); ++k) CHECK(g.rows[k].product > g.rows[k - 1].product);
        const auto low = transflow::probe_velocity_growth(c, 20000, 2.0);
        REQUIRE(low.first_exceeding.has_value());
        CHECK(*low.first_exceeding > 0);
    }

    TEST_CASE("log squared field is not integrable") {
        const CounterexampleMap c(CounterexampleVariant::log_squared);
        const auto t = transflow::probe_non_integrability(c, 2);
        CHECK(t.l1_strictly_increasing);
        CHECK(t.anchors_strictly_increasing);
        CHECK(t.max_osgood_defect < 1e-8);
        REQUIRE(t.rows.size() >= 2);
        for (const auto& r : t.rows) CHECK(r.osgood == doctest::Approx(static_cast<double>(r.j)).epsilon(1e-9));
        CHECK(t.rows.back().l1 > t.rows.front().l1);
    }

    TEST_CASE("csv tables") {
        const CounterexampleMap c(CounterexampleVariant::quadratic);
        std::ostringstream g;
        transflow::write_growth_csv(g, transflow::probe_velocity_growth(c, 100));
        CHECK(g.str().rfind("i,alpha,beta,Tp,P,lower_bound,log_bound\n", 0) == 0);
        std::ostringstream it;
        transflow::write_integrability_csv(it, transflow::probe_non_integrability(c, 1));
        CHECK(it.str().rfind("j,delta,l1,osgood,beta_sum,v_anchor\n", 0) == 0);
    }

    TEST_CASE("variant names") {
        CHECK(transflow::to_string(CounterexampleVariant::log_squared) == "log_squared");
        CHECK(transflow::parse_counterexample_variant("quadratic") == CounterexampleVariant::quadratic);
        CHECK_THROWS_AS((void)transflow::parse_counterexample_variant("cubic"), transflow::ParseError);
    }
}
