#include <cmath>
#include <sstream>

#include <doctest.h>

#include "transflow/errors.hpp"
#include "transflow/flow.hpp"
#include "transflow/registry.hpp"

using transflow::FlowMap;
using transflow::Measure1D;

namespace {

FlowMap affine_flow() {
    return FlowMap(transflow::build_field(
        transflow::compute_monotone_map(Measure1D::uniform(1.0, 2.0), Measure1D::uniform(0.0, 3.0))));
}

}  // namespace

TEST_SUITE("flow") {
    TEST_CASE("affine flow is exponential") {
        const FlowMap phi = affine_flow();
        for (double t : {0.0, 0.25, 0.5, 1.0}) {
            for (double x : {1.0, 1.2, 1.5, 1.8, 2.0}) {
                CHECK(std::abs(phi(t, x) - (1.5 + std::pow(3.0, t) * (x - 1.5))) < 1e-13);
                CHECK(phi.space_derivative(t, x) == doctest::Approx(std::pow(3.0, t)).epsilon(1e-7));
            }
        }
    }

    TEST_CASE("flow agrees with runge kutta") {
        const transflow::Example ex = transflow::make_example("gaussian");
        const auto v = transflow::build_field(ex.map, ex.seed, ex.options);
        const FlowMap phi(v);
        for (double x : {-1.5, -0.5, 0.3, 1.2}) {
            CHECK(phi(0.7, x) == doctest::Approx(transflow::integrate_explicit(v, 0.7, x, 4000)).epsilon(1e-9));
        }
    }

    TEST_CASE("semigroup") {
        const transflow::Example ex = transflow::make_example("bad-fixed-point");
        const FlowMap phi(transflow::build_field(ex.map, ex.seed, ex.options));
        const auto w = ex.map.domain();
        for (int k = 1; k < 16; ++k) {
            const double x = w.lo + w.width() * k / 16.0;
            CHECK(phi(0.3, phi(0.4, x)) == doctest::Approx(phi(0.7, x)).epsilon(1e-10));
            CHECK(phi(1.0, x) == doctest::Approx(ex.map(x)).epsilon(1e-10));
        }
    }

    TEST_CASE("pushed measure matches the target") {
        const Measure1D m0 = Measure1D::gaussian(0.0, 1.0);
        const Measure1D m1 = Measure1D::gaussian(1.0, 2.0);
        const auto v = transflow::build_field(transflow::compute_monotone_map(m0, m1));
        CHECK(transflow::wasserstein1(transflow::push_measure(v, m0, 1.0), m1) < 1e-5);
        const Measure1D half = transflow::push_measure(v, m0, 0.5);
        CHECK(half.quantile(0.5) == doctest::Approx(transflow::flow(v, 0.5, 0.0)).epsilon(1e-6));
    }

    TEST_CASE("verify report passes and serializes") {
        const transflow::Example ex = transflow::make_example("affine");
        const auto rep = transflow::verify_transport(transflow::build_field(ex.map, ex.seed, ex.options), ex.m0, ex.m1);
        CHECK(rep.passed());
        CHECK(rep.julia.samples > 0);
        CHECK(rep.monotonicity_violations == 0);
        const std::string json = rep.to_json();
        CHECK(json.find("\"schema_version\": 1") != std::string::npos);
    }

    TEST_CASE("identity stays put") {
        const transflow::Example ex = transflow::make_example("identity");
        const FlowMap phi(transflow::build_field(ex.map, ex.seed, ex.options));
        CHECK(phi(1.0, 0.3) == 0.3);
        CHECK_FALSE(phi.primitive(0.3).has_value());
    }

    TEST_CASE("trajectories csv") {
        const FlowMap phi = affine_flow();
        std::ostringstream os;
        transflow::write_trajectories(os, phi, {1.0, 2.0}, {0.0, 1.0});
        const std::string s = os.str();
        CHECK(s.rfind("x0,t,phi\n", 0) == 0);
        std::size_t lines = 0;
        for (char c : s) lines += c == '\n';
        CHECK(lines == 5);
    }

    TEST_CASE("outside the hull") {
        CHECK_THROWS_AS((void)affine_flow()(0.5, 10.0), transflow::DomainError);
    }
}
