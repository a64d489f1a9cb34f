#include <cmath>

#include <doctest.h>

#include "transflow/errors.hpp"
#include "transflow/monotone_map.hpp"

using transflow::Interval;
using transflow::Measure1D;
using transflow::MonotoneMap;

TEST_SUITE("monotone_map") {
    TEST_CASE("uniform pair is affine") {
        const MonotoneMap t = transflow::compute_monotone_map(Measure1D::uniform(1.0, 2.0), Measure1D::uniform(0.0, 3.0));
        for (double x : {1.0, 1.2, 1.5, 1.77, 2.0}) {
            CHECK(std::abs(t(x) - (3.0 * x - 3.0)) < 1e-14);
            CHECK(t.derivative(x) == doctest::Approx(3.0).epsilon(1e-12));
            CHECK(t.inverse(3.0 * x - 3.0) == doctest::Approx(x).epsilon(1e-14));
        }
        CHECK(t.hull().lo == doctest::Approx(0.0));
        CHECK(t.hull().hi == doctest::Approx(3.0));
    }

    TEST_CASE("gaussian pair keeps tail precision") {
        const MonotoneMap t = transflow::compute_monotone_map(Measure1D::gaussian(0.0, 1.0), Measure1D::gaussian(1.0, 2.0));
        for (double x : {-6.0, -2.5, 0.0, 0.4, 3.0, 6.0}) {
            CHECK(std::abs(t(x) - (2.0 * x + 1.0)) < 1e-12 * (1.0 + std::abs(x)));
            CHECK(t.derivative(x) == doctest::Approx(2.0).epsilon(1e-9));
        }
    }

    TEST_CASE("single fixed point partition") {
        const MonotoneMap t = transflow::compute_monotone_map(Measure1D::uniform(1.0, 2.0), Measure1D::uniform(0.0, 3.0));
        const auto p = transflow::find_fixed_points(t);
        REQUIRE(p.fixed_set.size() == 1);
        CHECK(p.fixed_set[0].lo == doctest::Approx(1.5).epsilon(1e-10));
        REQUIRE(p.moving.size() == 2);
        CHECK(p.moving[0].direction == -1);
        CHECK(p.moving[1].direction == 1);
        CHECK(p.moving[0].hi_fixed);
        CHECK(p.moving[1].lo_fixed);
        CHECK(p.is_fixed(1.5));
        CHECK(p.locate(1.2) == 0u);
        CHECK(p.locate(2.5) == 1u);
    }

    TEST_CASE("no fixed point for a translation") {
        const MonotoneMap t =
            transflow::compute_monotone_map(Measure1D::uniform(0.0, 1.0), Measure1D::uniform(0.5, 1.5));
        const auto p = transflow::find_fixed_points(t);
        CHECK(p.fixed_set.empty());
        REQUIRE(p.moving.size() == 1);
        CHECK(p.moving[0].direction == 1);
    }

    TEST_CASE("identity is all fixed") {
        const MonotoneMap t = MonotoneMap::identity(Interval{0.0, 1.0});
        const auto p = transflow::find_fixed_points(t);
        CHECK(p.moving.empty());
        REQUIRE(p.fixed_set.size() == 1);
        CHECK(p.fixed_set[0].width() == doctest::Approx(1.0));
    }

    TEST_CASE("orbit grid follows T") {
        const MonotoneMap t = MonotoneMap::explicit_map(
            Interval{0.0, 1.0}, [](double x) { return 0.5 * x; }, [](double) { return 0.5; },
            [](double y) { return 2.0 * y; });
        const transflow::MovingInterval mi{0.0, 1.0, -1, true, false};
        transflow::OrbitStop stop;
        stop.max_steps = 10;
        const auto g = transflow::build_orbit_grid(t, mi, 0.8, stop);
        REQUIRE(g.anchors.size() >= 3);
        CHECK(g.anchors[0] == 0.8);
        CHECK(g.anchors[1] == doctest::Approx(0.4));
        CHECK(g.anchors[2] == doctest::Approx(0.2));
        CHECK(g.seed_interval.lo == doctest::Approx(0.4));
        CHECK(g.seed_interval.hi == doctest::Approx(0.8));
        CHECK_THROWS_AS((void)transflow::build_orbit_grid(t, mi, 0.0, stop), transflow::DegenerateOrbitError);
    }

    TEST_CASE("pushforward reproduces the target") {
        const Measure1D m0 = Measure1D::gaussian(0.0, 1.0);
        const Measure1D m1 = Measure1D::gaussian(1.0, 2.0);
        const Measure1D img = transflow::pushforward_by_map(m0, transflow::compute_monotone_map(m0, m1));
        CHECK(transflow::wasserstein1(img, m1) < 1e-6);
    }

    TEST_CASE("domain errors") {
        const MonotoneMap t = transflow::compute_monotone_map(Measure1D::uniform(1.0, 2.0), Measure1D::uniform(0.0, 3.0));
        CHECK_THROWS_AS((void)t.derivative(5.0), transflow::DomainError);
    }
}
