#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "transflow/errors.hpp"
#include "transflow/sudakov.hpp"

using transflow::MeasureND;
using transflow::Point;
using transflow::RayKind;

namespace {

const std::string kData = TRANSFLOW_TEST_DATA;

double norm(const Point& x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return std::sqrt(s);
}

/// Fraction of plain Monte Carlo samples of m with radius in [a, b] and polar angle in [0, pi/2).
double sector_fraction(const MeasureND& m, double a, double b, std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> u(m.uniform_count());
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
        for (double& c : u) c = unif(rng);
        const Point x = m.from_uniforms(u);
        const double r = norm(x);
        if (r >= a && r <= b && x[0] > 0.0 && x[1] >= 0.0) ++hits;
    }
    return static_cast<double>(hits) / n;
}

}  // namespace

TEST_SUITE("sudakov") {
    TEST_CASE("ball sampler hits annular sectors with the right mass") {
        const MeasureND disk = MeasureND::ball({0.0, 0.0}, 2.0);
        const double expected = (1.5 * 1.5 - 0.5 * 0.5) / 4.0 / 4.0;
        CHECK(std::abs(sector_fraction(disk, 0.5, 1.5, 200000) - expected) < 4e-3);
        const MeasureND ball3 = MeasureND::ball({0.0, 0.0, 0.0}, 1.0);
        double shell = 0.0;
        double r_max = 0.0;
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> u(ball3.uniform_count());
        for (int k = 0; k < 100000; ++k) {
            for (double& c : u) c = unif(rng);
            const double r = norm(ball3.from_uniforms(u));
            r_max = std::max(r_max, r);
            shell += r >= 0.5;
        }
        CHECK(r_max <= 1.0 + 1e-12);
        CHECK(shell / 100000.0 == doctest::Approx(1.0 - 0.125).epsilon(1e-2));
    }

    TEST_CASE("disks scale radially") {
        const auto fam = transflow::decompose(transflow::load_measure_nd(kData + "/disk_1.json"),
                                              transflow::load_measure_nd(kData + "/disk_2.json"));
        CHECK(fam.kind == RayKind::radial);
        const auto v = transflow::assemble_field(fam);
        for (const Point& x : {Point{0.3, 0.1}, Point{-0.5, 0.6}, Point{0.0, -0.9}}) {
            const Point y = v.flow(1.0, x);
            CHECK(y[0] == doctest::Approx(2.0 * x[0]).epsilon(1e-12));
            CHECK(y[1] == doctest::Approx(2.0 * x[1]).epsilon(1e-12));
            const Point w = v(x);
            CHECK(w[0] * x[1] - w[1] * x[0] == doctest::Approx(0.0).epsilon(1e-14));
        }
        const auto rep = transflow::verify_nd(v);
        CHECK(rep.passed());
        CHECK(rep.max_ray_w1 < 1e-10);
    }

    TEST_CASE("square translation along one axis") {
        const auto fam = transflow::decompose(transflow::load_measure_nd(kData + "/square.json"),
                                              transflow::load_measure_nd(kData + "/square_shift.json"));
        CHECK(fam.kind == RayKind::parallel);
        CHECK(fam.axis == 0);
        const auto v = transflow::assemble_field(fam);
        const Point y = v.flow(1.0, {0.25, 0.7});
        CHECK(y[0] == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(y[1] == 0.7);
        transflow::NdVerifyOptions o;
        o.samples = 100000;
        const auto rep = transflow::verify_nd(v, o);
        CHECK(rep.sliced_w1 <= 2e-3);
        CHECK(rep.passed());
    }

    TEST_CASE("gaussian shift") {
        const MeasureND g0 = MeasureND::gaussian({0.0, 0.0}, {1.0});
        const MeasureND g1 = MeasureND::gaussian({0.0, 1.0}, {1.0});
        const auto fam = transflow::decompose(g0, g1);
        CHECK(fam.axis == 1);
        const auto v = transflow::assemble_field(fam);
        const Point y = v.flow(1.0, {0.4, -0.3});
        CHECK(y[0] == 0.4);
        CHECK(y[1] == doctest::Approx(0.7).epsilon(1e-10));
        CHECK(transflow::verify_nd(v).passed());
    }

    TEST_CASE("identity pair") {
        const MeasureND b = MeasureND::box({0.0, 0.0}, {1.0, 1.0});
        const auto v = transflow::assemble_field(transflow::decompose(b, b));
        const Point y = v.flow(1.0, {0.2, 0.3});
        CHECK(y[0] == 0.2);
        CHECK(y[1] == 0.3);
    }

    TEST_CASE("three dimensional balls") {
        const auto fam = transflow::decompose(MeasureND::ball({0.0, 0.0, 0.0}, 1.0), MeasureND::ball({0.0, 0.0, 0.0}, 3.0));
        const auto v = transflow::assemble_field(fam);
        const Point y = v.flow(1.0, {0.1, 0.2, -0.3});
        CHECK(y[2] == doctest::Approx(-0.9).epsilon(1e-9));
        transflow::NdVerifyOptions o;
        o.samples = 4000;
        o.rays = 16;
        CHECK(transflow::verify_nd(v, o).passed());
    }

    TEST_CASE("radial law with a square root map") {
        const MeasureND m0 = MeasureND::radial({0.0, 0.0}, transflow::Measure1D::uniform(0.0, 1.0));
        const auto v = transflow::assemble_field(transflow::decompose(m0, MeasureND::ball({0.0, 0.0}, 1.0)));
        const Point y = v.flow(1.0, {0.36, 0.0});
        CHECK(y[0] == doctest::Approx(0.6).epsilon(1e-9));
        const auto rep = transflow::verify_nd(v);
        CHECK(rep.confinement <= 1e-12);
        CHECK(rep.passed());
    }

    TEST_CASE("unsupported pairs") {
        const MeasureND sq = MeasureND::box({0.0, 0.0}, {1.0, 1.0});
        CHECK_THROWS_AS((void)transflow::decompose(sq, MeasureND::box({1.0, 1.0}, {2.0, 2.0})),
                        transflow::UnsupportedClassError);
        CHECK_THROWS_AS((void)transflow::decompose(sq, MeasureND::ball({0.0, 0.0}, 1.0)),
                        transflow::UnsupportedClassError);
        CHECK_THROWS_AS((void)transflow::decompose(MeasureND::ball({0.0, 0.0}, 1.0), MeasureND::ball({1.0, 0.0}, 1.0)),
                        transflow::UnsupportedClassError);
        CHECK_THROWS_AS((void)transflow::decompose(sq, MeasureND::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0})),
                        transflow::UnsupportedClassError);
    }

    TEST_CASE("parse errors name the field") {
        try {
            (void)transflow::parse_measure_nd(R"({"class":"ball","params":{"center":[0,0]}})");
            FAIL("no throw");
        } catch (const transflow::ParseError& e) {
            CHECK(std::string(e.what()).find("radius") != std::string::npos);
        }
        CHECK_THROWS_AS((void)transflow::parse_measure_nd(R"({"class":"torus","params":{}})"), transflow::ParseError);
    }

    TEST_CASE("field samples csv") {
        const auto v = transflow::assemble_field(
            transflow::decompose(MeasureND::ball({0.0, 0.0}, 1.0), MeasureND::ball({0.0, 0.0}, 2.0)));
        std::ostringstream a;
        std::ostringstream b;
        transflow::write_field_samples(a, v, 50, 3);
        transflow::write_field_samples(b, v, 50, 3);
        CHECK(a.str() == b.str());
        CHECK(a.str().rfind("x0,x1,v0,v1\n", 0) == 0);
    }
}
