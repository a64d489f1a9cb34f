#include <cmath>

#include <doctest.h>

#include "transflow/errors.hpp"
#include "transflow/registry.hpp"
#include "transflow/velocity.hpp"

using transflow::Measure1D;
using transflow::SeedKind;
using transflow::SeedSpec;
using transflow::VelocityField1D;

namespace {

transflow::MonotoneMap affine_map() {
    return transflow::compute_monotone_map(Measure1D::uniform(1.0, 2.0), Measure1D::uniform(0.0, 3.0));
}

}  // namespace

TEST_SUITE("velocity") {
    TEST_CASE("affine map gives the logarithmic field") {
        const VelocityField1D v = transflow::build_field(affine_map());
        for (double x : {0.0, 0.3, 1.0, 1.49, 1.5, 1.51, 2.2, 3.0}) {
            CHECK(std::abs(v(x) - std::log(3.0) * (x - 1.5)) < 1e-14);
        }
        CHECK(v.partition().moving.size() == 2);
        for (const auto& w : v.warnings()) CHECK(w.code != "indeterminate_fixed_point");
    }

    TEST_CASE("julia relation on every example") {
        for (const auto& name : transflow::example_names()) {
            const transflow::Example ex = transflow::make_example(name);
            const VelocityField1D v = transflow::build_field(ex.map, ex.seed, ex.options);
            const auto w = ex.map.domain();
            for (int k = 1; k < 64; ++k) {
                const double x = w.lo + w.width() * k / 64.0;
                if (v.in_truncation_zone(x) || v.in_truncation_zone(ex.map(x))) continue;
                CAPTURE(name);
                CAPTURE(x);
                CHECK(transflow::julia_residual(v, x) < 1e-8);
            }
        }
    }

    TEST_CASE("seed primitive is time normalized") {
        SeedSpec seed;
        seed.kind = SeedKind::hermite_ck;
        seed.order_k = 1;
        const VelocityField1D v = transflow::build_field(affine_map(), seed);
        for (std::size_t i = 0; i < v.pieces().size(); ++i) {
            const auto& f = v.pieces()[i];
            CHECK(v.seed_primitive(i, f.alpha0) == 0.0);
            CHECK(v.seed_primitive(i, f.alpha1) == doctest::Approx(1.0).epsilon(1e-12));
            for (double u : {1e-9, 0.25, 0.5, 0.999}) {
                CHECK(v.seed_primitive(i, v.seed_primitive_inverse(i, u)) == doctest::Approx(u).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("constant seed") {
        SeedSpec seed;
        seed.kind = SeedKind::constant;
        seed.values = {1.0};
        const auto t = transflow::compute_monotone_map(Measure1D::uniform(0.0, 1.0), Measure1D::uniform(0.5, 1.5));
        const VelocityField1D v = transflow::build_field(t, seed);
        CHECK(v(0.25) == doctest::Approx(0.5));
        CHECK(v(0.9) == doctest::Approx(0.5));
    }

    TEST_CASE("seed errors") {
        SeedSpec wrong_sign;
        wrong_sign.kind = SeedKind::constant;
        wrong_sign.values = {-1.0};
        const auto t = transflow::compute_monotone_map(Measure1D::uniform(0.0, 1.0), Measure1D::uniform(0.5, 1.5));
        CHECK_THROWS_AS((void)transflow::build_field(t, wrong_sign), transflow::SeedSignError);
        SeedSpec mismatched;
        mismatched.kind = SeedKind::affine;
        mismatched.values = {1.0, 3.0};
        CHECK_THROWS_AS((void)transflow::build_field(t, mismatched), transflow::SeedCompatibilityError);
        CHECK_THROWS_AS((void)transflow::parse_seed_kind("spline"), transflow::ParseError);
    }

    TEST_CASE("indeterminate fixed point warns") {
        const transflow::Example ex = transflow::make_example("accumulating");
        const VelocityField1D v = transflow::build_field(ex.map, ex.seed, ex.options);
        bool warned = false;
        for (const auto& w : v.warnings()) warned = warned || w.code == "indeterminate_fixed_point";
        CHECK(warned);
    }

    TEST_CASE("approximate controllability shifts off slope one") {
        const transflow::Example ex = transflow::make_example("bad-fixed-point");
        const auto r = transflow::approximate_lipschitz(ex.m0, ex.m1, 1e-3);
        CHECK(r.w1_to_target < 1e-3);
        CHECK(r.l1_to_target < 1e-3);
        REQUIRE_FALSE(r.fixed_point_slopes.empty());
        for (double s : r.fixed_point_slopes) CHECK(std::abs(s - 1.0) > 1e-3);
        const double q1 = transflow::max_difference_quotient(r.field, 1024);
        const double q2 = transflow::max_difference_quotient(r.field, 4096);
        CHECK(std::isfinite(q1));
        CHECK(q2 <= 1.5 * q1);
    }

    TEST_CASE("osgood partial sums count orbit intervals") {
        const VelocityField1D v = transflow::build_field(affine_map());
        const auto sums = transflow::osgood_partial_integrals(v, 1, false, 12);
        REQUIRE(sums.size() == 12);
        for (std::size_t m = 0; m < sums.size(); ++m) CHECK(sums[m] == doctest::Approx(m + 1.0).epsilon(1e-8));
    }
}
