#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "transflow/registry.hpp"
#include "transflow/tables.hpp"

using transflow::Measure1D;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE("tables") {
    TEST_CASE("map csv") {
        const auto t = transflow::compute_monotone_map(Measure1D::uniform(1.0, 2.0), Measure1D::uniform(0.0, 3.0));
        std::ostringstream os;
        transflow::write_map_csv(os, t, 16);
        const auto l = lines(os.str());
        REQUIRE(l.size() == 18);
        CHECK(l[0] == "x,T,Tp");
        double x = 0, tx = 0, tp = 0;
        char c1 = 0, c2 = 0;
        std::istringstream(l[9]) >> x >> c1 >> tx >> c2 >> tp;
        CHECK(x == doctest::Approx(1.5));
        CHECK(std::abs(tx - 1.5) < 1e-14);
        CHECK(tp == doctest::Approx(3.0));
    }

    TEST_CASE("field and density csv") {
        const transflow::Example ex = transflow::make_example("affine");
        const auto v = transflow::build_field(ex.map, ex.seed, ex.options);
        std::ostringstream f;
        transflow::write_field_csv(f, v, 32);
        const auto lf = lines(f.str());
        CHECK(lf.size() == 34);
        CHECK(lf[0] == "x,v");
        std::ostringstream d;
        transflow::write_densities_csv(d, ex.m0, ex.m1, 32);
        const auto ld = lines(d.str());
        CHECK(ld.size() == 34);
        CHECK(ld[0] == "x,rho0,rho1");
    }

    TEST_CASE("map descriptor") {
        const auto t = transflow::compute_monotone_map(Measure1D::uniform(1.0, 2.0), Measure1D::uniform(0.0, 3.0));
        const auto j = nlohmann::json::parse(transflow::map_descriptor_json(t, transflow::find_fixed_points(t)));
        CHECK(j["schema_version"] == 1);
        CHECK(j["fixed_set"].size() == 1);
        CHECK(j["moving"].size() == 2);
    }

    TEST_CASE("field descriptor") {
        const transflow::Example ex = transflow::make_example("accumulating");
        const auto v = transflow::build_field(ex.map, ex.seed, ex.options);
        const auto j = nlohmann::json::parse(transflow::field_descriptor_json(v, 8));
        CHECK(j["schema_version"] == 1);
        REQUIRE(j["intervals"].size() == v.pieces().size());
        const auto& p = j["intervals"][0];
        CHECK(p["seed_cubic"].size() == 4);
        CHECK(p["anchors_forward"].size() <= 9);
        CHECK(p["alpha0"].get<double>() == v.pieces()[0].alpha0);
        CHECK_FALSE(j["warnings"].empty());
    }
}
