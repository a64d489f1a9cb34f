#include <string>

#include <doctest.h>

#include "transflow/errors.hpp"
#include "transflow/measure_io.hpp"

using transflow::Measure1D;
using transflow::ParseError;

namespace {

const std::string kData = TRANSFLOW_TEST_DATA;

std::string parse_error_message(const std::string& text) {
    try {
        (void)transflow::parse_measure(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("measure_io") {
    TEST_CASE("each kind parses") {
        CHECK(transflow::parse_measure(R"({"kind":"uniform","params":{"a":1,"b":2}})").quantile(0.5) ==
              doctest::Approx(1.5));
        CHECK(transflow::parse_measure(R"({"kind":"gaussian","params":{"mean":1,"sigma":2,"tail_eps":1e-9}})")
                  .quantile(0.5) == doctest::Approx(1.0));
        const Measure1D img = transflow::parse_measure(
            R"({"kind":"affine_image","params":{"base":{"kind":"uniform","params":{"a":1,"b":2}},"alpha":3,"beta":-3}})");
        CHECK(img.support().lo == doctest::Approx(1.0 / 3.0 - 3.0));
        CHECK(transflow::parse_measure(R"({"kind":"piecewise","params":{"x":[0,1,2],"density":[0,1,0]}})").cdf(1.0) ==
              doctest::Approx(0.5));
        CHECK(transflow::parse_measure(R"({"kind":"grid","params":{"x":[0,2],"density":[5,5]}})").density(1.0) ==
              doctest::Approx(0.5));
    }

    TEST_CASE("files load") {
        CHECK(transflow::load_measure(kData + "/uniform_1_2.json").support().hi == 2.0);
        CHECK(transflow::load_measure(kData + "/gaussian_1_2.json").quantile(0.5) == doctest::Approx(1.0));
    }

    TEST_CASE("errors name the offending field") {
        CHECK(parse_error_message(R"({"kind":"uniform","params":{"a":1}})").find("$.params.b") != std::string::npos);
        CHECK(parse_error_message(R"({"kind":"gaussian","params":{"mean":0,"sigma":"x"}})").find("$.params.sigma") !=
              std::string::npos);
        CHECK(parse_error_message(R"({"kind":"cauchy","params":{}})").find("$.kind") != std::string::npos);
        CHECK_FALSE(parse_error_message("{\"kind\": \"uniform\",\n \"params\": }").empty());
    }

    TEST_CASE("file errors") {
        CHECK_THROWS_AS((void)transflow::load_measure(kData + "/malformed.json"), ParseError);
        CHECK_THROWS_AS((void)transflow::load_measure(kData + "/missing_field.json"), ParseError);
        CHECK_THROWS_AS((void)transflow::load_measure(kData + "/does_not_exist.json"), ParseError);
        CHECK(parse_error_message(R"({"kind":"uniform","params":{"a":2,"b":1}})").find("$.params") !=
              std::string::npos);
    }
}
