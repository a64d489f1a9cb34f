#pragma once

#include <string>
#include <vector>

#include "transflow/measure.hpp"
#include "transflow/monotone_map.hpp"
#include "transflow/velocity.hpp"

namespace transflow {

struct ExampleParams {
    double alpha = 3.0;  ///< affine: T(x) = alpha x + beta on mu0 = uniform[1, 2]
    double beta = -3.0;
    double mean0 = 0.0;  ///< gaussian
    double sigma0 = 1.0;
    double mean1 = 1.0;
    double sigma1 = 2.0;
    std::string variant = "c1";  ///< accumulating: "c1" | "cinf"
};

struct Example {
    std::string name;
    std::string description;
    Measure1D m0;
    Measure1D m1;
    MonotoneMap map;
    SeedSpec seed;
    VelocityOptions options;
};

/// affine | gaussian | bad-fixed-point | accumulating | identity
[[nodiscard]] std::vector<std::string> example_names();

/// Throws ParseError for an unknown name or variant.
[[nodiscard]] Example make_example(const std::string& name, const ExampleParams& params = {});

}  // namespace transflow
