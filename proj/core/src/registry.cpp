#include "transflow/registry.hpp"

#include <cmath>
#include <numbers>

#include "transflow/errors.hpp"

namespace transflow {

namespace {

Example affine_example(const ExampleParams& p) {
    if (!(p.alpha > 0.0)) throw ParseError("affine example: alpha must be positive");
    const Measure1D m0 = Measure1D::uniform(1.0, 2.0);
    const Measure1D m1 = Measure1D::affine_image(m0, 1.0 / p.alpha, p.beta);
    return {"affine", "uniform[1,2] pushed by x -> alpha x + beta", m0, m1, compute_monotone_map(m0, m1), {}, {}};
}

Example gaussian_example(const ExampleParams& p) {
    if (!(p.sigma0 > 0.0) || !(p.sigma1 > 0.0)) throw ParseError("gaussian example: sigmas must be positive");
    const Measure1D m0 = Measure1D::gaussian(p.mean0, p.sigma0);
    const Measure1D m1 = Measure1D::gaussian(p.mean1, p.sigma1);
    return {"gaussian", "N(mean0, sigma0^2) to N(mean1, sigma1^2)", m0, m1, compute_monotone_map(m0, m1), {}, {}};
}

Example bad_fixed_point_example() {
    const Measure1D m0 = Measure1D::uniform(0.0, 2.0);
    const Measure1D m1 = Measure1D::piecewise_linear({0.0, 3.0}, {0.5, 0.5 - 3.0 / 9.0});
    return {"bad-fixed-point",
            "uniform density 1/2 on [0,2] to density 1/2 - x/9 on [0,3]; fixed point 0 with T'(0) = 1",
            m0,
            m1,
            compute_monotone_map(m0, m1),
            {},
            {}};
}

Example accumulating_example(const ExampleParams& p) {
    using std::numbers::pi;
    numerics::ScalarFn fwd, der;
    std::string desc;
    if (p.variant == "c1") {
        fwd = [](double x) { return x <= 0.0 ? x : x + 0.2 * x * x * x * std::sin(pi / x); };
        der = [](double x) {
            if (x <= 0.0) return 1.0;
            return 1.0 + 0.2 * (3.0 * x * x * std::sin(pi / x) - pi * x * std::cos(pi / x));
        };
        desc = "uniform[0,1] pushed by x + x^3 sin(pi/x)/5; fixed points 1/n accumulate at 0";
    } else if (p.variant == "cinf") {
        fwd = [](double x) { return x <= 0.0 ? x : x + 0.2 * std::exp(-1.0 / x) * std::sin(pi / x); };
        der = [](double x) {
            if (x <= 0.0) return 1.0;
            const double e = std::exp(-1.0 / x) / (x * x);
            return 1.0 + 0.2 * e * (std::sin(pi / x) - pi * std::cos(pi / x));
        };
        desc = "uniform[0,1] pushed by x + exp(-1/x) sin(pi/x)/5; fixed points 1/n accumulate at 0";
    } else {
        throw ParseError("accumulating example: variant must be c1 or cinf, got '" + p.variant + "'");
    }
    const MonotoneMap t = MonotoneMap::explicit_map({0.0, 1.0}, fwd, der);
    const Measure1D m0 = Measure1D::uniform(0.0, 1.0);
    const Measure1D m1 = pushforward_by_map(m0, t);
    VelocityOptions opts;
    opts.delta_orbit_rel = 1e-8;
    opts.i_max = 1000;
    return {"accumulating", desc, m0, m1, t, {}, opts};
}

Example identity_example() {
    const Measure1D m = Measure1D::uniform(0.0, 1.0);
    return {"identity", "uniform[0,1] to itself", m, m, MonotoneMap::identity({0.0, 1.0}), {}, {}};
}

}  // namespace

std::vector<std::string> example_names() {
    return {"affine", "gaussian", "bad-fixed-point", "accumulating", "identity"};
}

Example make_example(const std::string& name, const ExampleParams& params) {
    if (name == "affine") return affine_example(params);
    if (name == "gaussian") return gaussian_example(params);
    if (name == "bad-fixed-point") return bad_fixed_point_example();
    if (name == "accumulating") return accumulating_example(params);
    if (name == "identity") return identity_example();
    throw ParseError("unknown example '" + name +
                     "' (expected affine | gaussian | bad-fixed-point | accumulating | identity)");
}

}  // namespace transflow
