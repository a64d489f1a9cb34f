#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "transflow/errors.hpp"
#include "transflow/registry.hpp"

namespace {

using transflow::cli::kExitInput;
using transflow::cli::kExitVerification;

std::string default_out() {
    if (const char* env = std::getenv("TRANSFLOW_OUT"); env && *env) return env;
    return "transflow-out";
}

const CLI::Validator kPowerOfTwo(
    [](std::string& s) -> std::string {
        std::size_t n = 0;
        try {
            n = std::stoul(s);
        } catch (const std::exception&) {
            return "not an integer: " + s;
        }
        if (n < 16 || (n & (n - 1)) != 0) return "must be a power of two >= 16, got " + s;
        return {};
    },
    "POW2>=16");

int run_command(const std::string& name, transflow::cli::Runner& r) {
    if (name == "map") return r.map();
    if (name == "field") return r.field();
    if (name == "flow") return r.flow();
    if (name == "verify") return r.verify();
    if (name == "example") return r.example();
    if (name == "pathology") return r.pathology();
    return r.sudakov();
}

bool input_error(const transflow::Error& e) {
    return dynamic_cast<const transflow::ParseError*>(&e) || dynamic_cast<const transflow::InvalidMeasureError*>(&e) ||
           dynamic_cast<const transflow::InvalidMapError*>(&e) ||
           dynamic_cast<const transflow::SeedCompatibilityError*>(&e) ||
           dynamic_cast<const transflow::SeedSignError*>(&e) ||
           dynamic_cast<const transflow::UnsupportedClassError*>(&e) ||
           dynamic_cast<const transflow::DomainError*>(&e) || dynamic_cast<const transflow::PreconditionError*>(&e);
}

}  // namespace

int main(int argc, char** argv) {
    transflow::cli::RunConfig cfg;
    cfg.out = default_out();

    CLI::App app{"transflow: autonomous velocity fields realizing monotone transport maps"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", cfg.out, "output directory (default $TRANSFLOW_OUT or ./transflow-out)");
    app.add_option("--format", cfg.format, "artifacts to write")->check(CLI::IsMember({"csv", "json", "all"}));
    app.add_option("--n", cfg.n, "grid resolution N (tables and pushed measure)")->check(kPowerOfTwo);
    app.add_option("--tol-julia", cfg.tol_julia, "Julia/Abel residual tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-time", cfg.tol_time, "time normalization tolerance")->check(CLI::PositiveNumber);
    auto* seed_kind = app.add_option("--seed-kind", cfg.seed_kind, "seed on the first orbit interval")
                          ->check(CLI::IsMember({"constant", "affine", "hermite_ck"}));
    auto* ck = app.add_option("--ck", cfg.ck, "smoothness order of the hermite seed")->check(CLI::Range(0, 1));
    auto* seed_values = app.add_option("--seed-values", cfg.seed_values, "seed data, see SeedSpec")->delimiter(',');
    auto* alpha0 = app.add_option("--alpha0", cfg.alpha0, "seed anchor");
    app.add_option("--samples", cfg.samples, "verification samples")->check(CLI::PositiveNumber);
    app.add_option("--pairs", cfg.pairs, "semigroup and monotonicity pairs")->check(CLI::PositiveNumber);
    app.add_option("--rng-seed", cfg.rng_seed, "seed of the verification sampler");

    auto add_pair = [&](CLI::App* sub) {
        sub->add_option("source", cfg.source, "source measure (JSON file)")->required()->check(CLI::ExistingFile);
        sub->add_option("target", cfg.target, "target measure (JSON file)")->required()->check(CLI::ExistingFile);
    };

    add_pair(app.add_subcommand("map", "monotone map table x,T,Tp and fixed-point partition"));
    auto* field = app.add_subcommand("field", "velocity table x,v and field descriptor");
    add_pair(field);
    field->add_option("--eps", cfg.eps, "approximate mode: shift the target within eps for a Lipschitz field")
        ->check(CLI::PositiveNumber);
    auto* flow = app.add_subcommand("flow", "trajectories x0,t,phi");
    add_pair(flow);
    flow->add_option("--x0", cfg.x0, "initial points (default: source deciles)")->delimiter(',');
    flow->add_option("--t", cfg.times, "times (default 0, 0.05, .., 1)")->delimiter(',');
    add_pair(app.add_subcommand("verify", "build and verify; exit 1 when a check fails"));

    auto* example = app.add_subcommand("example", "run a named example end to end");
    example->add_option("name", cfg.example, "example name")
        ->required()
        ->check(CLI::IsMember(transflow::example_names()));
    example->add_option("--alpha", cfg.params.alpha, "affine: slope");
    example->add_option("--beta", cfg.params.beta, "affine: offset");
    example->add_option("--mean0", cfg.params.mean0, "gaussian: source mean");
    example->add_option("--sigma0", cfg.params.sigma0, "gaussian: source sigma");
    example->add_option("--mean1", cfg.params.mean1, "gaussian: target mean");
    example->add_option("--sigma1", cfg.params.sigma1, "gaussian: target sigma");
    example->add_option("--variant", cfg.params.variant, "accumulating: c1 | cinf")
        ->check(CLI::IsMember({"c1", "cinf"}));

    auto* pathology = app.add_subcommand("pathology", "counterexample growth and integrability tables");
    pathology->add_option("--variant", cfg.variant, "quadratic | log_squared | both")
        ->check(CLI::IsMember({"quadratic", "log_squared", "both"}));
    pathology->add_option("--i-max", cfg.i_max, "last orbit index of the growth table")->check(CLI::PositiveNumber);
    pathology->add_option("--decades", cfg.decades, "decades of j in the integrability table")
        ->check(CLI::Range(1, 6));

    auto* sudakov = app.add_subcommand("sudakov", "d-dimensional ray decomposition, assembly and verification");
    sudakov->add_option("source", cfg.source, "source d-dimensional measure (JSON file)")->required()->check(CLI::ExistingFile);
    sudakov->add_option("target", cfg.target, "target d-dimensional measure (JSON file)")->required()->check(CLI::ExistingFile);
    sudakov->add_option("--rays", cfg.rays, "rays checked")->check(CLI::PositiveNumber);
    sudakov->add_option("--projections", cfg.projections, "sliced W1 directions")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }
    if (app.got_subcommand("sudakov") && app.count("--samples") == 0) cfg.samples = 10000;
    cfg.seed_given = *seed_kind || *ck || *seed_values || *alpha0;

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        transflow::cli::Runner runner(cfg, std::cout);
        return run_command(name, runner);
    } catch (const transflow::Error& e) {
        std::cerr << "transflow " << name << ": " << e.what() << '\n';
        return input_error(e) ? kExitInput : kExitVerification;
    } catch (const std::exception& e) {
        std::cerr << "transflow " << name << ": " << e.what() << '\n';
        return kExitVerification;
    }
}
