#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "transflow/registry.hpp"

namespace transflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitInput = 2;

struct RunConfig {
    std::string out;
    std::string format = "all";  ///< csv | json | all
    std::size_t n = 4096;
    double tol_julia = 1e-8;
    double tol_time = 1e-6;
    std::string seed_kind = "affine";
    int ck = 0;
    std::vector<double> seed_values;
    std::optional<double> alpha0;
    bool seed_given = false;  ///< any seed flag set; examples otherwise use their registry seed
    std::optional<double> eps;
    std::string source;
    std::string target;
    std::size_t samples = 2000;
    std::size_t pairs = 10000;
    std::uint64_t rng_seed = 20240601;
    std::vector<double> x0;
    std::vector<double> times;
    std::string example;
    ExampleParams params;
    std::string variant = "both";
    long i_max = 20'000'000;
    int decades = 4;
    std::size_t rays = 64;
    std::size_t projections = 64;
};

/// Writes artifacts below cfg.out and returns an exit status.
class Runner {
public:
    Runner(RunConfig cfg, std::ostream& log);

    int map();
    int field();
    int flow();
    int verify();
    int example();
    int pathology();
    int sudakov();

private:
    bool wants(const std::string& file) const;
    void emit(const std::filesystem::path& file, const std::function<void(std::ostream&)>& body);
    void emit_text(const std::filesystem::path& file, const std::string& text);

    RunConfig cfg_;
    std::ostream& log_;
};

}  // namespace transflow::cli
