#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "transflow/measure.hpp"

namespace transflow {

/// Parses a 1D measure description
///
///   {"kind": "uniform",      "params": {"a": 1, "b": 2}}
///   {"kind": "gaussian",     "params": {"mean": 0, "sigma": 1, "tail_eps": 1e-10}}
///   {"kind": "affine_image", "params": {"base": {...}, "alpha": 3, "beta": -3}}
///   {"kind": "piecewise",    "params": {"x": [...], "density": [...]}}
///   {"kind": "grid",         "params": {"x": [...], "density": [...]}}
///
/// affine_image is the image of base under y = x / alpha + beta; tail_eps is
/// optional; grid densities are rescaled to unit mass, piecewise ones are not.
/// Throws ParseError naming the line/column or the offending field path, and
/// InvalidMeasureError when the values violate a measure invariant.
[[nodiscard]] Measure1D parse_measure(std::string_view json_text);

/// Reads and parses a measure description file; ParseError messages carry the path.
[[nodiscard]] Measure1D load_measure(const std::filesystem::path& path);

/// Reads a whole file; ParseError if it cannot be opened.
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace transflow
