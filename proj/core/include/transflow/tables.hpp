#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "transflow/measure.hpp"
#include "transflow/monotone_map.hpp"
#include "transflow/velocity.hpp"

namespace transflow {

/// CSV x,T,Tp on n + 1 uniform nodes of the map's domain.
void write_map_csv(std::ostream& out, const MonotoneMap& map, std::size_t n);
/// CSV x,v on n + 1 uniform nodes of the field's hull.
void write_field_csv(std::ostream& out, const VelocityField1D& field, std::size_t n);
/// CSV x,rho0,rho1 on n + 1 uniform nodes of the hull of both windows.
void write_densities_csv(std::ostream& out, const Measure1D& m0, const Measure1D& m1, std::size_t n);

/// JSON with domain, range, fixed components and moving intervals.
[[nodiscard]] std::string map_descriptor_json(const MonotoneMap& map, const FixedPointPartition& partition);

/// JSON with, per moving interval, the seed data, alpha0, alpha1, time_scale,
/// up to `anchors` orbit anchors in each direction and the truncation zones,
/// plus the field warnings.
[[nodiscard]] std::string field_descriptor_json(const VelocityField1D& field, std::size_t anchors = 16);

}  // namespace transflow
