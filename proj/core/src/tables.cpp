#include "transflow/tables.hpp"

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "transflow/errors.hpp"

namespace transflow {

namespace {

using Json = nlohmann::ordered_json;

template <class Row>
void write_grid(std::ostream& out, const char* header, Interval span, std::size_t n, Row row) {
    if (n == 0) throw DomainError("table: need at least one cell");
    out << header << '\n';
    std::ostringstream line;
    line.precision(17);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = i == n ? span.hi : span.lo + span.width() * static_cast<double>(i) / static_cast<double>(n);
        line.str({});
        line << x;
        row(line, x);
        out << line.str() << '\n';
    }
}

Json zone_json(const TruncationZone& z) {
    return {{"fixed_point", z.fixed_point}, {"edge", z.edge},           {"v_edge", z.v_edge},
            {"slope_at_fixed", z.slope_at_fixed}, {"indeterminate", z.indeterminate}, {"anchors", z.anchors}};
}

std::vector<double> orbit(const MonotoneMap& t, const MovingInterval& iv, double x0, std::size_t k, bool backward) {
    OrbitStop stop;
    stop.max_steps = k;
    stop.backward = backward;
    try {
        return build_orbit_grid(t, iv, x0, stop).anchors;
    } catch (const Error&) {
        return {x0};
    }
}

}  // namespace

void write_map_csv(std::ostream& out, const MonotoneMap& map, std::size_t n) {
    write_grid(out, "x,T,Tp", map.domain(), n,
               [&](std::ostream& os, double x) { os << ',' << map(x) << ',' << map.derivative(x); });
}

void write_field_csv(std::ostream& out, const VelocityField1D& field, std::size_t n) {
    write_grid(out, "x,v", field.hull(), n, [&](std::ostream& os, double x) { os << ',' << field(x); });
}

void write_densities_csv(std::ostream& out, const Measure1D& m0, const Measure1D& m1, std::size_t n) {
    write_grid(out, "x,rho0,rho1", hull(m0.window(), m1.window()), n,
               [&](std::ostream& os, double x) { os << ',' << m0.density(x) << ',' << m1.density(x); });
}

std::string map_descriptor_json(const MonotoneMap& map, const FixedPointPartition& part) {
    Json j;
    j["schema_version"] = 1;
    j["domain"] = {map.domain().lo, map.domain().hi};
    j["range"] = {map.range().lo, map.range().hi};
    j["hull"] = {part.hull.lo, part.hull.hi};
    j["tol_fp"] = part.tol;
    Json fixed = Json::array();
    for (const Interval& c : part.fixed_set) fixed.push_back({c.lo, c.hi});
    j["fixed_set"] = std::move(fixed);
    Json moving = Json::array();
    for (const MovingInterval& m : part.moving)
        moving.push_back({{"lo", m.lo}, {"hi", m.hi}, {"direction", m.direction},
                          {"lo_fixed", m.lo_fixed}, {"hi_fixed", m.hi_fixed}});
    j["moving"] = std::move(moving);
    return j.dump(2);
}

std::string field_descriptor_json(const VelocityField1D& field, std::size_t anchors) {
    Json j;
    j["schema_version"] = 1;
    j["hull"] = {field.hull().lo, field.hull().hi};
    const VelocityOptions& o = field.options();
    j["options"] = {{"tol_julia", o.tol_julia},         {"tol_time", o.tol_time},
                    {"delta_orbit_rel", o.delta_orbit_rel}, {"i_max", o.i_max},
                    {"normalize_time", o.normalize_time}};
    Json pieces = Json::array();
    for (const IntervalField& f : field.pieces()) {
        Json p;
        p["interval"] = {{"lo", f.interval.lo}, {"hi", f.interval.hi}, {"direction", f.interval.direction}};
        p["seed"] = {{"kind", to_string(f.seed.kind)}, {"order_k", f.seed.order_k}, {"values", f.seed.values}};
        p["alpha0"] = f.alpha0;
        p["alpha1"] = f.alpha1;
        p["seed_cubic"] = {f.c0, f.c1, f.c2, f.c3};
        p["time_scale"] = f.time_scale;
        p["delta_orbit"] = f.delta_orbit;
        p["anchors_forward"] = orbit(field.map(), f.interval, f.alpha0, anchors, false);
        p["anchors_backward"] = orbit(field.map(), f.interval, f.alpha0, anchors, true);
        p["zone_lo"] = f.zone_lo ? zone_json(*f.zone_lo) : Json(nullptr);
        p["zone_hi"] = f.zone_hi ? zone_json(*f.zone_hi) : Json(nullptr);
        pieces.push_back(std::move(p));
    }
    j["intervals"] = std::move(pieces);
    Json warnings = Json::array();
    for (const FieldWarning& w : field.warnings())
        warnings.push_back({{"code", w.code}, {"message", w.message}, {"where", w.where}});
    j["warnings"] = std::move(warnings);
    return j.dump(2);
}

}  // namespace transflow
