#include "commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "transflow/errors.hpp"
#include "transflow/flow.hpp"
#include "transflow/measure_io.hpp"
#include "transflow/pathology.hpp"
#include "transflow/sudakov.hpp"
#include "transflow/tables.hpp"

namespace transflow::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

SeedSpec seed_from(const RunConfig& cfg) {
    SeedSpec s;
    s.kind = parse_seed_kind(cfg.seed_kind);
    s.order_k = cfg.ck;
    s.values = cfg.seed_values;
    s.alpha0 = cfg.alpha0;
    return s;
}

VelocityOptions options_from(const RunConfig& cfg, VelocityOptions base = {}) {
    base.tol_julia = cfg.tol_julia;
    base.tol_time = cfg.tol_time;
    return base;
}

VerifyOptions verify_options_from(const RunConfig& cfg) {
    VerifyOptions o;
    o.n = cfg.n;
    o.samples = cfg.samples;
    o.pairs = cfg.pairs;
    o.rng_seed = cfg.rng_seed;
    o.tol_julia = cfg.tol_julia;
    o.tol_abel = cfg.tol_julia;
    return o;
}

/// Source quantiles at 1/10 .. 9/10.
std::vector<double> default_starts(const Measure1D& m0) {
    std::vector<double> x;
    for (int k = 1; k <= 9; ++k) x.push_back(m0.quantile(k / 10.0));
    return x;
}

std::vector<double> default_times() {
    std::vector<double> t;
    for (int k = 0; k <= 20; ++k) t.push_back(k / 20.0);
    return t;
}

Json approximate_json(const ApproximateResult& r) {
    return {{"shift", r.shift},
            {"w1_to_target", r.w1_to_target},
            {"l1_to_target", r.l1_to_target},
            {"fixed_point_slopes", r.fixed_point_slopes}};
}

}  // namespace

Runner::Runner(RunConfig cfg, std::ostream& log) : cfg_(std::move(cfg)), log_(log) {}

bool Runner::wants(const std::string& file) const {
    if (cfg_.format == "all") return true;
    return fs::path(file).extension() == "." + cfg_.format;
}

void Runner::emit(const fs::path& file, const std::function<void(std::ostream&)>& body) {
    if (!wants(file.filename().string())) return;
    const fs::path path = fs::path(cfg_.out) / file;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path.string() + ": cannot write");
    body(out);
    log_ << "wrote " << path.string() << '\n';
}

void Runner::emit_text(const fs::path& file, const std::string& text) {
    emit(file, [&](std::ostream& os) { os << text << '\n'; });
}

int Runner::map() {
    const Measure1D m0 = load_measure(cfg_.source);
    const Measure1D m1 = load_measure(cfg_.target);
    const MonotoneMap t = compute_monotone_map(m0, m1);
    emit("map.csv", [&](std::ostream& os) { write_map_csv(os, t, cfg_.n); });
    emit_text("map.json", map_descriptor_json(t, find_fixed_points(t)));
    return kExitOk;
}

int Runner::field() {
    const Measure1D m0 = load_measure(cfg_.source);
    const Measure1D m1 = load_measure(cfg_.target);
    const SeedSpec seed = seed_from(cfg_);
    const VelocityOptions opts = options_from(cfg_);
    if (cfg_.eps) {
        const ApproximateResult r = approximate_lipschitz(m0, m1, *cfg_.eps, seed, opts);
        emit("field.csv", [&](std::ostream& os) { write_field_csv(os, r.field, cfg_.n); });
        Json j = Json::parse(field_descriptor_json(r.field));
        j["approximate"] = approximate_json(r);
        j["approximate"]["eps"] = *cfg_.eps;
        j["approximate"]["max_difference_quotient"] = max_difference_quotient(r.field, cfg_.n);
        emit_text("field.json", j.dump(2));
        return kExitOk;
    }
    const VelocityField1D v = build_field(compute_monotone_map(m0, m1), seed, opts);
    emit("field.csv", [&](std::ostream& os) { write_field_csv(os, v, cfg_.n); });
    emit_text("field.json", field_descriptor_json(v));
    return kExitOk;
}

int Runner::flow() {
    const Measure1D m0 = load_measure(cfg_.source);
    const Measure1D m1 = load_measure(cfg_.target);
    const FlowMap phi(build_field(compute_monotone_map(m0, m1), seed_from(cfg_), options_from(cfg_)));
    const std::vector<double> x0 = cfg_.x0.empty() ? default_starts(m0) : cfg_.x0;
    const std::vector<double> times = cfg_.times.empty() ? default_times() : cfg_.times;
    emit("trajectories.csv", [&](std::ostream& os) { write_trajectories(os, phi, x0, times); });
    return kExitOk;
}

int Runner::verify() {
    const Measure1D m0 = load_measure(cfg_.source);
    const Measure1D m1 = load_measure(cfg_.target);
    const VelocityField1D v = build_field(compute_monotone_map(m0, m1), seed_from(cfg_), options_from(cfg_));
    const TransportReport rep = verify_transport(v, m0, m1, verify_options_from(cfg_));
    emit_text("report.json", rep.to_json());
    log_ << (rep.passed() ? "verification passed" : "verification FAILED") << '\n';
    return rep.passed() ? kExitOk : kExitVerification;
}

int Runner::example() {
    const Example ex = make_example(cfg_.example, cfg_.params);
    const fs::path dir = ex.name;
    const VelocityOptions opts = options_from(cfg_, ex.options);
    const VelocityField1D v = build_field(ex.map, cfg_.seed_given ? seed_from(cfg_) : ex.seed, opts);
    const FlowMap phi(v);
    emit(dir / "map.csv", [&](std::ostream& os) { write_map_csv(os, ex.map, cfg_.n); });
    emit(dir / "field.csv", [&](std::ostream& os) { write_field_csv(os, v, cfg_.n); });
    emit(dir / "densities.csv", [&](std::ostream& os) { write_densities_csv(os, ex.m0, ex.m1, cfg_.n); });
    emit(dir / "trajectories.csv",
         [&](std::ostream& os) { write_trajectories(os, phi, default_starts(ex.m0), default_times()); });
    emit_text(dir / "map.json", map_descriptor_json(ex.map, v.partition()));
    emit_text(dir / "field.json", field_descriptor_json(v));
    const TransportReport rep = verify_transport(v, ex.m0, ex.m1, verify_options_from(cfg_));
    Json j = Json::parse(rep.to_json());
    j["example"] = ex.name;
    j["description"] = ex.description;
    emit_text(dir / "report.json", j.dump(2));
    log_ << ex.name << ": " << (rep.passed() ? "verification passed" : "verification FAILED") << '\n';
    return rep.passed() ? kExitOk : kExitVerification;
}

int Runner::pathology() {
    std::vector<CounterexampleVariant> variants;
    if (cfg_.variant == "both") {
        variants = {CounterexampleVariant::quadratic, CounterexampleVariant::log_squared};
    } else {
        variants = {parse_counterexample_variant(cfg_.variant)};
    }
    Json summary = Json::array();
    bool ok = true;
    for (const CounterexampleVariant var : variants) {
        const CounterexampleMap cmap = build_counterexample(var);
        const std::string name = to_string(var);
        const GrowthTable g = probe_velocity_growth(cmap, cfg_.i_max);
        const IntegrabilityTable it = probe_non_integrability(cmap, cfg_.decades);
        emit("growth_" + name + ".csv", [&](std::ostream& os) { write_growth_csv(os, g); });
        emit("integrability_" + name + ".csv", [&](std::ostream& os) { write_integrability_csv(os, it); });
        Json s;
        s["variant"] = name;
        s["gamma"] = cmap.gamma();
        s["i_max"] = g.i_max;
        s["products_strictly_increasing"] = g.strictly_increasing;
        s["lower_bound_holds"] = g.lower_bound_holds;
        s["min_log_ratio"] = g.min_log_ratio;
        s["threshold"] = g.threshold;
        s["first_exceeding"] = g.first_exceeding ? Json(*g.first_exceeding) : Json(nullptr);
        s["v_half"] = it.v_half;
        s["l1_strictly_increasing"] = it.l1_strictly_increasing;
        s["anchors_strictly_increasing"] = it.anchors_strictly_increasing;
        s["no_plateau"] = it.no_plateau;
        s["max_osgood_defect"] = it.max_osgood_defect;
        summary.push_back(std::move(s));
        const bool growth_ok = g.strictly_increasing && g.lower_bound_holds;
        if (var == CounterexampleVariant::quadratic) ok = ok && growth_ok && g.first_exceeding.has_value();
        else ok = ok && growth_ok && it.l1_strictly_increasing && it.no_plateau;
    }
    Json j;
    j["schema_version"] = 1;
    j["passed"] = ok;
    j["variants"] = std::move(summary);
    emit_text("pathology.json", j.dump(2));
    log_ << (ok ? "divergence certified" : "divergence NOT certified") << '\n';
    return ok ? kExitOk : kExitVerification;
}

int Runner::sudakov() {
    const MeasureND m0 = load_measure_nd(cfg_.source);
    const MeasureND m1 = load_measure_nd(cfg_.target);
    const VelocityFieldND v = assemble_field(decompose(m0, m1), seed_from(cfg_), options_from(cfg_));
    NdVerifyOptions o;
    o.samples = cfg_.samples;
    o.rays = cfg_.rays;
    o.projections = cfg_.projections;
    o.rng_seed = cfg_.rng_seed;
    emit("field_samples.csv", [&](std::ostream& os) { write_field_samples(os, v, cfg_.samples, cfg_.rng_seed); });
    const NdReport rep = verify_nd(v, o);
    emit_text("sudakov_report.json", rep.to_json());
    log_ << (rep.passed() ? "verification passed" : "verification FAILED") << '\n';
    return rep.passed() ? kExitOk : kExitVerification;
}

}  // namespace transflow::cli
