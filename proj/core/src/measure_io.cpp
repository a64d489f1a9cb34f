#include "transflow/measure_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "json_fields.hpp"
#include "transflow/errors.hpp"

namespace transflow {

namespace {

using detail::JsonCursor;

Measure1D parse_node(const JsonCursor& node) {
    const std::string kind = node.field("kind").string();
    const JsonCursor params = node.field("params");
    if (kind == "uniform") {
        const double a = params.field("a").number();
        const double b = params.field("b").number();
        if (!(a < b)) throw ParseError(params.path() + ": need a < b");
        return Measure1D::uniform(a, b);
    }
    if (kind == "gaussian") {
        const double mean = params.field("mean").number();
        const double sigma = params.field("sigma").positive();
        const double eps = params.optional_number("tail_eps", Measure1D::kDefaultTailEps);
        if (!(eps > 0.0 && eps < 0.5)) throw ParseError(params.path() + ".tail_eps: must lie in (0, 1/2)");
        return Measure1D::gaussian(mean, sigma, eps);
    }
    if (kind == "affine_image") {
        const Measure1D base = parse_node(params.field("base"));
        const double alpha = params.field("alpha").positive();
        const double beta = params.field("beta").number();
        return Measure1D::affine_image(base, alpha, beta);
    }
    if (kind == "piecewise" || kind == "grid") {
        std::vector<double> x = params.field("x").numbers();
        std::vector<double> d = params.field("density").numbers();
        if (x.size() != d.size())
            throw ParseError(params.path() + ": x and density differ in length (" + std::to_string(x.size()) +
                             " vs " + std::to_string(d.size()) + ")");
        if (x.size() < 2) throw ParseError(params.path() + ".x: need at least two points");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1]))
                throw ParseError(params.path() + ".x[" + std::to_string(i) + "]: abscissae must increase strictly");
        return kind == "grid" ? Measure1D::grid(std::move(x), std::move(d))
                              : Measure1D::piecewise_linear(std::move(x), std::move(d));
    }
    throw ParseError(node.path() + ".kind: unknown kind '" + kind +
                     "' (expected uniform | gaussian | affine_image | piecewise | grid)");
}

}  // namespace

Measure1D parse_measure(std::string_view json_text) {
    const nlohmann::json doc = detail::parse_json(json_text);
    return parse_node(JsonCursor(doc, "$"));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Measure1D load_measure(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return parse_measure(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace transflow
