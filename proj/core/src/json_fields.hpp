#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "transflow/errors.hpp"

namespace transflow::detail {

inline nlohmann::json parse_json(std::string_view text) {
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

/// JSON node with its path from the document root, for field diagnostics.
class JsonCursor {
public:
    JsonCursor(const nlohmann::json& node, std::string path) : node_(&node), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }
    [[nodiscard]] const nlohmann::json& raw() const noexcept { return *node_; }

    [[nodiscard]] bool has(const char* key) const { return node_->is_object() && node_->contains(key); }

    [[nodiscard]] JsonCursor field(const char* key) const {
        if (!node_->is_object()) throw ParseError(path_ + ": expected an object");
        const auto it = node_->find(key);
        if (it == node_->end()) throw ParseError(path_ + "." + key + ": missing field");
        return {*it, path_ + "." + key};
    }

    [[nodiscard]] std::string string() const {
        if (!node_->is_string()) throw ParseError(path_ + ": expected a string");
        return node_->get<std::string>();
    }

    [[nodiscard]] double number() const {
        if (!node_->is_number()) throw ParseError(path_ + ": expected a number");
        const double v = node_->get<double>();
        if (!std::isfinite(v)) throw ParseError(path_ + ": expected a finite number");
        return v;
    }

    [[nodiscard]] double positive() const {
        const double v = number();
        if (!(v > 0.0)) throw ParseError(path_ + ": expected a positive number");
        return v;
    }

    [[nodiscard]] long integer() const {
        if (!node_->is_number_integer()) throw ParseError(path_ + ": expected an integer");
        return node_->get<long>();
    }

    [[nodiscard]] double optional_number(const char* key, double fallback) const {
        return has(key) ? field(key).number() : fallback;
    }

    [[nodiscard]] std::vector<double> numbers() const {
        if (!node_->is_array()) throw ParseError(path_ + ": expected an array of numbers");
        std::vector<double> out;
        out.reserve(node_->size());
        for (std::size_t i = 0; i < node_->size(); ++i)
            out.push_back(JsonCursor((*node_)[i], path_ + "[" + std::to_string(i) + "]").number());
        return out;
    }

private:
    const nlohmann::json* node_;
    std::string path_;
};

}  // namespace transflow::detail
