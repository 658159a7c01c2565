#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "biruin/invert.hpp"
#include "biruin/model.hpp"
#include "biruin/simulate.hpp"

namespace biruin {

struct NamedModel {
    std::string name;
    ModelSpec model;
};

struct OutputOptions {
    std::string dir = "out";
    std::vector<std::string> formats{"csv"};
    bool rescale_axes = false;
    std::vector<double> levels{0.25, 0.15, 0.10, 0.05};
    std::vector<std::pair<double, double>> points;
};

struct Config {
    std::vector<NamedModel> models;  // "model" gives one entry, "models" several
    GridSpec grid;
    InvParams inversion;
    SimParams simulation;
    OutputOptions output;

    const ModelSpec& model() const { return models.front().model; }
};

// Exact value of a decimal or fraction string: "0.125", "-3", "1/3", "2.5e-3".
Rational parse_decimal(std::string_view s);
// Exact value of a JSON number or string; binary doubles are read through their
// shortest round-trip decimal form.
Rational exact_number(const nlohmann::json& v);

ModelSpec parse_model(const nlohmann::json& j);
Config parse_config(const nlohmann::json& j);
// Throws ConfigError for unreadable files, bad JSON and schema violations.
Config load_config(const std::string& path);

}  // namespace biruin
