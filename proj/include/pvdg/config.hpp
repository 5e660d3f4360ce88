#pragma once

// Scenario configuration document (JSON, schema_version 1).
//
//   {
//     "schema_version": 1,
//     "name": "Case 3",
//     "site":    { "latitude": 31.5, "longitude": 0, "tilt": 30, "azimuth": 0, "albedo": 0.2 },
//     "pv":      { "cell": { "V_oc_stc": 0.6, "I_sc_stc": 8, "K_v": -0.002, "K_i": 0.003,
//                            "R_s": 0.005, "ideality": 1.0, "NOCT": 45 },
//                  "cells_per_module": 60, "modules_series": 20, "target_kWp": 700 },
//     "fleet":   [ { "id": "DG1", "rating_kVA": 200, "power_factor": 1.0, "fuel_A": 0.246,
//                    "fuel_B": 0.08415, "C_up": 10, "C_d": 5, "C_om": 3, "min_load_frac": 0.3 } ],
//     "grid":    { "tau": 8, "period": 12, "phase_offset": 0, "P_max": 500 },
//     "costs":   { "C_e_g": 0.15, "C_exp": 0.1, "C_f": 1.4 },
//     "weights": { "w1": 0.5, "w2": 0.5 },
//     "run":     { "mode": "dp", "initial_state": [0], "pv_target_kWp": 700 }
//   }
//
// "pv" is optional; it takes either "modules_parallel" or "target_kWp".
// All problems in a document are reported together.

#include "pvdg/errors.hpp"
#include "pvdg/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace pvdg {

inline constexpr int kConfigSchemaVersion = 1;

struct LoadedConfig {
    ScenarioConfig config;
    /// One entry per default that was applied, e.g. "site.albedo = 0.2 (default)".
    std::vector<std::string> defaults_applied;
};

namespace detail {

class ConfigReader {
public:
    std::vector<std::string> errors;
    std::vector<std::string> defaults;

    /// Object at `path`, or nullptr after recording an error.
    const nlohmann::json* object(const nlohmann::json& parent, const std::string& key, const std::string& path,
                                 bool required, const std::set<std::string>& allowed)
    {
        if (!parent.contains(key)) {
            if (required) errors.push_back(join(path, key) + ": missing required section");
            return nullptr;
        }
        const auto& node = parent.at(key);
        if (!node.is_object()) {
            errors.push_back(join(path, key) + ": expected an object");
            return nullptr;
        }
        check_keys(node, join(path, key), allowed);
        return &node;
    }

    void check_keys(const nlohmann::json& node, const std::string& path, const std::set<std::string>& allowed)
    {
        for (const auto& [k, v] : node.items()) {
            if (!allowed.count(k)) errors.push_back(join(path, k) + ": unknown key");
        }
    }

    std::optional<double> number(const nlohmann::json& node, const std::string& key, const std::string& path,
                                 std::optional<double> fallback = std::nullopt)
    {
        if (!node.contains(key)) {
            if (fallback) {
                defaults.push_back(join(path, key) + " = " + format(*fallback) + " (default)");
                return fallback;
            }
            errors.push_back(join(path, key) + ": missing required key");
            return std::nullopt;
        }
        const auto& v = node.at(key);
        if (!v.is_number()) {
            errors.push_back(join(path, key) + ": expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<int> integer(const nlohmann::json& node, const std::string& key, const std::string& path)
    {
        if (!node.contains(key)) {
            errors.push_back(join(path, key) + ": missing required key");
            return std::nullopt;
        }
        const auto& v = node.at(key);
        if (!v.is_number_integer()) {
            errors.push_back(join(path, key) + ": expected an integer");
            return std::nullopt;
        }
        return v.get<int>();
    }

    std::optional<std::string> string(const nlohmann::json& node, const std::string& key, const std::string& path,
                                      std::optional<std::string> fallback = std::nullopt)
    {
        if (!node.contains(key)) {
            if (fallback) {
                defaults.push_back(join(path, key) + " = \"" + *fallback + "\" (default)");
                return fallback;
            }
            errors.push_back(join(path, key) + ": missing required key");
            return std::nullopt;
        }
        const auto& v = node.at(key);
        if (!v.is_string()) {
            errors.push_back(join(path, key) + ": expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    /// Records `message` at `path` unless `ok`.
    void require(bool ok, const std::string& path, const std::string& message)
    {
        if (!ok) errors.push_back(path + ": " + message);
    }

    static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

    static std::string format(double v)
    {
        std::ostringstream os;
        os << v;
        return os.str();
    }
};

inline std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace detail

/// Parses a configuration document. `source` names the document in messages.
inline LoadedConfig parse_config(const std::string& text, const std::string& source = "config")
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = detail::line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw DataError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
    if (!doc.is_object()) throw DataError(source + ": top level must be an object");

    detail::ConfigReader rd;
    LoadedConfig out;
    auto& cfg = out.config;
    rd.check_keys(doc, "", {"schema_version", "name", "site", "pv", "fleet", "grid", "costs", "weights", "run"});

    if (const auto v = rd.integer(doc, "schema_version", ""))
        rd.require(*v == kConfigSchemaVersion, "schema_version", "unsupported version " + std::to_string(*v));
    if (const auto v = rd.string(doc, "name", "", std::string("scenario"))) cfg.name = *v;

    if (const auto* site = rd.object(doc, "site", "", true, {"latitude", "longitude", "tilt", "azimuth", "albedo"})) {
        if (auto v = rd.number(*site, "latitude", "site")) {
            cfg.site.latitude = *v;
            rd.require(*v >= -90 && *v <= 90, "site.latitude", "must lie in [-90, 90]");
        }
        if (auto v = rd.number(*site, "longitude", "site", 0.0)) {
            cfg.site.longitude = *v;
            rd.require(*v >= -180 && *v <= 180, "site.longitude", "must lie in [-180, 180]");
        }
        if (auto v = rd.number(*site, "tilt", "site")) {
            cfg.site.tilt = *v;
            rd.require(*v >= 0 && *v <= 90, "site.tilt", "must lie in [0, 90]");
        }
        if (auto v = rd.number(*site, "azimuth", "site", 0.0)) {
            cfg.site.surface_azimuth = *v;
            rd.require(*v >= -180 && *v <= 180, "site.azimuth", "must lie in [-180, 180]");
        }
        if (auto v = rd.number(*site, "albedo", "site", 0.2)) {
            cfg.site.albedo = *v;
            rd.require(*v >= 0 && *v <= 1, "site.albedo", "must lie in [0, 1]");
        }
    }

    if (const auto* pv = rd.object(doc, "pv", "", false,
                                   {"cell", "cells_per_module", "modules_series", "modules_parallel", "target_kWp"})) {
        PVBlock block;
        if (const auto* cell = rd.object(*pv, "cell", "pv", true,
                                         {"V_oc_stc", "I_sc_stc", "K_v", "K_i", "R_s", "ideality", "NOCT"})) {
            auto& c = block.cell;
            if (auto v = rd.number(*cell, "V_oc_stc", "pv.cell")) c.voc_stc = *v;
            if (auto v = rd.number(*cell, "I_sc_stc", "pv.cell")) c.isc_stc = *v;
            if (auto v = rd.number(*cell, "K_v", "pv.cell")) c.k_v = *v;
            if (auto v = rd.number(*cell, "K_i", "pv.cell")) c.k_i = *v;
            if (auto v = rd.number(*cell, "R_s", "pv.cell")) c.series_resistance = *v;
            if (auto v = rd.number(*cell, "ideality", "pv.cell")) c.ideality = *v;
            if (auto v = rd.number(*cell, "NOCT", "pv.cell", 45.0)) c.noct = *v;
            try {
                c.validate();
            } catch (const DomainError& e) {
                rd.errors.push_back(std::string("pv.cell: ") + e.what());
            }
        }
        if (auto v = rd.integer(*pv, "cells_per_module", "pv")) block.array.cells_per_module = *v;
        if (auto v = rd.integer(*pv, "modules_series", "pv")) block.array.modules_series = *v;
        rd.require(block.array.cells_per_module >= 1, "pv.cells_per_module", "must be >= 1");
        rd.require(block.array.modules_series >= 1, "pv.modules_series", "must be >= 1");
        const bool has_parallel = pv->contains("modules_parallel");
        const bool has_target = pv->contains("target_kWp");
        rd.require(has_parallel != has_target, "pv", "give exactly one of modules_parallel or target_kWp");
        if (has_parallel) {
            if (auto v = rd.integer(*pv, "modules_parallel", "pv")) {
                block.array.modules_parallel = *v;
                rd.require(*v >= 1, "pv.modules_parallel", "must be >= 1");
            }
        } else if (has_target) {
            if (auto v = rd.number(*pv, "target_kWp", "pv")) {
                rd.require(*v > 0, "pv.target_kWp", "must be positive");
                if (*v > 0 && rd.errors.empty()) {
                    try {
                        block.array = size_array(*v, block.cell, block.array.cells_per_module, block.array.modules_series);
                    } catch (const DomainError& e) {
                        rd.errors.push_back(std::string("pv.target_kWp: ") + e.what());
                    }
                }
            }
        }
        cfg.pv = block;
    }

    if (!doc.contains("fleet")) {
        rd.errors.emplace_back("fleet: missing required section");
    } else if (!doc.at("fleet").is_array() || doc.at("fleet").empty()) {
        rd.errors.emplace_back("fleet: expected a non-empty array");
    } else {
        std::set<std::string> ids;
        const auto& fleet = doc.at("fleet");
        rd.require(fleet.size() <= kMaxFleetSize, "fleet", "at most " + std::to_string(kMaxFleetSize) + " generators");
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            const std::string path = "fleet[" + std::to_string(i) + "]";
            const auto& node = fleet[i];
            if (!node.is_object()) {
                rd.errors.push_back(path + ": expected an object");
                continue;
            }
            rd.check_keys(node, path,
                          {"id", "rating_kVA", "power_factor", "fuel_A", "fuel_B", "C_up", "C_d", "C_om", "min_load_frac"});
            DieselGenSpec g;
            if (auto v = rd.string(node, "id", path)) {
                g.id = *v;
                rd.require(!v->empty() && v->find(',') == std::string::npos, path + ".id", "must be non-empty without commas");
                rd.require(ids.insert(*v).second, path + ".id", "duplicate generator id");
            }
            double kva = 0.0, pf = 1.0;
            if (auto v = rd.number(node, "rating_kVA", path)) {
                kva = *v;
                rd.require(kva > 0, path + ".rating_kVA", "rated power must be positive");
            }
            if (auto v = rd.number(node, "power_factor", path, 1.0)) {
                pf = *v;
                rd.require(pf > 0 && pf <= 1, path + ".power_factor", "must lie in (0, 1]");
            }
            g.rated_kw = rated_kw_from_kva(kva, pf);
            if (i == 0) cfg.fleet_power_factor = pf;
            if (auto v = rd.number(node, "fuel_A", path, kFuelSlopeDefault)) g.fuel_a = *v;
            if (auto v = rd.number(node, "fuel_B", path, kFuelNoLoadDefault)) g.fuel_b = *v;
            rd.require(g.fuel_a >= 0 && g.fuel_b >= 0, path, "fuel constants must be non-negative");
            if (auto v = rd.number(node, "C_up", path)) g.cost_startup = *v;
            if (auto v = rd.number(node, "C_d", path)) g.cost_shutdown = *v;
            if (auto v = rd.number(node, "C_om", path)) g.cost_om = *v;
            rd.require(g.cost_startup >= 0 && g.cost_shutdown >= 0 && g.cost_om >= 0, path, "costs must be non-negative");
            if (auto v = rd.number(node, "min_load_frac", path, kMinLoadFracDefault)) {
                g.min_load_frac = *v;
                rd.require(*v > 0 && *v <= 1, path + ".min_load_frac", "must lie in (0, 1]");
            }
            cfg.fleet.push_back(g);
        }
    }

    if (const auto* grid = rd.object(doc, "grid", "", true, {"tau", "period", "phase_offset", "P_max"})) {
        if (auto v = rd.number(*grid, "tau", "grid")) cfg.grid.on_hours = *v;
        if (auto v = rd.number(*grid, "period", "grid")) cfg.grid.period_hours = *v;
        if (auto v = rd.number(*grid, "phase_offset", "grid", 0.0)) cfg.grid.phase_offset = *v;
        if (auto v = rd.number(*grid, "P_max", "grid")) cfg.grid.max_power_kw = *v;
        rd.require(cfg.grid.period_hours > 0, "grid.period", "must be positive");
        rd.require(cfg.grid.on_hours >= 0, "grid.tau", "must be non-negative");
        rd.require(cfg.grid.on_hours <= cfg.grid.period_hours, "grid.tau", "must not exceed grid.period");
        rd.require(cfg.grid.phase_offset >= 0 && cfg.grid.phase_offset < cfg.grid.period_hours, "grid.phase_offset",
                   "must lie in [0, period)");
        rd.require(cfg.grid.max_power_kw > 0, "grid.P_max", "must be positive");
    }

    if (const auto* costs = rd.object(doc, "costs", "", true, {"C_e_g", "C_exp", "C_f"})) {
        if (auto v = rd.number(*costs, "C_e_g", "costs")) cfg.costs.grid_price = *v;
        if (auto v = rd.number(*costs, "C_exp", "costs")) cfg.costs.export_price = *v;
        if (auto v = rd.number(*costs, "C_f", "costs")) cfg.costs.fuel_price = *v;
        rd.require(cfg.costs.grid_price >= 0 && cfg.costs.export_price >= 0 && cfg.costs.fuel_price >= 0, "costs",
                   "prices must be non-negative");
    }

    const nlohmann::json empty = nlohmann::json::object();
    const auto* weights = rd.object(doc, "weights", "", false, {"w1", "w2"});
    if (auto v = rd.number(weights ? *weights : empty, "w1", "weights", 0.5)) cfg.costs.w1 = *v;
    if (auto v = rd.number(weights ? *weights : empty, "w2", "weights", 0.5)) cfg.costs.w2 = *v;
    rd.require(cfg.costs.w1 >= 0 && cfg.costs.w2 >= 0 && cfg.costs.w1 + cfg.costs.w2 > 0, "weights",
               "must be non-negative and not both zero");

    const auto* run = rd.object(doc, "run", "", false, {"mode", "initial_state", "pv_target_kWp"});
    if (auto v = rd.string(run ? *run : empty, "mode", "run", std::string("dp"))) {
        if (*v == "dp")
            cfg.mode = SolverMode::Dp;
        else if (*v == "greedy")
            cfg.mode = SolverMode::Greedy;
        else
            rd.errors.push_back("run.mode: expected \"dp\" or \"greedy\"");
    }
    if (run && run->contains("initial_state")) {
        const auto& s = run->at("initial_state");
        std::vector<bool> bits;
        bool ok = s.is_array();
        if (ok)
            for (const auto& b : s) {
                if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) ok = false;
                else bits.push_back(b.get<int>() == 1);
            }
        if (!ok)
            rd.errors.emplace_back("run.initial_state: expected an array of 0/1");
        else if (bits.size() != cfg.fleet.size())
            rd.errors.emplace_back("run.initial_state: length must equal the fleet size");
        else
            cfg.initial_state = CommitmentState(bits);
    }
    if (auto v = rd.number(run ? *run : empty, "pv_target_kWp", "run", 700.0)) {
        cfg.pv_target_kwp = *v;
        rd.require(*v > 0, "run.pv_target_kWp", "must be positive");
    }

    if (!rd.errors.empty()) {
        std::string msg = source + ": invalid configuration";
        for (const auto& e : rd.errors) msg += "\n  " + e;
        throw DataError(msg);
    }
    out.defaults_applied = std::move(rd.defaults);
    return out;
}

inline LoadedConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

/// Base configuration used when none is given: synthetic-year site, case-study grid and costs.
inline ScenarioConfig default_base_config()
{
    ScenarioConfig cfg;
    cfg.name = "base";
    cfg.site.latitude = 31.5;
    cfg.site.longitude = 0.0;
    cfg.site.tilt = 30.0;
    cfg.site.surface_azimuth = 0.0;
    cfg.site.albedo = 0.2;
    cfg.fleet = {default_generator_template()};
    cfg.fleet.front().rated_kw = 500.0;
    cfg.fleet.front().id = "DG1";
    cfg.pv = PVBlock{};
    cfg.grid = GridSchedule{8.0, 12.0, 0.0, 500.0};
    cfg.costs = CostParams{0.15, 0.1, 1.4, 0.5, 0.5};
    cfg.mode = SolverMode::Dp;
    return cfg;
}

} // namespace pvdg
