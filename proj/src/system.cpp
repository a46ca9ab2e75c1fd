#include "rplink/system.hpp"

#include "rplink/csv.hpp"
#include "rplink/errors.hpp"
#include "rplink/numfmt.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace rplink {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Entity ids end up as LP variable name fragments, so the charset is restricted.
bool valid_id(const std::string& id) {
    if (id.empty()) return false;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
        if (!ok) return false;
    }
    return true;
}

double get_number(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key))
        throw ParseError(ctx + ": missing field '" + key + "'");
    if (!obj[key].is_number())
        throw ParseError(ctx + ": field '" + key + "' must be a number");
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback,
                     const std::string& ctx) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ParseError(ctx + ": field '" + key + "' must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key))
        throw ParseError(ctx + ": missing field '" + key + "'");
    if (!obj[key].is_number_integer())
        throw ParseError(ctx + ": field '" + key + "' must be an integer");
    return obj[key].get<int>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key))
        throw ParseError(ctx + ": missing field '" + key + "'");
    if (!obj[key].is_string())
        throw ParseError(ctx + ": field '" + key + "' must be a string");
    return obj[key].get<std::string>();
}

ThermalGenerator parse_generator(const json& g, const std::string& ctx) {
    ThermalGenerator out;
    out.id = get_string(g, "id", ctx);
    out.capacity = get_number(g, "capacity", ctx);
    out.min_output = get_number_or(g, "min_output", 0.0, ctx);
    out.ramp_up = get_number(g, "ramp_up", ctx);
    out.ramp_down = get_number(g, "ramp_down", ctx);
    out.min_up = get_int(g, "min_up", ctx);
    out.min_down = get_int(g, "min_down", ctx);
    out.var_cost = get_number(g, "var_cost", ctx);
    out.commit_cost = get_number_or(g, "commit_cost", 0.0, ctx);
    out.startup_cost = get_number_or(g, "startup_cost", 0.0, ctx);
    out.shutdown_cost = get_number_or(g, "shutdown_cost", 0.0, ctx);
    if (g.contains("relaxed_uc")) {
        if (!g["relaxed_uc"].is_boolean())
            throw ParseError(ctx + ": field 'relaxed_uc' must be a boolean");
        out.relaxed_uc = g["relaxed_uc"].get<bool>();
    }
    return out;
}

StorageUnit parse_storage(const json& s, const std::string& ctx) {
    StorageUnit out;
    out.id = get_string(s, "id", ctx);
    out.energy_capacity = get_number(s, "energy_capacity", ctx);
    out.max_charge = get_number(s, "max_charge", ctx);
    out.max_discharge = get_number(s, "max_discharge", ctx);
    out.charge_efficiency = get_number_or(s, "charge_efficiency", 1.0, ctx);
    out.discharge_efficiency = get_number_or(s, "discharge_efficiency", 1.0, ctx);
    out.initial_level_fraction = get_number_or(s, "initial_level_fraction", 0.0, ctx);
    return out;
}

std::vector<double> read_demand_csv(const std::string& path) {
    auto table = csv::read_file(path);
    int col = table.column("demand_mw");
    if (col < 0)
        throw ParseError(path + ": demand file must have a 'demand_mw' column");
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        values.push_back(csv::parse_double(
            table.rows[i][static_cast<size_t>(col)],
            path + ":" + std::to_string(i + 2) + ":demand_mw"));
    }
    return values;
}

} // namespace

SystemInstance load_instance(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ParseError(manifest_path + ": cannot open file");

    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(manifest_path + ": " + e.what());
    }

    SystemInstance inst;
    inst.period_length = get_int(root, "period_length", manifest_path);

    if (root.contains("generators")) {
        if (!root["generators"].is_array())
            throw ParseError(manifest_path + ": 'generators' must be an array");
        int idx = 0;
        for (const auto& g : root["generators"]) {
            inst.generators.push_back(
                parse_generator(g, manifest_path + ": generators[" + std::to_string(idx) + "]"));
            ++idx;
        }
    }
    if (root.contains("storages")) {
        if (!root["storages"].is_array())
            throw ParseError(manifest_path + ": 'storages' must be an array");
        int idx = 0;
        for (const auto& s : root["storages"]) {
            inst.storages.push_back(
                parse_storage(s, manifest_path + ": storages[" + std::to_string(idx) + "]"));
            ++idx;
        }
    }

    if (!root.contains("demand") || !root["demand"].is_object())
        throw ParseError(manifest_path + ": missing 'demand' object");
    const auto& d = root["demand"];
    inst.demand.pns_penalty = get_number(d, "pns_penalty", manifest_path + ": demand");
    inst.demand.eps_penalty = get_number(d, "eps_penalty", manifest_path + ": demand");
    std::string demand_file = "demand.csv";
    if (d.contains("file")) demand_file = get_string(d, "file", manifest_path + ": demand");

    fs::path demand_path = fs::path(manifest_path).parent_path() / demand_file;
    inst.demand.values = read_demand_csv(demand_path.string());

    if (inst.period_length <= 0)
        throw ValidationError(manifest_path + ": period_length must be positive");
    if (inst.step_count() % inst.period_length != 0)
        throw ValidationError(manifest_path + ": demand length " +
                              std::to_string(inst.step_count()) +
                              " is not divisible by period_length " +
                              std::to_string(inst.period_length));

    auto violations = validate_instance(inst);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << manifest_path << ": invalid instance:";
        for (const auto& v : violations) msg << "\n  - " << v;
        throw ValidationError(msg.str());
    }
    return inst;
}

void save_instance(const std::string& manifest_path, const SystemInstance& inst) {
    json root;
    root["period_length"] = inst.period_length;
    root["generators"] = json::array();
    for (const auto& g : inst.generators) {
        json jg;
        jg["id"] = g.id;
        jg["capacity"] = g.capacity;
        jg["min_output"] = g.min_output;
        jg["ramp_up"] = g.ramp_up;
        jg["ramp_down"] = g.ramp_down;
        jg["min_up"] = g.min_up;
        jg["min_down"] = g.min_down;
        jg["var_cost"] = g.var_cost;
        jg["commit_cost"] = g.commit_cost;
        jg["startup_cost"] = g.startup_cost;
        jg["shutdown_cost"] = g.shutdown_cost;
        jg["relaxed_uc"] = g.relaxed_uc;
        root["generators"].push_back(jg);
    }
    root["storages"] = json::array();
    for (const auto& s : inst.storages) {
        json js;
        js["id"] = s.id;
        js["energy_capacity"] = s.energy_capacity;
        js["max_charge"] = s.max_charge;
        js["max_discharge"] = s.max_discharge;
        js["charge_efficiency"] = s.charge_efficiency;
        js["discharge_efficiency"] = s.discharge_efficiency;
        js["initial_level_fraction"] = s.initial_level_fraction;
        root["storages"].push_back(js);
    }
    root["demand"] = {{"file", "demand.csv"},
                      {"pns_penalty", inst.demand.pns_penalty},
                      {"eps_penalty", inst.demand.eps_penalty}};

    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw ParseError(manifest_path + ": cannot open file for writing");
    out << root.dump(2) << '\n';

    csv::Table table;
    table.header = {"demand_mw"};
    for (double v : inst.demand.values) table.rows.push_back({fmt_shortest(v)});
    fs::path demand_path = fs::path(manifest_path).parent_path() / "demand.csv";
    csv::write_file(demand_path.string(), table);
}

std::vector<std::string> validate_instance(const SystemInstance& inst) {
    std::vector<std::string> out;
    auto add = [&out](const std::string& entity, const std::string& field,
                      const std::string& what) {
        out.push_back(entity + ": " + field + " " + what);
    };

    const int K = inst.period_length;
    if (K <= 0) add("instance", "period_length", "must be positive");
    if (inst.generators.empty() && inst.storages.empty())
        add("instance", "generators/storages", "at least one generator or storage required");
    if (K > 0 && inst.step_count() % K != 0)
        add("instance", "demand.values",
            "length " + std::to_string(inst.step_count()) + " not divisible by period_length " +
                std::to_string(K));
    if (inst.demand.values.empty()) add("instance", "demand.values", "must be non-empty");

    std::set<std::string> seen_ids;
    auto check_id = [&](const std::string& id, const std::string& kind) {
        std::string label = kind + " '" + id + "'";
        if (!valid_id(id))
            add(label, "id", "must be non-empty and use only [A-Za-z0-9_.-]");
        else if (!seen_ids.insert(id).second)
            add(label, "id", "is duplicated");
    };

    double max_var_cost = 0.0;
    for (const auto& g : inst.generators) {
        check_id(g.id, "generator");
        const std::string e = "generator '" + g.id + "'";
        if (!(g.capacity > 0)) add(e, "capacity", "must be > 0");
        if (g.min_output < 0 || g.min_output > g.capacity)
            add(e, "min_output", "must be in [0, capacity]");
        if (!(g.ramp_up > 0)) add(e, "ramp_up", "must be > 0");
        if (!(g.ramp_down > 0)) add(e, "ramp_down", "must be > 0");
        if (g.min_up < 1 || (K > 0 && g.min_up > K))
            add(e, "min_up", "must be in [1, period_length]");
        if (g.min_down < 1 || (K > 0 && g.min_down > K))
            add(e, "min_down", "must be in [1, period_length]");
        if (g.var_cost < 0) add(e, "var_cost", "must be >= 0");
        if (g.commit_cost < 0) add(e, "commit_cost", "must be >= 0");
        if (g.startup_cost < 0) add(e, "startup_cost", "must be >= 0");
        if (g.shutdown_cost < 0) add(e, "shutdown_cost", "must be >= 0");
        max_var_cost = std::max(max_var_cost, g.var_cost);
    }
    for (const auto& s : inst.storages) {
        check_id(s.id, "storage");
        const std::string e = "storage '" + s.id + "'";
        if (!(s.energy_capacity > 0)) add(e, "energy_capacity", "must be > 0");
        if (!(s.max_charge > 0)) add(e, "max_charge", "must be > 0");
        if (!(s.max_discharge > 0)) add(e, "max_discharge", "must be > 0");
        if (!(s.charge_efficiency > 0 && s.charge_efficiency <= 1))
            add(e, "charge_efficiency", "must be in (0, 1]");
        if (!(s.discharge_efficiency > 0 && s.discharge_efficiency <= 1))
            add(e, "discharge_efficiency", "must be in (0, 1]");
        if (s.initial_level_fraction < 0 || s.initial_level_fraction > 1)
            add(e, "initial_level_fraction", "must be in [0, 1]");
    }

    for (size_t i = 0; i < inst.demand.values.size(); ++i) {
        if (inst.demand.values[i] < 0 || !std::isfinite(inst.demand.values[i])) {
            add("demand", "values[" + std::to_string(i) + "]", "must be finite and >= 0");
            break;
        }
    }
    if (inst.demand.pns_penalty < 0) add("demand", "pns_penalty", "must be >= 0");
    if (inst.demand.eps_penalty < 0) add("demand", "eps_penalty", "must be >= 0");
    // PNS must be the dispatch of last resort.
    if (!inst.generators.empty() && inst.demand.pns_penalty <= max_var_cost)
        add("demand", "pns_penalty",
            "must exceed every generator var_cost (max is " + fmt_shortest(max_var_cost) + ")");

    return out;
}

} // namespace rplink
