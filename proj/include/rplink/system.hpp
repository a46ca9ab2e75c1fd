#pragma once

#include <string>
#include <vector>

namespace rplink {

/// Dispatchable thermal unit with unit-commitment logic.
/// Ramp rates are per step; min up/down times are in steps.
struct ThermalGenerator {
    std::string id;
    double capacity = 0.0;      // max output when committed [MW]
    double min_output = 0.0;    // min output when committed [MW]
    double ramp_up = 0.0;       // [MW/step]
    double ramp_down = 0.0;     // [MW/step]
    int min_up = 1;             // [steps]
    int min_down = 1;           // [steps]
    double var_cost = 0.0;      // [$/MWh]
    double commit_cost = 0.0;   // [$/committed step]
    double startup_cost = 0.0;  // [$/start]
    double shutdown_cost = 0.0; // [$/stop]
    bool relaxed_uc = false;    // commitment continuous in [0,1] instead of binary
};

struct StorageUnit {
    std::string id;
    double energy_capacity = 0.0; // [MWh]
    double max_charge = 0.0;      // [MW]
    double max_discharge = 0.0;   // [MW]
    double charge_efficiency = 1.0;
    double discharge_efficiency = 1.0;
    double initial_level_fraction = 0.0; // of energy_capacity
};

struct DemandSeries {
    std::vector<double> values; // [MW], one per step
    double pns_penalty = 0.0;   // [$/MWh unserved]
    double eps_penalty = 0.0;   // [$/MWh excess]
};

/// The physical problem over the full chronological horizon.
/// Immutable after load; safe to share across threads.
struct SystemInstance {
    std::vector<ThermalGenerator> generators;
    std::vector<StorageUnit> storages;
    DemandSeries demand;
    int period_length = 0; // steps per period (K)

    int step_count() const { return static_cast<int>(demand.values.size()); }
    int period_count() const { return period_length > 0 ? step_count() / period_length : 0; }
};

/// Loads an instance bundle: a JSON manifest plus the demand CSV it names
/// (single `demand_mw` column). Throws ParseError on malformed input and
/// ValidationError when a loaded instance violates an invariant.
SystemInstance load_instance(const std::string& manifest_path);

/// Writes the bundle back out (manifest + demand CSV next to it).
void save_instance(const std::string& manifest_path, const SystemInstance& inst);

/// Returns one human-readable message per violated invariant, each naming
/// the entity id and field. Empty means the instance is valid.
std::vector<std::string> validate_instance(const SystemInstance& inst);

} // namespace rplink
