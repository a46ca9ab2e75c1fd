#pragma once

#include "rplink/milp.hpp"

#include <map>
#include <string>
#include <vector>

namespace rplink {

/// Solved variable values laid out per (rp, k), plus the demand they served.
/// Truth runs are reshaped to (period, k) so the same accessors apply.
struct Schedule {
    int rp_count = 0;
    int steps = 0; // per rp
    std::vector<std::string> generator_ids;
    std::vector<std::string> storage_ids;
    std::vector<double> demand;                                    // rp*steps
    std::map<std::pair<Role, std::string>, std::vector<double>> columns;

    bool has(Role role, const std::string& entity) const {
        return columns.count({role, entity}) > 0;
    }
    double at(Role role, const std::string& entity, int rp, int k) const {
        return columns.at({role, entity})[static_cast<size_t>(rp) * steps + k];
    }
};

} // namespace rplink
