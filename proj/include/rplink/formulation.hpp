#pragma once

#include "rplink/aggregation.hpp"
#include "rplink/milp.hpp"
#include "rplink/schedule.hpp"
#include "rplink/system.hpp"

#include <map>
#include <set>
#include <string>
#include <tuple>

namespace rplink {

enum class LinkingKind {
    no_enforcement,    // drop constraints whose window leaves the period
    fixed_values,      // substitute user-supplied boundary values
    cyclic,            // wrap each period onto itself
    markov,            // expected previous step over predecessor probabilities
    full_chronological // truth mode: one block over the whole horizon
};

/// Boundary values for the fixed-values method, keyed by (role, rp, entity).
/// Roles p and u are required per generator, l per storage; start-up and
/// shut-down history is taken as constant (no events before the period).
struct FixedValuesPayload {
    std::map<std::tuple<Role, int, std::string>, double> values;

    void set(Role role, int rp, const std::string& entity, double value) {
        values[{role, rp, entity}] = value;
    }
    const double* find(Role role, int rp, const std::string& entity) const {
        auto it = values.find({role, rp, entity});
        return it == values.end() ? nullptr : &it->second;
    }
};

struct LinkingMethod {
    LinkingKind kind = LinkingKind::cyclic;
    MarkovMatrix matrix;       // markov only
    FixedValuesPayload fixed;  // fixed_values only

    static LinkingMethod no_enforcement() { return {LinkingKind::no_enforcement, {}, {}}; }
    static LinkingMethod cyclic() { return {LinkingKind::cyclic, {}, {}}; }
    static LinkingMethod markov(MarkovMatrix m) {
        return {LinkingKind::markov, std::move(m), {}};
    }
    static LinkingMethod fixed_values(FixedValuesPayload fv) {
        return {LinkingKind::fixed_values, {}, std::move(fv)};
    }
    static LinkingMethod full_chronological() { return {LinkingKind::full_chronological, {}, {}}; }

    std::string label() const;
};

/// Variables whose binary requirement is dropped because an expected-value
/// substitution reaches them (roles u, su, sd only).
struct RelaxationSet {
    std::set<VarKey> entries;

    bool contains(const VarKey& key) const { return entries.count(key) > 0; }
    bool empty() const { return entries.empty(); }
};

/// Markov-influenced steps per the per-generator window k <= max(MU, MD).
/// Empty for every other method, when the matrix is the identity (the
/// expected value degenerates to the cyclic value, so binarity is
/// consistent), and for generators that are already relaxed.
RelaxationSet relaxation_set(const SystemInstance& inst, const LinkingMethod& method);

/// Builds the MILP for the given system, aggregation, and linking method.
/// In full_chronological mode the assignment is ignored and the model spans
/// the instance's own horizon as one block with unit weight.
MilpInstance build_milp(const SystemInstance& inst, const Assignment& assign,
                        const LinkingMethod& method);

/// Extracts last-step values per (rp, entity) from a solved schedule, for use
/// as the fixed-values payload of a subsequent build.
FixedValuesPayload fixed_values_from_solution(const Schedule& schedule);

} // namespace rplink
