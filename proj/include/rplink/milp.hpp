#pragma once

#include <map>
#include <string>
#include <vector>

namespace rplink {

enum class VarKind { continuous, binary, relaxed_binary };

/// Catalog roles, in declaration order of the variable catalog.
enum class Role { p, u, su, sd, l, c, gdis, pns, eps };

const char* role_name(Role role);

/// Catalog key: role, representative period, step within the period, and the
/// owning entity id (empty for system-wide slack variables). rp and k are
/// 0-based here; rendered names are 1-based.
struct VarKey {
    Role role;
    int rp = 0;
    int k = 0;
    std::string entity;

    bool operator<(const VarKey& o) const {
        if (role != o.role) return role < o.role;
        if (rp != o.rp) return rp < o.rp;
        if (k != o.k) return k < o.k;
        return entity < o.entity;
    }
    bool operator==(const VarKey& o) const {
        return role == o.role && rp == o.rp && k == o.k && entity == o.entity;
    }
};

std::string var_name(const VarKey& key);

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = 0.0; // +infinity when has_upper is false
    bool has_upper = false;
    VarKey key;
};

struct LinTerm {
    int var = 0;
    double coef = 0.0;
};

enum class Sense { le, eq, ge };

struct Constraint {
    std::string name;
    std::vector<LinTerm> terms;
    Sense sense = Sense::eq;
    double rhs = 0.0;
};

/// Record of one boundary reference that was rewritten during the build:
/// `terms` replaced a single out-of-period variable whose coefficient in the
/// unmodified constraint would have been `reference_coef`. For expected-value
/// rewrites the term coefficients sum back to reference_coef.
struct BoundaryExpansion {
    int constraint_index = 0;
    std::string reference; // e.g. "p[rp1,k0,G1]"
    double reference_coef = 0.0;
    std::vector<LinTerm> terms;
};

/// Solver-agnostic MILP: variables with bounds, linear rows, minimize objective.
struct MilpInstance {
    std::vector<Variable> vars;
    std::vector<Constraint> cons;
    std::vector<LinTerm> objective;
    std::vector<BoundaryExpansion> boundary_expansions;

    std::map<VarKey, int> catalog;

    int add_variable(Variable v);
    int var_index(const VarKey& key) const; // -1 if absent
    const Variable& variable(const VarKey& key) const;
};

/// Serializes to LP text format: Minimize / Subject To / Bounds / Binaries /
/// End, with deterministic ordering and shortest round-trip numerals.
std::string write_lp(const MilpInstance& milp);
void write_lp_file(const std::string& path, const MilpInstance& milp);

} // namespace rplink
