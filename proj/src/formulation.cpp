#include "rplink/formulation.hpp"

#include "rplink/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rplink {

std::string LinkingMethod::label() const {
    switch (kind) {
        case LinkingKind::no_enforcement: return "no-enforcement";
        case LinkingKind::fixed_values: return "fixed-values";
        case LinkingKind::cyclic: return "cyclic";
        case LinkingKind::markov: return "markov";
        case LinkingKind::full_chronological: return "truth";
    }
    return "?";
}

RelaxationSet relaxation_set(const SystemInstance& inst, const LinkingMethod& method) {
    RelaxationSet set;
    if (method.kind != LinkingKind::markov) return set;
    if (method.matrix.is_identity()) return set;
    const int RP = method.matrix.rp_count;
    for (const auto& g : inst.generators) {
        if (g.relaxed_uc) continue; // already continuous
        const int window = std::max(g.min_up, g.min_down);
        for (int rp = 0; rp < RP; ++rp)
            for (int k = 0; k < window; ++k)
                for (Role role : {Role::u, Role::su, Role::sd})
                    set.entries.insert({role, rp, k, g.id});
    }
    return set;
}

namespace {

struct RowBuilder {
    std::vector<LinTerm> terms;
    double rhs = 0.0;
    bool dropped = false;
    std::vector<BoundaryExpansion> expansions;

    void add(int var, double coef) {
        for (auto& t : terms) {
            if (t.var == var) {
                t.coef += coef;
                return;
            }
        }
        terms.push_back({var, coef});
    }

    void finish_terms() {
        terms.erase(std::remove_if(terms.begin(), terms.end(),
                                   [](const LinTerm& t) { return t.coef == 0.0; }),
                    terms.end());
    }
};

class Builder {
public:
    Builder(const SystemInstance& inst, const Assignment& assign, const LinkingMethod& method)
        : inst_(inst), method_(method) {
        auto inst_problems = validate_instance(inst);
        if (!inst_problems.empty())
            throw ValidationError("build_milp: invalid instance: " + inst_problems.front());

        if (method.kind == LinkingKind::full_chronological) {
            rp_count_ = 1;
            steps_ = inst.step_count();
            weights_ = {1};
            demand_ = inst.demand.values;
        } else {
            auto assign_problems = validate_assignment(assign, inst.period_count());
            if (!assign_problems.empty())
                throw ValidationError("build_milp: invalid assignment: " + assign_problems.front());
            if (method.kind == LinkingKind::markov &&
                method.matrix.rp_count != assign.rp_count)
                throw ValidationError(
                    "build_milp: Markov matrix is " + std::to_string(method.matrix.rp_count) +
                    "x" + std::to_string(method.matrix.rp_count) + " but assignment has " +
                    std::to_string(assign.rp_count) + " representative periods");
            rp_count_ = assign.rp_count;
            steps_ = inst.period_length;
            weights_ = rp_weights(assign).weight;
            demand_.resize(static_cast<size_t>(rp_count_) * steps_);
            for (int rp = 0; rp < rp_count_; ++rp) {
                int src = assign.rp_source_period[static_cast<size_t>(rp)];
                for (int k = 0; k < steps_; ++k)
                    demand_[static_cast<size_t>(rp) * steps_ + k] =
                        inst.demand.values[static_cast<size_t>(src * steps_ + k)];
            }
        }

        for (const auto& g : inst.generators) gens_.push_back(&g);
        std::sort(gens_.begin(), gens_.end(),
                  [](auto* a, auto* b) { return a->id < b->id; });
        for (const auto& s : inst.storages) stores_.push_back(&s);
        std::sort(stores_.begin(), stores_.end(),
                  [](auto* a, auto* b) { return a->id < b->id; });

        relax_ = relaxation_set(inst, method);
    }

    MilpInstance build() {
        declare_variables();
        emit_balance();
        emit_capacity();
        emit_commitment();
        emit_min_up_down();
        emit_ramping();
        emit_storage();
        build_objective();
        return std::move(milp_);
    }

private:
    int var(Role role, int rp, int k, const std::string& entity = "") const {
        return milp_.catalog.at({role, rp, k, entity});
    }

    void declare_variables() {
        auto declare = [this](Role role, const std::string& entity, VarKind kind, double lower,
                              double upper, bool has_upper) {
            for (int rp = 0; rp < rp_count_; ++rp)
                for (int k = 0; k < steps_; ++k) {
                    Variable v;
                    v.key = {role, rp, k, entity};
                    v.name = var_name(v.key);
                    v.kind = kind;
                    if (kind == VarKind::binary && relax_.contains(v.key))
                        v.kind = VarKind::relaxed_binary;
                    v.lower = lower;
                    v.upper = upper;
                    v.has_upper = has_upper;
                    milp_.add_variable(std::move(v));
                }
        };

        for (auto* g : gens_) declare(Role::p, g->id, VarKind::continuous, 0.0, g->capacity, true);
        for (auto* g : gens_)
            declare(Role::u, g->id, g->relaxed_uc ? VarKind::relaxed_binary : VarKind::binary,
                    0.0, 1.0, true);
        for (auto* g : gens_) declare(Role::su, g->id, VarKind::continuous, 0.0, 1.0, true);
        for (auto* g : gens_) declare(Role::sd, g->id, VarKind::continuous, 0.0, 1.0, true);
        for (auto* s : stores_)
            declare(Role::l, s->id, VarKind::continuous, 0.0, s->energy_capacity, true);
        for (auto* s : stores_)
            declare(Role::c, s->id, VarKind::continuous, 0.0, s->max_charge, true);
        for (auto* s : stores_)
            declare(Role::gdis, s->id, VarKind::continuous, 0.0, s->max_discharge, true);
        declare(Role::pns, "", VarKind::continuous, 0.0, 0.0, false);
        declare(Role::eps, "", VarKind::continuous, 0.0, 0.0, false);
    }

    // Resolves a reference to x[role, rp, bk] with bk < 0 (a step before the
    // period start), appearing with coefficient `coef`. Depending on the
    // linking method the reference becomes variable terms, a constant folded
    // into the rhs, or a signal to drop the whole row.
    void boundary(RowBuilder& row, Role role, int rp, int bk, const std::string& entity,
                  double coef) {
        const int wrapped = bk + steps_;
        switch (method_.kind) {
            case LinkingKind::no_enforcement:
            case LinkingKind::full_chronological:
                if (role == Role::l) {
                    // Anchor the pre-horizon level instead of leaving it free.
                    const StorageUnit* s = storage_by_id(entity);
                    row.rhs -= coef * s->initial_level_fraction * s->energy_capacity;
                } else {
                    row.dropped = true;
                }
                return;
            case LinkingKind::fixed_values: {
                if (role == Role::su || role == Role::sd) return; // constant history: no events
                const double* fp = method_.fixed.find(role, rp, entity);
                if (!fp)
                    throw ValidationError("fixed-values method lacks a boundary value for " +
                                          var_name({role, rp, wrapped, entity}));
                row.rhs -= coef * *fp;
                return;
            }
            case LinkingKind::cyclic: {
                BoundaryExpansion exp;
                exp.reference = boundary_label(role, rp, bk, entity);
                exp.reference_coef = coef;
                int idx = var(role, rp, wrapped, entity);
                row.add(idx, coef);
                exp.terms.push_back({idx, coef});
                row.expansions.push_back(std::move(exp));
                return;
            }
            case LinkingKind::markov: {
                BoundaryExpansion exp;
                exp.reference = boundary_label(role, rp, bk, entity);
                exp.reference_coef = coef;
                for (int from = 0; from < rp_count_; ++from) {
                    double pr = method_.matrix.at(from, rp);
                    if (pr == 0.0) continue;
                    int idx = var(role, from, wrapped, entity);
                    row.add(idx, coef * pr);
                    exp.terms.push_back({idx, coef * pr});
                }
                row.expansions.push_back(std::move(exp));
                return;
            }
        }
    }

    static std::string boundary_label(Role role, int rp, int bk, const std::string& entity) {
        return std::string(role_name(role)) + "[rp" + std::to_string(rp + 1) + ",k" +
               std::to_string(bk + 1) + (entity.empty() ? "" : "," + entity) + "]";
    }

    const StorageUnit* storage_by_id(const std::string& id) const {
        for (auto* s : stores_)
            if (s->id == id) return s;
        throw ValidationError("unknown storage " + id);
    }

    void commit(RowBuilder&& row, const std::string& family, Sense sense) {
        if (row.dropped) return;
        row.finish_terms();
        if (row.terms.empty()) return; // fully cancelled (e.g. K=1 cyclic wrap)
        Constraint con;
        con.name = "c" + std::to_string(milp_.cons.size() + 1) + "_" + family;
        con.terms = std::move(row.terms);
        con.sense = sense;
        con.rhs = row.rhs;
        int idx = static_cast<int>(milp_.cons.size());
        milp_.cons.push_back(std::move(con));
        for (auto& exp : row.expansions) {
            exp.constraint_index = idx;
            milp_.boundary_expansions.push_back(std::move(exp));
        }
    }

    void emit_balance() {
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k) {
                RowBuilder row;
                for (auto* g : gens_) row.add(var(Role::p, rp, k, g->id), 1.0);
                for (auto* s : stores_) row.add(var(Role::gdis, rp, k, s->id), 1.0);
                for (auto* s : stores_) row.add(var(Role::c, rp, k, s->id), -1.0);
                row.add(var(Role::pns, rp, k), 1.0);
                row.add(var(Role::eps, rp, k), -1.0);
                row.rhs = demand_[static_cast<size_t>(rp) * steps_ + k];
                commit(std::move(row), "balance", Sense::eq);
            }
    }

    void emit_capacity() {
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k)
                for (auto* g : gens_) {
                    RowBuilder row;
                    row.add(var(Role::p, rp, k, g->id), 1.0);
                    row.add(var(Role::u, rp, k, g->id), -g->capacity);
                    commit(std::move(row), "cap_max", Sense::le);
                }
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k)
                for (auto* g : gens_) {
                    if (g->min_output <= 0.0) continue;
                    RowBuilder row;
                    row.add(var(Role::p, rp, k, g->id), 1.0);
                    row.add(var(Role::u, rp, k, g->id), -g->min_output);
                    commit(std::move(row), "cap_min", Sense::ge);
                }
    }

    // u[k] - u[k-1] = su[k] - sd[k]
    void emit_commitment() {
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k)
                for (auto* g : gens_) {
                    RowBuilder row;
                    row.add(var(Role::u, rp, k, g->id), 1.0);
                    if (k >= 1)
                        row.add(var(Role::u, rp, k - 1, g->id), -1.0);
                    else
                        boundary(row, Role::u, rp, -1, g->id, -1.0);
                    row.add(var(Role::su, rp, k, g->id), -1.0);
                    row.add(var(Role::sd, rp, k, g->id), 1.0);
                    commit(std::move(row), "commit", Sense::eq);
                }
    }

    // sum of su over the trailing min-up window <= u; mirrored for min-down.
    void emit_min_up_down() {
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k)
                for (auto* g : gens_) {
                    RowBuilder row;
                    for (int kp = k - g->min_up + 1; kp <= k; ++kp) {
                        if (kp >= 0)
                            row.add(var(Role::su, rp, kp, g->id), 1.0);
                        else
                            boundary(row, Role::su, rp, kp, g->id, 1.0);
                    }
                    row.add(var(Role::u, rp, k, g->id), -1.0);
                    commit(std::move(row), "min_up", Sense::le);
                }
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k)
                for (auto* g : gens_) {
                    RowBuilder row;
                    for (int kp = k - g->min_down + 1; kp <= k; ++kp) {
                        if (kp >= 0)
                            row.add(var(Role::sd, rp, kp, g->id), 1.0);
                        else
                            boundary(row, Role::sd, rp, kp, g->id, 1.0);
                    }
                    row.add(var(Role::u, rp, k, g->id), 1.0);
                    row.rhs += 1.0;
                    commit(std::move(row), "min_down", Sense::le);
                }
    }

    void emit_ramping() {
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k)
                for (auto* g : gens_) {
                    RowBuilder row;
                    row.add(var(Role::p, rp, k, g->id), 1.0);
                    if (k >= 1)
                        row.add(var(Role::p, rp, k - 1, g->id), -1.0);
                    else
                        boundary(row, Role::p, rp, -1, g->id, -1.0);
                    row.rhs += g->ramp_up;
                    commit(std::move(row), "ramp_up", Sense::le);
                }
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k)
                for (auto* g : gens_) {
                    RowBuilder row;
                    if (k >= 1)
                        row.add(var(Role::p, rp, k - 1, g->id), 1.0);
                    else
                        boundary(row, Role::p, rp, -1, g->id, 1.0);
                    row.add(var(Role::p, rp, k, g->id), -1.0);
                    row.rhs += g->ramp_down;
                    commit(std::move(row), "ramp_down", Sense::le);
                }
    }

    // l[k] = l[k-1] + eta_c * c[k] - gdis[k] / eta_d
    void emit_storage() {
        for (int rp = 0; rp < rp_count_; ++rp)
            for (int k = 0; k < steps_; ++k)
                for (auto* s : stores_) {
                    RowBuilder row;
                    row.add(var(Role::l, rp, k, s->id), 1.0);
                    if (k >= 1)
                        row.add(var(Role::l, rp, k - 1, s->id), -1.0);
                    else
                        boundary(row, Role::l, rp, -1, s->id, -1.0);
                    row.add(var(Role::c, rp, k, s->id), -s->charge_efficiency);
                    row.add(var(Role::gdis, rp, k, s->id), 1.0 / s->discharge_efficiency);
                    commit(std::move(row), "storage", Sense::eq);
                }
    }

    void build_objective() {
        auto add_cost = [this](Role role, const std::string& entity, double cost) {
            if (cost == 0.0) return;
            for (int rp = 0; rp < rp_count_; ++rp) {
                double w = static_cast<double>(weights_[static_cast<size_t>(rp)]);
                for (int k = 0; k < steps_; ++k)
                    milp_.objective.push_back({var(role, rp, k, entity), w * cost});
            }
        };
        for (auto* g : gens_) add_cost(Role::p, g->id, g->var_cost);
        for (auto* g : gens_) add_cost(Role::u, g->id, g->commit_cost);
        for (auto* g : gens_) add_cost(Role::su, g->id, g->startup_cost);
        for (auto* g : gens_) add_cost(Role::sd, g->id, g->shutdown_cost);
        add_cost(Role::pns, "", inst_.demand.pns_penalty);
        add_cost(Role::eps, "", inst_.demand.eps_penalty);
    }

    const SystemInstance& inst_;
    const LinkingMethod& method_;
    int rp_count_ = 0;
    int steps_ = 0;
    std::vector<int> weights_;
    std::vector<double> demand_;
    std::vector<const ThermalGenerator*> gens_;
    std::vector<const StorageUnit*> stores_;
    RelaxationSet relax_;
    MilpInstance milp_;
};

} // namespace

MilpInstance build_milp(const SystemInstance& inst, const Assignment& assign,
                        const LinkingMethod& method) {
    Builder builder(inst, assign, method);
    return builder.build();
}

FixedValuesPayload fixed_values_from_solution(const Schedule& schedule) {
    FixedValuesPayload fv;
    const int last = schedule.steps - 1;
    for (int rp = 0; rp < schedule.rp_count; ++rp) {
        for (const auto& id : schedule.generator_ids) {
            for (Role role : {Role::p, Role::u}) {
                if (!schedule.has(role, id))
                    throw ValidationError("schedule is missing " +
                                          var_name({role, rp, last, id}));
                fv.set(role, rp, id, schedule.at(role, id, rp, last));
            }
        }
        for (const auto& id : schedule.storage_ids) {
            if (!schedule.has(Role::l, id))
                throw ValidationError("schedule is missing " + var_name({Role::l, rp, last, id}));
            fv.set(Role::l, rp, id, schedule.at(Role::l, id, rp, last));
        }
    }
    return fv;
}

} // namespace rplink
