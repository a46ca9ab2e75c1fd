#include "rplink/bench.hpp"

#include "rplink/csv.hpp"
#include "rplink/errors.hpp"
#include "rplink/numfmt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace rplink {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&next, n, &fn] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : workers) t.join();
}

double weighted_total(const Schedule& sched, const std::vector<int>& weights, Role role,
                      const std::vector<std::string>& ids) {
    double total = 0.0;
    for (const auto& id : ids)
        for (int rp = 0; rp < sched.rp_count; ++rp) {
            double w = static_cast<double>(weights[static_cast<size_t>(rp)]);
            for (int k = 0; k < sched.steps; ++k) total += w * sched.at(role, id, rp, k);
        }
    return total;
}

double pct_delta(double value, double truth) {
    if (std::abs(truth) < 1e-12) return std::abs(value) < 1e-9 ? 0.0 : kNan;
    return (value - truth) / truth * 100.0;
}

RunReport assemble_report(const std::string& label, bool is_truth, const MilpInstance& milp,
                          const Solution& sol, const std::vector<int>& weights, int rp_count,
                          int steps, std::vector<double> demand) {
    RunReport report;
    report.method = label;
    report.is_truth = is_truth;
    report.status = sol.status;
    report.solve_time = sol.solve_time;
    report.diagnostic = sol.diagnostic;
    if (!sol.has_values() || !report.solved()) return report;

    report.objective = sol.objective;
    report.schedule = make_schedule(milp, sol, rp_count, steps, std::move(demand));
    const auto& sched = report.schedule;
    report.startups = weighted_total(sched, weights, Role::su, sched.generator_ids);
    report.shutdowns = weighted_total(sched, weights, Role::sd, sched.generator_ids);
    report.pns_total = weighted_total(sched, weights, Role::pns, {""});
    report.eps_total = weighted_total(sched, weights, Role::eps, {""});
    return report;
}

} // namespace

Schedule make_schedule(const MilpInstance& milp, const Solution& sol, int rp_count, int steps,
                       std::vector<double> demand) {
    if (!sol.has_values()) throw ValidationError("make_schedule: solution carries no values");
    Schedule sched;
    sched.rp_count = rp_count;
    sched.steps = steps;
    sched.demand = std::move(demand);

    std::set<std::string> gen_ids, storage_ids;
    for (const auto& v : milp.vars) {
        if (v.key.role == Role::p) gen_ids.insert(v.key.entity);
        if (v.key.role == Role::l) storage_ids.insert(v.key.entity);
    }
    sched.generator_ids.assign(gen_ids.begin(), gen_ids.end());
    sched.storage_ids.assign(storage_ids.begin(), storage_ids.end());

    const size_t total = static_cast<size_t>(rp_count) * steps;
    auto fill = [&](Role role, const std::string& entity) {
        std::vector<double> column(total, 0.0);
        sched.columns.emplace(std::make_pair(role, entity), std::move(column));
    };
    for (const auto& id : sched.generator_ids)
        for (Role role : {Role::p, Role::u, Role::su, Role::sd}) fill(role, id);
    for (const auto& id : sched.storage_ids)
        for (Role role : {Role::l, Role::c, Role::gdis}) fill(role, id);
    fill(Role::pns, "");
    fill(Role::eps, "");

    // The model's (rp, k) shape may differ from the requested layout (a truth
    // run is one long block): flatten by global step and reshape.
    int model_steps = 0;
    for (const auto& v : milp.vars) model_steps = std::max(model_steps, v.key.k + 1);
    for (size_t i = 0; i < milp.vars.size(); ++i) {
        const auto& key = milp.vars[i].key;
        auto it = sched.columns.find({key.role, key.entity});
        if (it == sched.columns.end()) continue;
        size_t flat = static_cast<size_t>(key.rp) * model_steps + key.k;
        if (flat < total) it->second[flat] = sol.values[i];
    }
    return sched;
}

std::vector<RunReport> run_comparison(const SystemInstance& inst, const Assignment& assign,
                                      const std::vector<LinkingMethod>& methods,
                                      const SolveOptions& opts, int jobs) {
    auto problems = validate_assignment(assign, inst.period_count());
    if (!problems.empty()) throw ValidationError("run_comparison: " + problems.front());

    const int N = inst.period_count();
    const int K = inst.period_length;
    const auto weights = rp_weights(assign).weight;
    const std::vector<int> unit_weights(static_cast<size_t>(N), 1);

    // Truth: full chronological model on the reconstructed horizon, reported
    // with a per-period schedule layout.
    SystemInstance truth_inst = reconstruct_truth(inst, assign);
    MilpInstance truth_milp = build_milp(truth_inst, assign, LinkingMethod::full_chronological());
    Solution truth_sol = solve(truth_milp, opts);
    RunReport truth_report = assemble_report("truth", true, truth_milp, truth_sol, unit_weights,
                                             N, K, truth_inst.demand.values);

    std::vector<RunReport> reports;
    reports.push_back(std::move(truth_report));
    const RunReport& truth = reports.front();

    // Demand slice per rp for method schedules.
    std::vector<double> rp_demand(static_cast<size_t>(assign.rp_count) * K);
    for (int rp = 0; rp < assign.rp_count; ++rp) {
        int src = assign.rp_source_period[static_cast<size_t>(rp)];
        for (int k = 0; k < K; ++k)
            rp_demand[static_cast<size_t>(rp) * K + k] =
                inst.demand.values[static_cast<size_t>(src * K + k)];
    }

    std::vector<RunReport> method_reports(methods.size());
    std::vector<LinkingMethod> resolved = methods;
    for (auto& method : resolved) {
        if (method.kind == LinkingKind::fixed_values && method.fixed.values.empty()) {
            if (!truth.solved())
                continue; // handled below as a failure
            method.fixed = fixed_values_from_truth(truth.schedule, assign);
        }
    }

    parallel_for(static_cast<int>(resolved.size()), jobs, [&](int i) {
        const auto& method = resolved[static_cast<size_t>(i)];
        std::string label = method.label();
        try {
            if (method.kind == LinkingKind::fixed_values && method.fixed.values.empty())
                throw SolverError("no truth solution to derive fixed values from");
            MilpInstance milp = build_milp(inst, assign, method);
            Solution sol = solve(milp, opts);
            method_reports[static_cast<size_t>(i)] = assemble_report(
                label, false, milp, sol, weights, assign.rp_count, K, rp_demand);
        } catch (const std::exception& e) {
            RunReport failed;
            failed.method = label;
            failed.status = SolveStatus::engine_error;
            failed.diagnostic = e.what();
            method_reports[static_cast<size_t>(i)] = std::move(failed);
        }
    });

    for (auto& report : method_reports) reports.push_back(std::move(report));

    if (reports.front().solved()) {
        double truth_obj = reports.front().objective;
        double truth_su = reports.front().startups;
        double truth_sd = reports.front().shutdowns;
        for (size_t i = 1; i < reports.size(); ++i) {
            auto& r = reports[i];
            if (!r.solved()) continue;
            r.has_deltas = true;
            r.objective_delta_pct = pct_delta(r.objective, truth_obj);
            r.su_delta_pct = pct_delta(r.startups, truth_su);
            r.sd_delta_pct = pct_delta(r.shutdowns, truth_sd);
        }
    }
    return reports;
}

FixedValuesPayload fixed_values_from_truth(const Schedule& truth_schedule,
                                           const Assignment& assign) {
    FixedValuesPayload fv;
    const int last = truth_schedule.steps - 1;
    for (int rp = 0; rp < assign.rp_count; ++rp) {
        int src = assign.rp_source_period[static_cast<size_t>(rp)];
        for (const auto& id : truth_schedule.generator_ids) {
            fv.set(Role::p, rp, id, truth_schedule.at(Role::p, id, src, last));
            fv.set(Role::u, rp, id, truth_schedule.at(Role::u, id, src, last));
        }
        for (const auto& id : truth_schedule.storage_ids)
            fv.set(Role::l, rp, id, truth_schedule.at(Role::l, id, src, last));
    }
    return fv;
}

namespace {

std::vector<std::vector<std::string>> report_cells(const std::vector<RunReport>& reports) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        std::vector<std::string> row;
        row.push_back(r.method);
        auto num = [&row](double v, bool defined, int sig = 6) {
            row.push_back(defined && !std::isnan(v) ? fmt_sig(v, sig) : "");
        };
        auto pct = [&row](double v, bool defined) {
            if (!defined || std::isnan(v)) {
                row.push_back("");
            } else {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.2f", v);
                row.push_back(buf);
            }
        };
        bool ok = r.solved();
        num(r.objective, ok);
        pct(r.objective_delta_pct, ok && r.has_deltas);
        if (ok) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", r.solve_time);
            row.push_back(buf);
        } else {
            row.push_back("");
        }
        num(r.startups, ok);
        num(r.shutdowns, ok);
        pct(r.su_delta_pct, ok && r.has_deltas);
        pct(r.sd_delta_pct, ok && r.has_deltas);
        num(r.pns_total, ok);
        num(r.eps_total, ok);
        row.push_back(to_string(r.status));
        rows.push_back(std::move(row));
    }
    return rows;
}

const std::vector<std::string>& report_header() {
    static const std::vector<std::string> header = {
        "method", "objective", "objective_delta_pct", "solve_time_s", "startups",
        "shutdowns", "su_delta_pct", "sd_delta_pct", "pns_total", "eps_total", "status"};
    return header;
}

} // namespace

std::string emit_report(const std::vector<RunReport>& reports, ReportFormat format) {
    if (reports.empty()) throw ValidationError("emit_report: no reports");
    auto rows = report_cells(reports);
    const auto& header = report_header();
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << '\n';
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
            out << '\n';
        }
    } else {
        out << '|';
        for (const auto& h : header) out << ' ' << h << " |";
        out << "\n|";
        for (size_t i = 0; i < header.size(); ++i) out << " --- |";
        out << '\n';
        for (const auto& row : rows) {
            out << '|';
            for (const auto& cell : row) out << ' ' << cell << " |";
            out << '\n';
        }
    }
    return out.str();
}

void schedule_export(const RunReport& report, const std::string& path) {
    if (!report.solved() || report.schedule.columns.empty())
        throw ValidationError("schedule_export: report carries no schedule");
    const auto& sched = report.schedule;

    csv::Table table;
    table.header = {"rp", "k", "demand_mw"};
    std::vector<std::pair<Role, std::string>> cols;
    for (const auto& id : sched.generator_ids)
        for (Role role : {Role::p, Role::u, Role::su, Role::sd}) {
            cols.push_back({role, id});
            table.header.push_back(std::string(role_name(role)) + "_" + id);
        }
    for (const auto& id : sched.storage_ids)
        for (Role role : {Role::l, Role::c, Role::gdis}) {
            cols.push_back({role, id});
            table.header.push_back(std::string(role_name(role)) + "_" + id);
        }
    cols.push_back({Role::pns, ""});
    table.header.push_back("pns");
    cols.push_back({Role::eps, ""});
    table.header.push_back("eps");

    for (int rp = 0; rp < sched.rp_count; ++rp)
        for (int k = 0; k < sched.steps; ++k) {
            std::vector<std::string> row = {
                std::to_string(rp + 1), std::to_string(k + 1),
                fmt_shortest(sched.demand[static_cast<size_t>(rp) * sched.steps + k])};
            for (const auto& [role, id] : cols)
                row.push_back(fmt_shortest(sched.at(role, id, rp, k)));
            table.rows.push_back(std::move(row));
        }
    csv::write_file(path, table);
}

} // namespace rplink
