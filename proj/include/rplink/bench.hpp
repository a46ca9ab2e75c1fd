#pragma once

#include "rplink/aggregation.hpp"
#include "rplink/formulation.hpp"
#include "rplink/schedule.hpp"
#include "rplink/solver.hpp"
#include "rplink/system.hpp"

#include <string>
#include <vector>

namespace rplink {

/// Outcome of solving one linking method (or the truth case) on an instance.
/// Start-up/shut-down counts are weighted sums over representative periods;
/// truth counts are plain sums over the horizon. Deltas are relative to the
/// truth run and undefined (NaN) when no truth objective exists.
struct RunReport {
    std::string method;
    SolveStatus status = SolveStatus::engine_error;
    bool is_truth = false;

    double objective = 0.0;
    double objective_delta_pct = 0.0;
    double startups = 0.0;
    double shutdowns = 0.0;
    double su_delta_pct = 0.0;
    double sd_delta_pct = 0.0;
    double pns_total = 0.0;
    double eps_total = 0.0;
    double solve_time = 0.0;
    bool has_deltas = false;

    Schedule schedule; // empty when the solve failed
    std::string diagnostic;

    bool solved() const {
        return status == SolveStatus::optimal || status == SolveStatus::feasible_gap;
    }
};

/// Builds per-(rp,k) columns from a solved model. For truth runs pass the
/// horizon shape (period count, steps per period) to get a per-period layout.
Schedule make_schedule(const MilpInstance& milp, const Solution& sol, int rp_count, int steps,
                       std::vector<double> demand);

/// Fixed-values payload for an RP build, taken from a truth schedule laid out
/// per period: each RP uses its source period's last-step values.
FixedValuesPayload fixed_values_from_truth(const Schedule& truth_schedule,
                                           const Assignment& assign);

/// Solves the truth case plus every requested method and computes comparison
/// metrics. The truth run is always included (first report). A fixed-values
/// method with an empty payload gets one derived from the truth solution.
/// Method solves run concurrently up to `jobs`.
std::vector<RunReport> run_comparison(const SystemInstance& inst, const Assignment& assign,
                                      const std::vector<LinkingMethod>& methods,
                                      const SolveOptions& opts, int jobs = 1);

enum class ReportFormat { csv, markdown };

std::string emit_report(const std::vector<RunReport>& reports, ReportFormat format);

/// One CSV row per (rp, k) with demand and every solved column.
void schedule_export(const RunReport& report, const std::string& path);

} // namespace rplink
