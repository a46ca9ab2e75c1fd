#pragma once

#include "rplink/milp.hpp"

#include <string>
#include <vector>

namespace rplink {

enum class SolveStatus { optimal, feasible_gap, infeasible, unbounded, timeout, engine_error };

const char* to_string(SolveStatus status);

struct SolveOptions {
    double time_limit = 600.0; // seconds
    double mip_gap = 1e-6;     // relative
    int threads = 1;
    std::string engine; // command prefix; empty picks RPLINK_SOLVER or the built-in default
};

struct Solution {
    SolveStatus status = SolveStatus::engine_error;
    double objective = 0.0;
    std::vector<double> values; // aligned with MilpInstance::vars; empty if none
    double solve_time = 0.0;    // engine-reported seconds
    std::string diagnostic;     // populated on engine_error

    bool has_values() const { return !values.empty(); }
};

/// Engine command that `solve` will run, after applying the RPLINK_SOLVER
/// environment override and the built-in default.
std::string resolve_engine(const SolveOptions& opts);

/// Writes the model as an LP file, runs the engine on it, and parses the
/// solution file back. Engine failures are reported as status engine_error
/// with a diagnostic, never as exceptions.
Solution solve(const MilpInstance& milp, const SolveOptions& opts = {});

struct RowViolation {
    std::string row;
    double residual = 0.0;
};

/// Re-evaluates every constraint at the solution; rows violated beyond `tol`
/// (absolute) are returned. Throws ValidationError when values are missing.
std::vector<RowViolation> verify_solution(const MilpInstance& milp, const Solution& sol,
                                          double tol = 1e-6);

/// Variables outside their bounds, plus binary variables away from {0,1}
/// (relaxed-binary ones are exempt). Complements verify_solution.
std::vector<std::string> bound_violations(const MilpInstance& milp, const Solution& sol,
                                          double tol = 1e-6);

} // namespace rplink
