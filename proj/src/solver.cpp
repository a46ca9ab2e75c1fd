#include "rplink/solver.hpp"

#include "rplink/errors.hpp"
#include "rplink/numfmt.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <unistd.h>

#ifndef RPLINK_DEFAULT_ENGINE
#define RPLINK_DEFAULT_ENGINE "python3 rplink-highs"
#endif

namespace rplink {

namespace fs = std::filesystem;

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible_gap: return "feasible-gap";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::timeout: return "timeout";
        case SolveStatus::engine_error: return "engine-error";
    }
    return "?";
}

std::string resolve_engine(const SolveOptions& opts) {
    if (const char* env = std::getenv("RPLINK_SOLVER"); env && *env) return env;
    if (!opts.engine.empty()) return opts.engine;
    return RPLINK_DEFAULT_ENGINE;
}

namespace {

std::string read_tail(const fs::path& path, size_t max_bytes = 2000) {
    std::ifstream in(path);
    if (!in) return "";
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (text.size() > max_bytes) text = "..." + text.substr(text.size() - max_bytes);
    return text;
}

Solution engine_failure(std::string message) {
    Solution sol;
    sol.status = SolveStatus::engine_error;
    sol.diagnostic = std::move(message);
    return sol;
}

struct TempFiles {
    fs::path lp, out, log;
    bool keep = false;

    ~TempFiles() {
        if (keep || std::getenv("RPLINK_KEEP_TMP")) return;
        std::error_code ec;
        fs::remove(lp, ec);
        fs::remove(out, ec);
        fs::remove(log, ec);
    }
};

} // namespace

Solution solve(const MilpInstance& milp, const SolveOptions& opts) {
    if (opts.time_limit <= 0) throw ValidationError("time_limit must be positive");
    if (opts.mip_gap < 0 || opts.mip_gap >= 1)
        throw ValidationError("mip_gap must be in [0, 1)");

    static std::atomic<unsigned long> counter{0};
    const std::string stem = "rplink_" + std::to_string(::getpid()) + "_" +
                             std::to_string(counter.fetch_add(1));
    TempFiles tmp;
    tmp.lp = fs::temp_directory_path() / (stem + ".lp");
    tmp.out = fs::temp_directory_path() / (stem + ".sol");
    tmp.log = fs::temp_directory_path() / (stem + ".log");

    write_lp_file(tmp.lp.string(), milp);

    std::string cmd = resolve_engine(opts) + " " + tmp.lp.string() + " " + tmp.out.string() +
                      " --time-limit " + fmt_shortest(opts.time_limit) + " --mip-gap " +
                      fmt_shortest(opts.mip_gap) + " --threads " + std::to_string(opts.threads) +
                      " > " + tmp.log.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc != 0) {
        tmp.keep = true;
        return engine_failure("engine exited with code " + std::to_string(rc) + " (command: " +
                              cmd + ")\n" + read_tail(tmp.log));
    }

    std::ifstream in(tmp.out);
    if (!in) {
        tmp.keep = true;
        return engine_failure("engine wrote no solution file at " + tmp.out.string());
    }

    std::map<std::string, int> name_to_index;
    for (size_t i = 0; i < milp.vars.size(); ++i)
        name_to_index.emplace(milp.vars[i].name, static_cast<int>(i));

    Solution sol;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> values(milp.vars.size(), nan);
    bool have_status = false, any_value = false;

    std::string key;
    while (in >> key) {
        if (key == "status") {
            std::string status_text;
            in >> status_text;
            have_status = true;
            if (status_text == "optimal") sol.status = SolveStatus::optimal;
            else if (status_text == "feasible-gap") sol.status = SolveStatus::feasible_gap;
            else if (status_text == "infeasible") sol.status = SolveStatus::infeasible;
            else if (status_text == "unbounded") sol.status = SolveStatus::unbounded;
            else if (status_text == "timeout") sol.status = SolveStatus::timeout;
            else {
                sol.status = SolveStatus::engine_error;
                sol.diagnostic = "engine reported status '" + status_text + "'";
            }
        } else if (key == "objective") {
            in >> sol.objective;
        } else if (key == "solve_time") {
            in >> sol.solve_time;
        } else if (key == "columns") {
            long n;
            in >> n;
        } else {
            double value;
            if (!(in >> value)) {
                tmp.keep = true;
                return engine_failure("malformed solution line for '" + key + "' in " +
                                      tmp.out.string());
            }
            auto it = name_to_index.find(key);
            if (it != name_to_index.end()) {
                values[static_cast<size_t>(it->second)] = value;
                any_value = true;
            }
        }
    }

    if (!have_status) {
        tmp.keep = true;
        return engine_failure("solution file lacks a status line: " + tmp.out.string());
    }

    if (sol.status == SolveStatus::optimal || sol.status == SolveStatus::feasible_gap) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (std::isnan(values[i])) {
                tmp.keep = true;
                return engine_failure("engine returned no value for variable " +
                                      milp.vars[i].name);
            }
        }
        sol.values = std::move(values);
    } else if (any_value) {
        sol.values = std::move(values);
    }
    return sol;
}

std::vector<RowViolation> verify_solution(const MilpInstance& milp, const Solution& sol,
                                          double tol) {
    if (sol.values.size() != milp.vars.size())
        throw ValidationError("solution has " + std::to_string(sol.values.size()) +
                              " values for " + std::to_string(milp.vars.size()) + " variables");
    std::vector<RowViolation> out;
    for (const auto& con : milp.cons) {
        double lhs = 0.0;
        for (const auto& t : con.terms) lhs += t.coef * sol.values[static_cast<size_t>(t.var)];
        double residual = 0.0;
        switch (con.sense) {
            case Sense::le: residual = lhs - con.rhs; break;
            case Sense::ge: residual = con.rhs - lhs; break;
            case Sense::eq: residual = std::abs(lhs - con.rhs); break;
        }
        if (residual > tol) out.push_back({con.name, residual});
    }
    return out;
}

std::vector<std::string> bound_violations(const MilpInstance& milp, const Solution& sol,
                                          double tol) {
    if (sol.values.size() != milp.vars.size())
        throw ValidationError("solution has " + std::to_string(sol.values.size()) +
                              " values for " + std::to_string(milp.vars.size()) + " variables");
    std::vector<std::string> out;
    for (size_t i = 0; i < milp.vars.size(); ++i) {
        const auto& v = milp.vars[i];
        double x = sol.values[i];
        if (x < v.lower - tol || (v.has_upper && x > v.upper + tol))
            out.push_back(v.name + " = " + fmt_shortest(x) + " outside bounds");
        if (v.kind == VarKind::binary && std::abs(x - std::round(x)) > tol)
            out.push_back(v.name + " = " + fmt_shortest(x) + " not binary");
    }
    return out;
}

} // namespace rplink
