// rplink command-line front end: aggregate, truth, compare, build, validate.

#include "rplink/aggregation.hpp"
#include "rplink/bench.hpp"
#include "rplink/csv.hpp"
#include "rplink/errors.hpp"
#include "rplink/formulation.hpp"
#include "rplink/milp.hpp"
#include "rplink/numfmt.hpp"
#include "rplink/solver.hpp"
#include "rplink/system.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rplink;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSolve = 3;

struct RunConfig {
    std::string instance;
    std::string assignment_file; // exclusive with rp_count clustering
    int rp_count = 0;
    unsigned seed = 0;
    std::vector<std::string> methods;
    SolveOptions solver;
    std::string out = "out";
    int jobs = 1;
    std::string fixed_values_file;
};

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open config file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// --set key=value with dotted paths, e.g. solver.mip_gap=1e-8
void apply_override(json& config, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ParseError("--set expects key=value, got '" + spec + "'");
    std::string key = spec.substr(0, eq);
    std::string value = spec.substr(eq + 1);

    json* node = &config;
    size_t start = 0;
    while (true) {
        size_t dot = key.find('.', start);
        std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
            break;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

RunConfig parse_config(const json& config) {
    RunConfig rc;
    if (config.contains("instance")) rc.instance = config["instance"].get<std::string>();
    if (config.contains("assignment")) {
        const auto& a = config["assignment"];
        if (a.contains("file")) rc.assignment_file = a["file"].get<std::string>();
        if (a.contains("rp_count")) rc.rp_count = a["rp_count"].get<int>();
        if (a.contains("seed")) rc.seed = a["seed"].get<unsigned>();
    }
    if (config.contains("methods"))
        rc.methods = config["methods"].get<std::vector<std::string>>();
    if (config.contains("solver")) {
        const auto& s = config["solver"];
        if (s.contains("engine")) rc.solver.engine = s["engine"].get<std::string>();
        if (s.contains("time_limit")) rc.solver.time_limit = s["time_limit"].get<double>();
        if (s.contains("mip_gap")) rc.solver.mip_gap = s["mip_gap"].get<double>();
        if (s.contains("threads")) rc.solver.threads = s["threads"].get<int>();
    }
    if (config.contains("out")) rc.out = config["out"].get<std::string>();
    if (config.contains("jobs")) rc.jobs = config["jobs"].get<int>();
    if (config.contains("fixed_values")) rc.fixed_values_file = config["fixed_values"].get<std::string>();
    return rc;
}

Assignment resolve_assignment(const RunConfig& rc, const SystemInstance& inst) {
    if (!rc.assignment_file.empty())
        return read_assignment_csv(rc.assignment_file, inst.period_count());
    if (rc.rp_count > 0) return baseline_cluster(inst, rc.rp_count, rc.seed);
    throw ValidationError("no assignment source: give --assignment FILE or --rp-count N");
}

FixedValuesPayload read_fixed_values_csv(const std::string& path) {
    auto table = csv::read_file(path);
    int rp_col = table.column("rp");
    int entity_col = table.column("entity");
    int role_col = table.column("role");
    int value_col = table.column("value");
    if (rp_col < 0 || entity_col < 0 || role_col < 0 || value_col < 0)
        throw ParseError(path + ": fixed-values file needs rp,entity,role,value columns");
    FixedValuesPayload fv;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        std::string where = path + ":" + std::to_string(i + 2);
        long rp = csv::parse_long(row[static_cast<size_t>(rp_col)], where + ":rp");
        std::string role_text = row[static_cast<size_t>(role_col)];
        Role role;
        if (role_text == "p") role = Role::p;
        else if (role_text == "u") role = Role::u;
        else if (role_text == "l") role = Role::l;
        else throw ParseError(where + ": role must be p, u, or l");
        fv.set(role, static_cast<int>(rp - 1), row[static_cast<size_t>(entity_col)],
               csv::parse_double(row[static_cast<size_t>(value_col)], where + ":value"));
    }
    return fv;
}

LinkingMethod method_from_name(const std::string& name, const SystemInstance& inst,
                               const Assignment& assign, const RunConfig& rc) {
    (void)inst;
    if (name == "no-enforcement") return LinkingMethod::no_enforcement();
    if (name == "cyclic") return LinkingMethod::cyclic();
    if (name == "markov") return LinkingMethod::markov(build_transition_matrix(assign));
    if (name == "fixed-values") {
        FixedValuesPayload fv; // empty: compare derives it from the truth run
        if (!rc.fixed_values_file.empty()) fv = read_fixed_values_csv(rc.fixed_values_file);
        return LinkingMethod::fixed_values(std::move(fv));
    }
    throw ValidationError("unknown method '" + name +
                          "' (expected no-enforcement, fixed-values, cyclic, or markov)");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path.string() + ": cannot open file for writing");
    out << text;
}

int cmd_validate(const RunConfig& rc) {
    SystemInstance inst = load_instance(rc.instance); // throws on invalid
    std::cout << "instance ok: " << inst.generators.size() << " generators, "
              << inst.storages.size() << " storages, " << inst.step_count() << " steps ("
              << inst.period_count() << " periods of " << inst.period_length << ")\n";
    return 0;
}

int cmd_aggregate(const RunConfig& rc) {
    SystemInstance inst = load_instance(rc.instance);
    Assignment assign = resolve_assignment(rc, inst);
    MarkovMatrix matrix = build_transition_matrix(assign);
    RpWeights weights = rp_weights(assign);

    fs::create_directories(rc.out);
    write_assignment_csv((fs::path(rc.out) / "assignment.csv").string(), assign);
    write_matrix_csv((fs::path(rc.out) / "matrix.csv").string(), matrix);
    write_weights_csv((fs::path(rc.out) / "weights.csv").string(), weights);

    std::cout << "rp_count " << assign.rp_count << "\n";
    std::cout << "column_sums";
    for (int to = 0; to < matrix.rp_count; ++to) {
        double sum = 0.0;
        for (int from = 0; from < matrix.rp_count; ++from) sum += matrix.at(from, to);
        std::cout << ' ' << fmt_sig(sum, 15);
    }
    std::cout << "\n";
    return 0;
}

int run_and_write_reports(const RunConfig& rc, const std::vector<std::string>& method_names) {
    SystemInstance inst = load_instance(rc.instance);
    Assignment assign = resolve_assignment(rc, inst);

    std::vector<LinkingMethod> methods;
    for (const auto& name : method_names)
        methods.push_back(method_from_name(name, inst, assign, rc));

    auto reports = run_comparison(inst, assign, methods, rc.solver, rc.jobs);

    fs::create_directories(rc.out);
    write_text(fs::path(rc.out) / "report.csv", emit_report(reports, ReportFormat::csv));
    write_text(fs::path(rc.out) / "report.md", emit_report(reports, ReportFormat::markdown));
    bool all_ok = true;
    for (const auto& report : reports) {
        if (report.solved()) {
            schedule_export(report,
                            (fs::path(rc.out) / ("schedule_" + report.method + ".csv")).string());
        } else {
            all_ok = false;
            std::cerr << report.method << ": " << to_string(report.status);
            if (!report.diagnostic.empty()) std::cerr << " (" << report.diagnostic << ")";
            std::cerr << "\n";
        }
    }
    std::cout << emit_report(reports, ReportFormat::markdown);
    return all_ok ? 0 : kExitSolve;
}

int cmd_truth(const RunConfig& rc) {
    return run_and_write_reports(rc, {});
}

int cmd_compare(const RunConfig& rc) {
    if (rc.methods.empty())
        throw ValidationError("compare needs at least one --method");
    return run_and_write_reports(rc, rc.methods);
}

int cmd_build(const RunConfig& rc) {
    SystemInstance inst = load_instance(rc.instance);
    Assignment assign = resolve_assignment(rc, inst);
    fs::create_directories(rc.out);

    std::vector<std::string> names = rc.methods;
    if (names.empty()) names = {"truth"};
    for (const auto& name : names) {
        MilpInstance milp;
        if (name == "truth") {
            SystemInstance truth_inst = reconstruct_truth(inst, assign);
            milp = build_milp(truth_inst, assign, LinkingMethod::full_chronological());
        } else {
            LinkingMethod method = method_from_name(name, inst, assign, rc);
            if (method.kind == LinkingKind::fixed_values && method.fixed.values.empty())
                throw ValidationError("build with fixed-values needs a fixed_values file");
            milp = build_milp(inst, assign, method);
        }
        fs::path path = fs::path(rc.out) / ("model_" + name + ".lp");
        write_lp_file(path.string(), milp);
        std::cout << path.string() << ": " << milp.vars.size() << " variables, "
                  << milp.cons.size() << " constraints\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Representative-period linking experiments for unit-commitment models"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::vector<std::string> methods;
    std::string instance, assignment_file, out_dir, fixed_values_file;
    int rp_count = 0;
    int jobs = 0;
    std::optional<unsigned> seed;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--set", overrides, "override a config key (dotted path, key=value)");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--instance,-i", instance, "instance manifest path");
        cmd->add_option("--assignment,-a", assignment_file, "assignment CSV (period,rp)");
        cmd->add_option("--rp-count", rp_count, "cluster into this many representative periods");
        cmd->add_option("--seed", seed, "clustering seed");
        cmd->add_option("--out,-o", out_dir, "output directory");
        cmd->add_option("--jobs", jobs, "max concurrent solves");
        return cmd;
    };

    auto* validate_cmd = app.add_subcommand("validate", "check an instance bundle");
    validate_cmd->add_option("--instance,-i", instance, "instance manifest path");

    auto* aggregate_cmd = add_common(
        app.add_subcommand("aggregate", "write assignment, Markov matrix, and weights"));
    auto* truth_cmd =
        add_common(app.add_subcommand("truth", "solve the reconstructed truth case only"));
    auto* compare_cmd = add_common(
        app.add_subcommand("compare", "run truth plus the chosen methods and report"));
    compare_cmd->add_option("--method,-m", methods,
                            "no-enforcement | fixed-values | cyclic | markov");
    compare_cmd->add_option("--fixed-values", fixed_values_file,
                            "boundary values CSV for the fixed-values method");
    auto* build_cmd =
        add_common(app.add_subcommand("build", "emit LP files without solving"));
    build_cmd->add_option("--method,-m", methods, "methods (or 'truth') to emit");
    build_cmd->add_option("--fixed-values", fixed_values_file,
                          "boundary values CSV for the fixed-values method");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        json config = json::object();
        if (!config_path.empty()) config = load_config_file(config_path);
        for (const auto& spec : overrides) apply_override(config, spec);

        RunConfig rc = parse_config(config);
        if (!instance.empty()) rc.instance = instance;
        if (!assignment_file.empty()) {
            rc.assignment_file = assignment_file;
            rc.rp_count = 0;
        }
        if (rp_count > 0) {
            rc.rp_count = rp_count;
            rc.assignment_file.clear();
        }
        if (seed) rc.seed = *seed;
        if (!methods.empty()) rc.methods = methods;
        if (!out_dir.empty()) rc.out = out_dir;
        if (jobs > 0) rc.jobs = jobs;
        if (!fixed_values_file.empty()) rc.fixed_values_file = fixed_values_file;
        if (rc.instance.empty()) throw ValidationError("no instance given (--instance or config)");

        if (validate_cmd->parsed()) return cmd_validate(rc);
        if (aggregate_cmd->parsed()) return cmd_aggregate(rc);
        if (truth_cmd->parsed()) return cmd_truth(rc);
        if (compare_cmd->parsed()) return cmd_compare(rc);
        if (build_cmd->parsed()) return cmd_build(rc);
        return kExitUsage;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolve;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
