#include "rplink/aggregation.hpp"

#include "rplink/csv.hpp"
#include "rplink/errors.hpp"
#include "rplink/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace rplink {

MarkovMatrix MarkovMatrix::identity(int rp_count) {
    MarkovMatrix m;
    m.rp_count = rp_count;
    m.pred_prob.assign(static_cast<size_t>(rp_count) * rp_count, 0.0);
    for (int r = 0; r < rp_count; ++r) m.at(r, r) = 1.0;
    return m;
}

bool MarkovMatrix::is_identity(double tol) const {
    for (int i = 0; i < rp_count; ++i)
        for (int j = 0; j < rp_count; ++j)
            if (std::abs(at(i, j) - (i == j ? 1.0 : 0.0)) > tol) return false;
    return true;
}

std::vector<std::string> validate_assignment(const Assignment& assign, int period_count) {
    std::vector<std::string> out;
    const int N = assign.period_count();
    if (N != period_count)
        out.push_back("assignment covers " + std::to_string(N) + " periods, instance has " +
                      std::to_string(period_count));
    if (assign.rp_count <= 0) {
        out.push_back("rp_count must be positive");
        return out;
    }
    std::vector<int> seen(static_cast<size_t>(assign.rp_count), 0);
    for (int n = 0; n < N; ++n) {
        int r = assign.rp_of_period[n];
        if (r < 0 || r >= assign.rp_count) {
            out.push_back("period " + std::to_string(n + 1) + " maps to unknown rp " +
                          std::to_string(r + 1));
            return out;
        }
        ++seen[static_cast<size_t>(r)];
    }
    for (int r = 0; r < assign.rp_count; ++r)
        if (seen[static_cast<size_t>(r)] == 0)
            out.push_back("rp " + std::to_string(r + 1) + " never occurs in the assignment");
    if (static_cast<int>(assign.rp_source_period.size()) != assign.rp_count) {
        out.push_back("rp_source_period must list one source per rp");
        return out;
    }
    for (int r = 0; r < assign.rp_count; ++r) {
        int src = assign.rp_source_period[static_cast<size_t>(r)];
        if (src < 0 || src >= N)
            out.push_back("rp " + std::to_string(r + 1) + " has out-of-range source period");
        else if (assign.rp_of_period[static_cast<size_t>(src)] != r)
            out.push_back("rp " + std::to_string(r + 1) + " source period " +
                          std::to_string(src + 1) + " is not assigned to it");
    }
    return out;
}

MarkovMatrix build_transition_matrix(const Assignment& assign) {
    const int N = assign.period_count();
    const int RP = assign.rp_count;
    MarkovMatrix m;
    m.rp_count = RP;
    m.pred_prob.assign(static_cast<size_t>(RP) * RP, 0.0);

    // Count (predecessor, successor) pairs; the pair (last, first) closes the cycle.
    std::vector<double> into(static_cast<size_t>(RP), 0.0);
    for (int n = 0; n < N; ++n) {
        int from = assign.rp_of_period[static_cast<size_t>(n)];
        int to = assign.rp_of_period[static_cast<size_t>((n + 1) % N)];
        m.at(from, to) += 1.0;
        into[static_cast<size_t>(to)] += 1.0;
    }
    // Every rp occurs at least once, so every column has mass.
    for (int to = 0; to < RP; ++to)
        for (int from = 0; from < RP; ++from)
            m.at(from, to) /= into[static_cast<size_t>(to)];
    return m;
}

namespace {

double sq_distance(const std::vector<double>& demand, int K, int a, int b, double scale) {
    double d = 0.0;
    for (int k = 0; k < K; ++k) {
        double diff = (demand[static_cast<size_t>(a * K + k)] -
                       demand[static_cast<size_t>(b * K + k)]) *
                      scale;
        d += diff * diff;
    }
    return d;
}

} // namespace

Assignment baseline_cluster(const SystemInstance& inst, int rp_count, unsigned seed) {
    const int N = inst.period_count();
    const int K = inst.period_length;
    if (rp_count < 1 || rp_count > N)
        throw ValidationError("rp_count " + std::to_string(rp_count) + " out of range [1, " +
                              std::to_string(N) + "]");

    double max_demand = 0.0;
    for (double v : inst.demand.values) max_demand = std::max(max_demand, v);
    const double scale = max_demand > 0 ? 1.0 / max_demand : 1.0;

    // Pairwise distances between period profiles.
    std::vector<double> dist(static_cast<size_t>(N) * N, 0.0);
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b) {
            double d = sq_distance(inst.demand.values, K, a, b, scale);
            dist[static_cast<size_t>(a) * N + b] = d;
            dist[static_cast<size_t>(b) * N + a] = d;
        }
    auto d_at = [&dist, N](int a, int b) { return dist[static_cast<size_t>(a) * N + b]; };

    // Random distinct start, then greedy swap descent (PAM-style).
    std::mt19937 rng(seed);
    std::vector<int> periods(static_cast<size_t>(N));
    std::iota(periods.begin(), periods.end(), 0);
    std::shuffle(periods.begin(), periods.end(), rng);
    std::vector<int> medoids(periods.begin(), periods.begin() + rp_count);
    std::sort(medoids.begin(), medoids.end());

    auto total_cost = [&](const std::vector<int>& meds) {
        double cost = 0.0;
        for (int n = 0; n < N; ++n) {
            double best = std::numeric_limits<double>::infinity();
            for (int m : meds) best = std::min(best, d_at(n, m));
            cost += best;
        }
        return cost;
    };

    double cost = total_cost(medoids);
    bool improved = true;
    while (improved) {
        improved = false;
        for (size_t mi = 0; mi < medoids.size() && !improved; ++mi) {
            for (int cand = 0; cand < N && !improved; ++cand) {
                if (std::find(medoids.begin(), medoids.end(), cand) != medoids.end()) continue;
                std::vector<int> trial = medoids;
                trial[mi] = cand;
                double trial_cost = total_cost(trial);
                if (trial_cost < cost - 1e-15) {
                    medoids = trial;
                    cost = trial_cost;
                    improved = true;
                }
            }
        }
    }
    std::sort(medoids.begin(), medoids.end());

    Assignment assign;
    assign.rp_count = rp_count;
    assign.rp_source_period = medoids;
    assign.rp_of_period.assign(static_cast<size_t>(N), 0);
    for (int n = 0; n < N; ++n) {
        // A medoid always represents itself; other periods go to the nearest
        // medoid, ties toward the lowest rp index.
        auto self = std::find(medoids.begin(), medoids.end(), n);
        if (self != medoids.end()) {
            assign.rp_of_period[static_cast<size_t>(n)] =
                static_cast<int>(self - medoids.begin());
            continue;
        }
        int best_rp = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < rp_count; ++r) {
            double d = d_at(n, medoids[static_cast<size_t>(r)]);
            if (d < best - 1e-15) {
                best = d;
                best_rp = r;
            }
        }
        assign.rp_of_period[static_cast<size_t>(n)] = best_rp;
    }
    return assign;
}

SystemInstance reconstruct_truth(const SystemInstance& inst, const Assignment& assign) {
    auto problems = validate_assignment(assign, inst.period_count());
    if (!problems.empty()) throw ValidationError("invalid assignment: " + problems.front());

    SystemInstance out = inst;
    const int K = inst.period_length;
    for (int n = 0; n < inst.period_count(); ++n) {
        int src = assign.rp_source_period[static_cast<size_t>(
            assign.rp_of_period[static_cast<size_t>(n)])];
        for (int k = 0; k < K; ++k)
            out.demand.values[static_cast<size_t>(n * K + k)] =
                inst.demand.values[static_cast<size_t>(src * K + k)];
    }
    return out;
}

RpWeights rp_weights(const Assignment& assign) {
    RpWeights w;
    w.weight.assign(static_cast<size_t>(assign.rp_count), 0);
    for (int r : assign.rp_of_period) ++w.weight[static_cast<size_t>(r)];
    return w;
}

Assignment read_assignment_csv(const std::string& path, int period_count) {
    auto table = csv::read_file(path);
    int period_col = table.column("period");
    int rp_col = table.column("rp");
    if (period_col < 0 || rp_col < 0)
        throw ParseError(path + ": assignment file needs 'period' and 'rp' columns");

    Assignment assign;
    assign.rp_of_period.assign(static_cast<size_t>(period_count), -1);
    int max_rp = 0;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        std::string where = path + ":" + std::to_string(i + 2);
        long period = csv::parse_long(table.rows[i][static_cast<size_t>(period_col)], where + ":period");
        long rp = csv::parse_long(table.rows[i][static_cast<size_t>(rp_col)], where + ":rp");
        if (period < 1 || period > period_count)
            throw ParseError(where + ": period " + std::to_string(period) + " out of range [1, " +
                             std::to_string(period_count) + "]");
        if (rp < 1)
            throw ParseError(where + ": rp " + std::to_string(rp) + " must be >= 1");
        assign.rp_of_period[static_cast<size_t>(period - 1)] = static_cast<int>(rp - 1);
        max_rp = std::max(max_rp, static_cast<int>(rp));
    }
    for (int n = 0; n < period_count; ++n)
        if (assign.rp_of_period[static_cast<size_t>(n)] < 0)
            throw ParseError(path + ": no rp assigned to period " + std::to_string(n + 1));

    assign.rp_count = max_rp;
    assign.rp_source_period.assign(static_cast<size_t>(max_rp), -1);
    for (int n = 0; n < period_count; ++n) {
        int r = assign.rp_of_period[static_cast<size_t>(n)];
        if (assign.rp_source_period[static_cast<size_t>(r)] < 0)
            assign.rp_source_period[static_cast<size_t>(r)] = n;
    }
    auto problems = validate_assignment(assign, period_count);
    if (!problems.empty()) throw ValidationError(path + ": " + problems.front());
    return assign;
}

void write_assignment_csv(const std::string& path, const Assignment& assign) {
    csv::Table table;
    table.header = {"period", "rp"};
    for (int n = 0; n < assign.period_count(); ++n)
        table.rows.push_back({std::to_string(n + 1),
                              std::to_string(assign.rp_of_period[static_cast<size_t>(n)] + 1)});
    csv::write_file(path, table);
}

void write_matrix_csv(const std::string& path, const MarkovMatrix& matrix) {
    // Bare RP x RP grid: row = source rp', column = destination rp.
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    for (int from = 0; from < matrix.rp_count; ++from) {
        for (int to = 0; to < matrix.rp_count; ++to) {
            if (to) out << ',';
            out << fmt_sig(matrix.at(from, to), 15);
        }
        out << '\n';
    }
}

void write_weights_csv(const std::string& path, const RpWeights& weights) {
    csv::Table table;
    table.header = {"rp", "weight"};
    for (size_t r = 0; r < weights.weight.size(); ++r)
        table.rows.push_back({std::to_string(r + 1), std::to_string(weights.weight[r])});
    csv::write_file(path, table);
}

} // namespace rplink
