#pragma once

#include "rplink/system.hpp"

#include <string>
#include <vector>

namespace rplink {

/// Mapping of original periods onto representative periods (RPs).
/// All indices are 0-based internally; file formats use 1-based indices.
struct Assignment {
    std::vector<int> rp_of_period;     // length N; rp index per original period
    int rp_count = 0;                  // number of RPs
    std::vector<int> rp_source_period; // per rp, the original period defining its data

    int period_count() const { return static_cast<int>(rp_of_period.size()); }
};

/// Predecessor-probability matrix. at(from, to) is the probability that an
/// occurrence of RP `to` was preceded in the original chronology by a period
/// represented by RP `from`. Columns (fixed `to`) sum to one; the chronology
/// is closed cyclically, so every occurrence has exactly one predecessor.
struct MarkovMatrix {
    int rp_count = 0;
    std::vector<double> pred_prob; // row-major [from * rp_count + to]

    double at(int from, int to) const { return pred_prob[static_cast<size_t>(from) * rp_count + to]; }
    double& at(int from, int to) { return pred_prob[static_cast<size_t>(from) * rp_count + to]; }

    static MarkovMatrix identity(int rp_count);
    bool is_identity(double tol = 1e-12) const;
};

/// Number of original periods each RP stands for.
struct RpWeights {
    std::vector<int> weight;
};

/// Checks Assignment invariants against an instance; returns problem
/// descriptions (empty when consistent).
std::vector<std::string> validate_assignment(const Assignment& assign, int period_count);

/// Counts ordered predecessor pairs over the cyclically closed chronology
/// and normalizes per destination RP.
MarkovMatrix build_transition_matrix(const Assignment& assign);

/// k-medoids over per-period demand profiles (Euclidean distance, profiles
/// scaled by the horizon-wide max so relative levels are preserved).
/// Deterministic for a given seed; ties break toward the lowest period index.
Assignment baseline_cluster(const SystemInstance& inst, int rp_count, unsigned seed = 0);

/// Full-horizon instance with every period's demand replaced by its
/// representative's demand: the perfect-aggregation baseline.
SystemInstance reconstruct_truth(const SystemInstance& inst, const Assignment& assign);

RpWeights rp_weights(const Assignment& assign);

// File formats (1-based indices).
Assignment read_assignment_csv(const std::string& path, int period_count);
void write_assignment_csv(const std::string& path, const Assignment& assign);
void write_matrix_csv(const std::string& path, const MarkovMatrix& matrix);
void write_weights_csv(const std::string& path, const RpWeights& weights);

} // namespace rplink
