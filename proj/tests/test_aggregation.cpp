#include "rplink/aggregation.hpp"
#include "rplink/errors.hpp"

#include "support/test_instances.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace rplink;
namespace fs = std::filesystem;

namespace {

Assignment assignment_from(std::vector<int> rp_of_period_1based) {
    Assignment assign;
    int max_rp = 0;
    for (int r : rp_of_period_1based) {
        assign.rp_of_period.push_back(r - 1);
        max_rp = std::max(max_rp, r);
    }
    assign.rp_count = max_rp;
    assign.rp_source_period.assign(static_cast<size_t>(max_rp), -1);
    for (size_t n = 0; n < assign.rp_of_period.size(); ++n) {
        int r = assign.rp_of_period[n];
        if (assign.rp_source_period[static_cast<size_t>(r)] < 0)
            assign.rp_source_period[static_cast<size_t>(r)] = static_cast<int>(n);
    }
    return assign;
}

} // namespace

TEST_CASE("transition matrix counts cyclic predecessor pairs") {
    // pairs: (1,2),(2,1),(1,1),(1,2),(2,3),(3,3) and the closing (3,1)
    auto assign = assignment_from({1, 2, 1, 1, 2, 3, 3});
    MarkovMatrix m = build_transition_matrix(assign);

    CHECK(m.at(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(m.at(1, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(m.at(2, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(m.at(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.at(2, 1) == 0.0);
    CHECK(m.at(1, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.at(2, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.at(0, 2) == 0.0);
}

TEST_CASE("single-RP assignment gives the 1x1 identity") {
    auto m = build_transition_matrix(assignment_from({1, 1, 1, 1}));
    CHECK(m.rp_count == 1);
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.is_identity());
}

TEST_CASE("alternating assignment gives the swap matrix") {
    auto m = build_transition_matrix(assignment_from({1, 2, 1, 2}));
    CHECK(m.at(1, 0) == 1.0);
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(1, 1) == 0.0);
    CHECK(!m.is_identity());
}

TEST_CASE("matrix columns are convex combinations and support matches pairs") {
    std::mt19937 rng(3);
    for (int attempt = 0; attempt < 100; ++attempt) {
        int N = std::uniform_int_distribution<int>(1, 12)(rng);
        Assignment assign = testing::random_assignment(rng, N);
        MarkovMatrix m = build_transition_matrix(assign);

        for (int to = 0; to < m.rp_count; ++to) {
            double sum = 0.0;
            for (int from = 0; from < m.rp_count; ++from) {
                sum += m.at(from, to);
                CHECK(m.at(from, to) >= 0.0);
                CHECK(m.at(from, to) <= 1.0);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
        // support: positive entry iff the cyclic pair occurs
        std::vector<std::vector<bool>> seen(
            static_cast<size_t>(m.rp_count), std::vector<bool>(static_cast<size_t>(m.rp_count)));
        for (int n = 0; n < N; ++n) {
            int from = assign.rp_of_period[static_cast<size_t>(n)];
            int to = assign.rp_of_period[static_cast<size_t>((n + 1) % N)];
            seen[static_cast<size_t>(from)][static_cast<size_t>(to)] = true;
        }
        for (int from = 0; from < m.rp_count; ++from)
            for (int to = 0; to < m.rp_count; ++to)
                CHECK((m.at(from, to) > 0.0) ==
                      seen[static_cast<size_t>(from)][static_cast<size_t>(to)]);
    }
}

TEST_CASE("k-medoids collapses identical periods") {
    auto inst = testing::make_instance(std::vector<double>(36, 4.0), 6);
    Assignment assign = baseline_cluster(inst, 1);
    for (int r : assign.rp_of_period) CHECK(r == 0);
    CHECK(rp_weights(assign).weight[0] == 6);
}

TEST_CASE("k-medoids recovers a well-separated low/high split") {
    std::vector<double> demand;
    std::vector<int> truth_label;
    for (int n = 0; n < 6; ++n) {
        bool high = n % 2 == 1;
        truth_label.push_back(high ? 1 : 0);
        for (int k = 0; k < 4; ++k) demand.push_back(high ? 9.0 + 0.1 * k : 1.0 + 0.1 * k);
    }
    auto inst = testing::make_instance(demand, 4);
    Assignment assign = baseline_cluster(inst, 2, /*seed=*/0);

    // the two clusters separate low from high periods
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            bool same_cluster = assign.rp_of_period[static_cast<size_t>(a)] ==
                                assign.rp_of_period[static_cast<size_t>(b)];
            CHECK(same_cluster == (truth_label[static_cast<size_t>(a)] ==
                                   truth_label[static_cast<size_t>(b)]));
        }

    // objective equals the best over all C(6,2) medoid pairs
    auto cost_for = [&](int m1, int m2) {
        double total = 0.0;
        for (int n = 0; n < 6; ++n) {
            double best = 1e30;
            for (int m : {m1, m2}) {
                double d = 0.0;
                for (int k = 0; k < 4; ++k) {
                    double diff = demand[static_cast<size_t>(n * 4 + k)] -
                                  demand[static_cast<size_t>(m * 4 + k)];
                    d += diff * diff;
                }
                best = std::min(best, d);
            }
            total += best;
        }
        return total;
    };
    double best_brute = 1e30;
    for (int m1 = 0; m1 < 6; ++m1)
        for (int m2 = m1 + 1; m2 < 6; ++m2) best_brute = std::min(best_brute, cost_for(m1, m2));
    double achieved = cost_for(assign.rp_source_period[0], assign.rp_source_period[1]);
    CHECK(achieved == doctest::Approx(best_brute).epsilon(1e-9));
}

TEST_CASE("k-medoids with rp_count == N is the identity assignment") {
    std::mt19937 rng(5);
    auto inst = testing::random_instance(rng);
    int N = inst.period_count();
    Assignment assign = baseline_cluster(inst, N);
    for (int n = 0; n < N; ++n) {
        CHECK(assign.rp_of_period[static_cast<size_t>(n)] == n);
        CHECK(assign.rp_source_period[static_cast<size_t>(n)] == n);
    }
}

TEST_CASE("k-medoids rejects out-of-range rp_count") {
    auto inst = testing::make_instance(std::vector<double>(24, 4.0), 6);
    CHECK_THROWS_AS(baseline_cluster(inst, 0), ValidationError);
    CHECK_THROWS_AS(baseline_cluster(inst, 5), ValidationError);
}

TEST_CASE("reconstruct_truth substitutes representative demand") {
    std::vector<double> demand = {1, 2, 3, 4, 5, 6}; // three periods of two steps
    auto inst = testing::make_instance(demand, 2);

    SUBCASE("identity changes nothing") {
        auto assign = assignment_from({1, 2, 3});
        auto truth = reconstruct_truth(inst, assign);
        CHECK(truth.demand.values == demand);
    }
    SUBCASE("everything mapped to the first period tiles it") {
        auto assign = assignment_from({1, 1, 1});
        auto truth = reconstruct_truth(inst, assign);
        CHECK(truth.demand.values == std::vector<double>{1, 2, 1, 2, 1, 2});
    }
    SUBCASE("pattern 1,2,1 concatenates sources") {
        auto assign = assignment_from({1, 2, 1});
        auto truth = reconstruct_truth(inst, assign);
        CHECK(truth.demand.values == std::vector<double>{1, 2, 3, 4, 1, 2});
    }
}

TEST_CASE("reconstruct_truth is idempotent") {
    std::mt19937 rng(13);
    for (int attempt = 0; attempt < 10; ++attempt) {
        auto inst = testing::random_instance(rng);
        auto assign = testing::random_assignment(rng, inst.period_count());
        auto once = reconstruct_truth(inst, assign);
        auto twice = reconstruct_truth(once, assign);
        CHECK(twice.demand.values == once.demand.values);
    }
}

TEST_CASE("rp_weights counts occurrences") {
    CHECK(rp_weights(assignment_from({1, 2, 1, 1, 2, 3, 3})).weight ==
          std::vector<int>{3, 2, 2});
    CHECK(rp_weights(assignment_from({1, 1, 1, 1})).weight == std::vector<int>{4});
    CHECK(rp_weights(assignment_from({1, 2, 3})).weight == std::vector<int>{1, 1, 1});
}

TEST_CASE("assignment CSV round-trips and validates rp indices") {
    auto dir = fs::temp_directory_path() / "rplink_test_assign";
    fs::create_directories(dir);
    auto path = (dir / "assignment.csv").string();

    auto assign = assignment_from({1, 2, 1, 1, 2, 3, 3});
    write_assignment_csv(path, assign);
    Assignment back = read_assignment_csv(path, 7);
    CHECK(back.rp_of_period == assign.rp_of_period);
    CHECK(back.rp_count == assign.rp_count);
    CHECK(back.rp_source_period == assign.rp_source_period);

    // an rp index that never occurs leaves a hole -> rejected
    std::ofstream bad(dir / "bad.csv");
    bad << "period,rp\n1,1\n2,3\n3,1\n";
    bad.close();
    CHECK_THROWS((void)read_assignment_csv((dir / "bad.csv").string(), 3));
}

TEST_CASE("degenerate chronology: one RP always follows itself") {
    // With a single RP the predecessor matrix is exactly the identity, the
    // case where Markov linking and cyclic linking coincide.
    for (int n : {1, 3, 8}) {
        auto m = build_transition_matrix(assignment_from(std::vector<int>(n, 1)));
        CHECK(m.is_identity());
    }
}
