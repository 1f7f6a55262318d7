#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hinsim/matrix.hpp"

namespace hinsim {

struct ClusteringBenchmark {
    std::vector<ObjectId> objects;
    std::vector<int> labels;  // dense 0..k-1, first-seen order
    int k = 0;
};

struct RelevanceJudgments {
    std::map<ObjectId, std::unordered_map<ObjectId, int>> by_source;
};

ClusteringBenchmark load_benchmark(std::istream& in, const Hin& hin);
RelevanceJudgments load_judgments(std::istream& in, const Hin& hin);

// k-means++ seeding followed by Lloyd iterations.
std::vector<int> kmeans(const Dense& features, int k, std::uint64_t seed, int max_iter = 300);
// Mutual information over the arithmetic mean of the two entropies.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);
// `at` <= 0 scores the whole list.
double ndcg(const std::vector<ObjectId>& ranking, const std::unordered_map<ObjectId, int>& gains, int at = 0);

std::vector<std::vector<double>> sample_weights(double a, double b, int h0, int samples, std::uint64_t seed);

struct SweepConfig {
    std::vector<double> lambdas{0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<std::pair<double, double>> beta_pairs{{1, 9}, {2, 8}, {3, 7}, {4, 6}, {5, 5},
                                                      {6, 4}, {7, 3}, {8, 2}, {9, 1}};
    int samples = 10;
    std::uint64_t seed = 1;
    Locality locality = Locality::local;
    int threads = 1;
    // When set, only these weight vectors are evaluated (one row per lambda each).
    std::vector<std::vector<double>> fixed_weights;
};

struct SweepRow {
    double lambda = 0.0;
    int pair = -1;    // index into beta_pairs, -1 for fixed weights
    int sample = -1;
    std::vector<double> w;
    double score = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepRow> best_per_lambda;
    SweepRow best;
};

double cluster_score(const Dense& similarity, const Hin& hin, const ClusteringBenchmark& bench, std::uint64_t seed);
double rank_score(const Dense& similarity, const Hin& hin, ObjectId source,
                  const std::unordered_map<ObjectId, int>& gains, int at = 0);

SweepResult sweep_cluster(const Hin& hin, const Sms& sms, const ClusteringBenchmark& bench, const SweepConfig& cfg);
SweepResult sweep_rank(const Hin& hin, const Sms& sms, ObjectId source, const std::unordered_map<ObjectId, int>& gains,
                       const SweepConfig& cfg, int at = 0);

}  // namespace hinsim
