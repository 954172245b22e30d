#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpgrid/preprocess.hpp"
#include "dpgrid/scoring.hpp"
#include "dpgrid/types.hpp"

namespace dpgrid {

struct ScoredTestSet {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;  // 1 = outlier
};

// Probability that a random outlier outscores a random inlier, ties counted
// one half (Mann-Whitney). Throws ValidationError when a class is missing.
double auroc(const ScoredTestSet& s);

// Mean precision at the rank of each outlier in descending-score order.
// Equal scores keep their original order (stable sort).
double average_precision(const ScoredTestSet& s);

// Fraction of outliers among the top n scores, same ordering as AP.
double precision_at_n(const ScoredTestSet& s, int n);

struct SplitResult {
  Matrix reference;                        // inlier rows used for fitting
  Matrix test_points;                      // held-out inliers then outliers
  std::vector<std::uint8_t> test_labels;   // aligned with test_points
  std::vector<Eigen::Index> reference_rows;  // original row indices
  std::vector<Eigen::Index> test_rows;
};

// Reference/test split of a labeled dataset. The outliers are the first
// m_outliers rows of the minority class in file order; minority rows beyond
// those are dropped. The majority rows are the inliers: a seeded shuffle
// sends floor(train_frac * n) of them to the reference set and the rest,
// followed by the outliers, to the test set.
SplitResult make_split(const RawDataset& data, int m_outliers, double train_frac,
                       std::uint64_t seed);

enum class Algorithm { kKnn, kWknn, kGridKnn, kGridWknn, kDpGridKnn, kDpGridWknn };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& id);
bool is_grid(Algorithm a);
bool is_private(Algorithm a);

constexpr std::array<Algorithm, 6> kAllAlgorithms = {
    Algorithm::kKnn,        Algorithm::kWknn,      Algorithm::kGridKnn,
    Algorithm::kGridWknn,   Algorithm::kDpGridKnn, Algorithm::kDpGridWknn};

// One row of sweep results.
struct MetricsRecord {
  std::string dataset;
  Algorithm algorithm = Algorithm::kKnn;
  int k = 0;
  std::optional<int> b;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  double auroc = 0.0;
  double ap = 0.0;
  double p_at_n = 0.0;
  int n_used = 0;
  double cells_visited_mean = 0.0;
  std::int64_t terminated_threshold = 0;
  std::int64_t terminated_exhausted = 0;
  std::int64_t terminated_cap = 0;
};

struct ExperimentConfig {
  std::string dataset;  // manifest path, or "synthetic[:key=value,...]"
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<int> k_values{5};
  std::vector<int> b_values{2};
  std::vector<double> epsilons{5, 2.5, 1.25, .6, .3, .15, .075, .035, .015};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double train_fraction = 0.8;
  double delta_max = 0.0;  // <= 0: defaults to the dimension count
  std::int64_t max_visited_cells = 1'000'000;
};

// Scores one algorithm configuration against a split and computes the three
// metrics. Private algorithms take their noise seed from `seed`; the split
// is drawn from the same seed.
MetricsRecord evaluate_once(const RawDataset& data, const std::string& dataset_id,
                            int m_outliers, Algorithm algorithm, const ExperimentConfig& cfg,
                            int k, int b, std::optional<double> epsilon, std::uint64_t seed);

// Full sweep over the config's parameter grids. Non-private algorithms run
// once on the first seed (their scores are seed-free); private ones run once
// per seed with the reference/test split re-drawn from that seed. Record
// order is deterministic.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg);
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg, const RawDataset& data,
                                          const std::string& dataset_id, int m_outliers);

// Labeled 2-d benchmark used by the self-checks and the "synthetic" dataset
// id: a tight Gaussian inlier blob away from the origin plus uniform
// outliers in the opposite quadrant, so grid partitions keep the blob inside
// one cell for small b.
RawDataset make_synthetic_dataset(int n_inliers, int n_outliers, std::uint64_t seed);

}  // namespace dpgrid
