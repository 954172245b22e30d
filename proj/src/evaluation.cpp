#include "dpgrid/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dpgrid/grid.hpp"
#include "dpgrid/io.hpp"
#include "dpgrid/privacy.hpp"

namespace dpgrid {

namespace {

constexpr std::uint64_t kSplitStreamTag = 0x5E1EC7A5B1A5ED11ull;
constexpr std::uint64_t kSynthStreamTag = 0x51C4E71CDA7A5EEDull;

void check_scored(const ScoredTestSet& s) {
  if (s.scores.size() != s.labels.size()) {
    throw ValidationError("scores and labels differ in length");
  }
  if (s.scores.empty()) throw ValidationError("empty test set");
}

std::size_t positive_count(const ScoredTestSet& s) {
  return static_cast<std::size_t>(std::count(s.labels.begin(), s.labels.end(), 1));
}

// Indices in descending score order; equal scores keep file order.
std::vector<std::size_t> descending_order(const ScoredTestSet& s) {
  std::vector<std::size_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] > s.scores[b];
  });
  return order;
}

std::uint64_t bounded_draw(std::uint64_t& state, std::uint64_t n) {
  const std::uint64_t reject_from =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  while (true) {
    const std::uint64_t v = splitmix64_next(state);
    if (v < reject_from) return v % n;
  }
}

}  // namespace

double auroc(const ScoredTestSet& s) {
  check_scored(s);
  const std::size_t n_pos = positive_count(s);
  const std::size_t n_neg = s.scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("AUROC undefined: test set holds a single class");
  }
  // Mann-Whitney via average ranks over tie groups.
  std::vector<std::size_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] < s.scores[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && s.scores[order[j + 1]] == s.scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (s.labels[order[t]] == 1) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double average_precision(const ScoredTestSet& s) {
  check_scored(s);
  const std::size_t n_pos = positive_count(s);
  if (n_pos == 0) throw ValidationError("AP undefined: no outliers in test set");
  const auto order = descending_order(s);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (s.labels[order[rank]] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return sum / static_cast<double>(n_pos);
}

double precision_at_n(const ScoredTestSet& s, int n) {
  check_scored(s);
  if (n < 1 || static_cast<std::size_t>(n) > s.scores.size()) {
    throw ValidationError("n=" + std::to_string(n) + " outside [1, " +
                          std::to_string(s.scores.size()) + "]");
  }
  const auto order = descending_order(s);
  int hits = 0;
  for (int rank = 0; rank < n; ++rank) {
    if (s.labels[order[rank]] == 1) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

SplitResult make_split(const RawDataset& data, int m_outliers, double train_frac,
                       std::uint64_t seed) {
  if (!data.has_labels()) throw ValidationError("split requires a labeled dataset");
  if (!(train_frac > 0.0 && train_frac <= 1.0)) {
    throw ValidationError("train fraction must be in (0, 1]");
  }
  const auto n = data.rows();
  std::int64_t ones = std::count(data.labels.begin(), data.labels.end(), 1);
  const std::uint8_t minority = ones <= n - ones ? 1 : 0;

  std::vector<Eigen::Index> minority_rows, majority_rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    (data.labels[i] == minority ? minority_rows : majority_rows).push_back(i);
  }
  if (m_outliers > static_cast<int>(minority_rows.size())) {
    throw ValidationError("m_outliers=" + std::to_string(m_outliers) + " exceeds the " +
                          std::to_string(minority_rows.size()) + " minority rows");
  }
  // First m minority rows in file order are the outliers; the rest of the
  // minority class is dropped. All majority rows are inliers.
  std::vector<Eigen::Index> outlier_rows(minority_rows.begin(), minority_rows.begin() + m_outliers);
  std::vector<Eigen::Index>& inlier_rows = majority_rows;

  std::uint64_t state = splitmix64_mix(seed ^ kSplitStreamTag);
  for (std::size_t i = inlier_rows.size(); i > 1; --i) {
    std::swap(inlier_rows[i - 1], inlier_rows[bounded_draw(state, i)]);
  }

  const auto n_ref = static_cast<std::size_t>(
      std::floor(train_frac * static_cast<double>(inlier_rows.size()) + 1e-9));

  SplitResult split;
  split.reference_rows.assign(inlier_rows.begin(), inlier_rows.begin() + n_ref);
  split.test_rows.assign(inlier_rows.begin() + n_ref, inlier_rows.end());
  split.test_rows.insert(split.test_rows.end(), outlier_rows.begin(), outlier_rows.end());

  split.reference.resize(static_cast<Eigen::Index>(split.reference_rows.size()), data.dims());
  for (std::size_t i = 0; i < split.reference_rows.size(); ++i) {
    split.reference.row(static_cast<Eigen::Index>(i)) = data.points.row(split.reference_rows[i]);
  }
  split.test_points.resize(static_cast<Eigen::Index>(split.test_rows.size()), data.dims());
  split.test_labels.resize(split.test_rows.size());
  const std::size_t n_test_inliers = split.test_rows.size() - outlier_rows.size();
  for (std::size_t i = 0; i < split.test_rows.size(); ++i) {
    split.test_points.row(static_cast<Eigen::Index>(i)) = data.points.row(split.test_rows[i]);
    split.test_labels[i] = i < n_test_inliers ? 0 : 1;
  }
  return split;
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kKnn: return "knn";
    case Algorithm::kWknn: return "wknn";
    case Algorithm::kGridKnn: return "grid_knn";
    case Algorithm::kGridWknn: return "grid_wknn";
    case Algorithm::kDpGridKnn: return "dp_grid_knn";
    case Algorithm::kDpGridWknn: return "dp_grid_wknn";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& id) {
  for (Algorithm a : kAllAlgorithms) {
    if (id == to_string(a)) return a;
  }
  throw ValidationError("unknown algorithm id '" + id + "'");
}

bool is_grid(Algorithm a) { return a != Algorithm::kKnn && a != Algorithm::kWknn; }

bool is_private(Algorithm a) {
  return a == Algorithm::kDpGridKnn || a == Algorithm::kDpGridWknn;
}

MetricsRecord evaluate_once(const RawDataset& data, const std::string& dataset_id,
                            int m_outliers, Algorithm algorithm, const ExperimentConfig& cfg,
                            int k, int b, std::optional<double> epsilon, std::uint64_t seed) {
  const SplitResult split = make_split(data, m_outliers, cfg.train_fraction, seed);
  const PreprocessParams params = fit_preprocessor(split.reference);
  const Matrix reference = transform_matrix(params, split.reference, false);
  const Matrix test = transform_matrix(params, split.test_points, true);

  MetricsRecord rec;
  rec.dataset = dataset_id;
  rec.algorithm = algorithm;
  rec.k = k;
  rec.seed = seed;

  ScoredTestSet scored;
  scored.labels = split.test_labels;
  scored.scores.resize(static_cast<std::size_t>(test.rows()));

  if (!is_grid(algorithm)) {
    const bool weighted = algorithm == Algorithm::kWknn;
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
      const Vector y = test.row(i).transpose();
      scored.scores[static_cast<std::size_t>(i)] =
          (weighted ? exact_wknn_score(reference, y, k) : exact_knn_score(reference, y, k)).value;
    }
  } else {
    rec.b = b;
    rec.epsilon = epsilon;
    const GridSpec spec = make_grid(params, b);
    GridHistogram hist = build_histogram(spec, reference);
    const CountProvider provider = epsilon ? CountProvider::noisy(std::move(hist), *epsilon, seed)
                                           : CountProvider::exact(std::move(hist));
    ScoringConfig sc;
    sc.k = k;
    sc.weighted = algorithm == Algorithm::kGridWknn || algorithm == Algorithm::kDpGridWknn;
    sc.b = b;
    sc.delta_max = cfg.delta_max;
    sc.max_visited_cells = cfg.max_visited_cells;
    sc.epsilon = epsilon;

    double visited_sum = 0.0;
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
      const OutlierScore s = grid_score(provider, test.row(i).transpose(), sc);
      scored.scores[static_cast<std::size_t>(i)] = s.value;
      visited_sum += static_cast<double>(s.cells_visited);
      switch (s.terminated_by) {
        case Termination::kThreshold: ++rec.terminated_threshold; break;
        case Termination::kExhausted: ++rec.terminated_exhausted; break;
        case Termination::kCap: ++rec.terminated_cap; break;
      }
    }
    rec.cells_visited_mean = visited_sum / static_cast<double>(test.rows());
  }

  rec.n_used = static_cast<int>(positive_count(scored));
  rec.auroc = auroc(scored);
  rec.ap = average_precision(scored);
  rec.p_at_n = precision_at_n(scored, rec.n_used);
  return rec;
}

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg, const RawDataset& data,
                                          const std::string& dataset_id, int m_outliers) {
  if (cfg.seeds.empty()) throw ValidationError("seeds list is empty");
  if (cfg.k_values.empty()) throw ValidationError("k list is empty");

  std::vector<MetricsRecord> records;
  auto run = [&](Algorithm a, int k, int b, std::optional<double> eps, std::uint64_t seed) {
    try {
      records.push_back(evaluate_once(data, dataset_id, m_outliers, a, cfg, k, b, eps, seed));
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep cell (" + dataset_id + ", " + to_string(a) +
                               ", k=" + std::to_string(k) + ", b=" + std::to_string(b) +
                               (eps ? ", eps=" + std::to_string(*eps) : "") +
                               ", seed=" + std::to_string(seed) + ") failed: " + e.what());
    }
  };

  for (Algorithm a : cfg.algorithms) {
    for (int k : cfg.k_values) {
      if (!is_grid(a)) {
        run(a, k, 0, std::nullopt, cfg.seeds.front());
        continue;
      }
      for (int b : cfg.b_values) {
        if (!is_private(a)) {
          run(a, k, b, std::nullopt, cfg.seeds.front());
          continue;
        }
        for (double eps : cfg.epsilons) {
          for (std::uint64_t seed : cfg.seeds) {
            run(a, k, b, eps, seed);
          }
        }
      }
    }
  }
  return records;
}

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.dataset.empty()) throw ValidationError("no dataset configured");
  if (cfg.dataset == "synthetic" || cfg.dataset.rfind("synthetic:", 0) == 0) {
    int n_in = 200, n_out = 20;
    std::uint64_t seed = 1;
    if (auto colon = cfg.dataset.find(':'); colon != std::string::npos) {
      std::string opts = cfg.dataset.substr(colon + 1);
      std::size_t pos = 0;
      while (pos < opts.size()) {
        auto end = opts.find(',', pos);
        if (end == std::string::npos) end = opts.size();
        const std::string kv = opts.substr(pos, end - pos);
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("bad synthetic option '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const long value = std::stol(kv.substr(eq + 1));
        if (key == "inliers") n_in = static_cast<int>(value);
        else if (key == "outliers") n_out = static_cast<int>(value);
        else if (key == "seed") seed = static_cast<std::uint64_t>(value);
        else throw ValidationError("unknown synthetic option '" + key + "'");
        pos = end + 1;
      }
    }
    const RawDataset data = make_synthetic_dataset(n_in, n_out, seed);
    return run_experiment(cfg, data, "synthetic", n_out);
  }
  const DatasetManifest manifest = load_manifest(cfg.dataset);
  const RawDataset data = load_dataset(manifest);
  return run_experiment(cfg, data, manifest.name, manifest.m_outliers);
}

RawDataset make_synthetic_dataset(int n_inliers, int n_outliers, std::uint64_t seed) {
  if (n_inliers < 1 || n_outliers < 0) throw ValidationError("bad synthetic sizes");
  std::uint64_t state = splitmix64_mix(seed ^ kSynthStreamTag);
  auto uniform = [&]() { return uniform_from_bits(splitmix64_next(state)); };

  RawDataset data;
  data.points.resize(n_inliers + n_outliers, 2);
  data.labels.assign(static_cast<std::size_t>(n_inliers + n_outliers), 0);

  // Inliers: tight Gaussian blob away from the origin, so every small grid
  // partition keeps it inside a single cell. Box-Muller transform.
  for (int i = 0; i < n_inliers; ++i) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * M_PI * uniform();
    data.points(i, 0) = 2.25 + 0.2 * r * std::cos(theta);
    data.points(i, 1) = 2.25 + 0.2 * r * std::sin(theta);
  }
  // Outliers: uniform over a box in the opposite quadrant.
  for (int i = 0; i < n_outliers; ++i) {
    data.points(n_inliers + i, 0) = -3.0 + 2.7 * uniform();
    data.points(n_inliers + i, 1) = -3.0 + 2.7 * uniform();
    data.labels[static_cast<std::size_t>(n_inliers + i)] = 1;
  }
  return data;
}

}  // namespace dpgrid
