#include "dpgrid/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "dpgrid/grid.hpp"

namespace dpgrid {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kThreshold: return "threshold";
    case Termination::kExhausted: return "exhausted";
    case Termination::kCap: return "cap";
  }
  return "unknown";
}

namespace {

std::vector<std::pair<double, Eigen::Index>> sorted_distances(const Matrix& reference,
                                                              const Vector& y, int k) {
  if (reference.rows() < 1) throw ValidationError("reference set is empty");
  if (y.size() != reference.cols()) {
    throw ValidationError("point has dimension " + std::to_string(y.size()) +
                          ", expected " + std::to_string(reference.cols()));
  }
  if (k < 1 || k > reference.rows()) {
    throw ValidationError("k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(reference.rows()) + "]");
  }
  std::vector<std::pair<double, Eigen::Index>> dist(reference.rows());
  for (Eigen::Index i = 0; i < reference.rows(); ++i) {
    dist[i] = {(reference.row(i).transpose() - y).norm(), i};
  }
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  return dist;
}

}  // namespace

OutlierScore exact_knn_score(const Matrix& reference, const Vector& y, int k) {
  auto dist = sorted_distances(reference, y, k);
  return {dist[k - 1].first, 0, Termination::kThreshold};
}

OutlierScore exact_wknn_score(const Matrix& reference, const Vector& y, int k) {
  auto dist = sorted_distances(reference, y, k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += dist[i].first;
  return {sum, 0, Termination::kThreshold};
}

namespace {

struct Candidate {
  double dist_y;      // ||y - centroid||_1, the sort key
  double dist_cell;   // ring / b, the scored distance
  CellIndex cell;
};

struct CandidateAfter {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.dist_y != b.dist_y) return a.dist_y > b.dist_y;
    return a.cell > b.cell;
  }
};

}  // namespace

OutlierScore grid_score(const CountProvider& provider, const Vector& y,
                        const ScoringConfig& cfg) {
  const GridSpec& spec = provider.spec();
  if (cfg.k < 1) throw ValidationError("k must be >= 1");
  if (cfg.max_visited_cells < 1) throw ValidationError("max_visited_cells must be >= 1");
  const double delta_max = cfg.delta_max > 0.0 ? cfg.delta_max
                                               : static_cast<double>(spec.dims());

  const CellIndex origin = cell_of(spec, y);
  // Reverse triangle inequality: a cell at ring distance r/b from the origin
  // cell is at least r/b - origin_span away from y, so rings only need to be
  // generated up to the current heap minimum plus origin_span to pop in
  // exact global order.
  const double origin_span = l1_distance(y, centroid(spec, origin));

  ShellCursor cursor(spec, origin, delta_max, cfg.max_visited_cells);
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateAfter> heap;

  auto pump_ring = [&]() -> bool {
    auto shell = cursor.next();
    if (!shell) return false;
    for (auto& cell : shell->cells) {
      const double dist_y = l1_distance(y, centroid(spec, cell));
      heap.push(Candidate{dist_y, shell->distance, std::move(cell)});
    }
    return true;
  };

  OutlierScore score;
  score.terminated_by = Termination::kExhausted;
  double cumulative = 0.0;

  while (true) {
    if (heap.empty()) {
      if (!pump_ring()) break;
      continue;
    }
    // Generate every ring that could still hold a nearer candidate.
    while (true) {
      auto peek = cursor.peek_distance();
      if (!peek || *peek > heap.top().dist_y + origin_span + kRingBoundaryTol) break;
      if (!pump_ring()) break;
    }
    const Candidate top = heap.top();
    heap.pop();

    ++score.cells_visited;
    const double count = provider.query(top.cell);
    cumulative += count;
    if (cfg.weighted) {
      score.value += count * top.dist_cell;
    } else {
      score.value = top.dist_cell;
    }
    if (cumulative >= static_cast<double>(cfg.k)) {
      score.terminated_by = Termination::kThreshold;
      return score;
    }
  }

  score.terminated_by = cursor.truncated() ? Termination::kCap : Termination::kExhausted;
  return score;
}

}  // namespace dpgrid
