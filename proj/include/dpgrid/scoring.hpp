#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dpgrid/privacy.hpp"
#include "dpgrid/types.hpp"

namespace dpgrid {

enum class Termination { kThreshold, kExhausted, kCap };

const char* to_string(Termination t);

struct OutlierScore {
  double value = 0.0;
  std::int64_t cells_visited = 0;
  Termination terminated_by = Termination::kThreshold;
};

// Parameters of one scoring configuration. grid_score reads k, weighted,
// delta_max and max_visited_cells; b and epsilon describe how the provider
// backing it was built and are carried for experiment bookkeeping.
struct ScoringConfig {
  int k = 1;
  bool weighted = false;
  int b = 2;
  double delta_max = 0.0;  // <= 0 means the full-grid default, d
  std::int64_t max_visited_cells = 1'000'000;
  std::optional<double> epsilon;
};

// Distance from y to its k-th nearest reference row, Euclidean. Ties are the
// k-th order statistic of the distance multiset.
OutlierScore exact_knn_score(const Matrix& reference, const Vector& y, int k);

// Sum of the Euclidean distances to all k nearest reference rows.
OutlierScore exact_wknn_score(const Matrix& reference, const Vector& y, int k);

// Grid traversal scorer over a count provider.
//
// Candidate cells are those within centroid L1 distance delta_max of y's
// cell, capped at max_visited_cells cells taken ring by ring (the last ring
// truncated in lexicographic order). Candidates are visited in ascending
// ||y - centroid||_1, ties broken lexicographically. Each visit accumulates
// the (possibly noisy, possibly negative) cell count into Q; weighted mode
// accumulates count * centroid-offset-distance into the score, basic mode
// overwrites the score with that distance. Traversal stops once Q >= k
// (threshold) or when the candidates run out (exhausted, or cap if the cell
// budget truncated them).
OutlierScore grid_score(const CountProvider& provider, const Vector& y, const ScoringConfig& cfg);

}  // namespace dpgrid
