#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dpgrid/preprocess.hpp"
#include "dpgrid/types.hpp"

namespace dpgrid {

// Uniform partition of the unit hypercube into b intervals per dimension.
// Cells are hypercubes of edge length 1/b; there are b^d of them, never
// materialized densely.
struct GridSpec {
  int b = 1;
  Vector lo;  // lower corner of the hypercube, = -mean of the preprocessor

  Eigen::Index dims() const { return lo.size(); }
};

GridSpec make_grid(const PreprocessParams& params, int b);

bool in_bounds(const GridSpec& spec, const CellIndex& c);

// Maps a point inside the hypercube to its cell. The exact upper boundary
// belongs to the last cell; sub-ulp excursions below the lower corner (from
// centering round-off) are clamped to cell 0.
CellIndex cell_of(const GridSpec& spec, const Vector& p);

// Center of a cell: lo[j] + (idx[j] + 0.5) / b. Throws on out-of-bounds.
Vector centroid(const GridSpec& spec, const CellIndex& c);

// L1 distance computed as a plain left-to-right scalar sum so independent
// implementations of the same formula agree bitwise.
double l1_distance(const Vector& a, const Vector& b);

// Integer L1 offset between two cells; centroid L1 distance is this / b.
std::int64_t cell_l1_offset(const CellIndex& a, const CellIndex& b);

// Sparse cell counts of a reference set. Absent cells have count zero.
struct GridHistogram {
  GridSpec spec;
  std::unordered_map<CellIndex, std::int64_t, CellIndexHash> counts;
  std::int64_t total = 0;

  std::int64_t count(const CellIndex& c) const {
    auto it = counts.find(c);
    return it == counts.end() ? 0 : it->second;
  }
};

// points: one row per point, already transformed into the hypercube.
GridHistogram build_histogram(const GridSpec& spec, const Matrix& points);

// One ring of cells around an origin: all in-bounds cells at integer L1
// offset `ring` from it, in lexicographic order. Centroid L1 distance to the
// origin's centroid is ring / b for every cell in the ring.
struct Shell {
  int ring = 0;
  double distance = 0.0;  // ring / b
  std::vector<CellIndex> cells;
};

// Lazy ring-by-ring enumeration of the cells within centroid L1 distance
// delta_max of an origin cell. Rings come in ascending order, origin first
// (ring 0). A cell budget bounds the total number of cells yielded; the
// final ring is truncated lexicographically when the budget runs out, after
// which the cursor reports itself truncated and yields nothing further.
class ShellCursor {
 public:
  ShellCursor(const GridSpec& spec, CellIndex origin, double delta_max,
              std::int64_t max_cells);

  // Distance (ring / b) of the next ring to be yielded, if any.
  std::optional<double> peek_distance() const;

  std::optional<Shell> next();

  bool truncated() const { return truncated_; }

 private:
  const GridSpec spec_;
  const CellIndex origin_;
  int ring_ = 0;
  int max_ring_ = -1;
  std::int64_t budget_ = 0;
  bool truncated_ = false;
};

// In-bounds cells of one ring in lexicographic order, stopping after `limit`
// cells (sets *truncated when the limit cut the ring short).
std::vector<CellIndex> ring_cells(const GridSpec& spec, const CellIndex& origin,
                                  int ring, std::int64_t limit, bool* truncated);

// Eagerly materialized shells, for tests and small grids.
std::vector<Shell> shells(const GridSpec& spec, const CellIndex& origin, double delta_max);

// Slack used when comparing ring distances against delta_max, in units of
// rings (integers), so float dust in delta_max * b never drops a boundary ring.
inline constexpr double kRingBoundaryTol = 1e-9;

}  // namespace dpgrid
