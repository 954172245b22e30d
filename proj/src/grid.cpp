#include "dpgrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>

namespace dpgrid {

GridSpec make_grid(const PreprocessParams& params, int b) {
  if (b < 1) throw ValidationError("grid parameter b must be >= 1, got " + std::to_string(b));
  GridSpec spec;
  spec.b = b;
  spec.lo = -params.mean;
  return spec;
}

bool in_bounds(const GridSpec& spec, const CellIndex& c) {
  if (static_cast<Eigen::Index>(c.size()) != spec.dims()) return false;
  for (std::int32_t v : c) {
    if (v < 0 || v >= spec.b) return false;
  }
  return true;
}

CellIndex cell_of(const GridSpec& spec, const Vector& p) {
  const Eigen::Index d = spec.dims();
  if (p.size() != d) {
    throw ValidationError("point has dimension " + std::to_string(p.size()) +
                          ", expected " + std::to_string(d));
  }
  CellIndex idx(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    auto raw = static_cast<std::int64_t>(std::floor((p[j] - spec.lo[j]) * spec.b));
    raw = std::clamp<std::int64_t>(raw, 0, spec.b - 1);
    idx[j] = static_cast<std::int32_t>(raw);
  }
  return idx;
}

Vector centroid(const GridSpec& spec, const CellIndex& c) {
  if (!in_bounds(spec, c)) throw ValidationError("cell index out of bounds");
  Vector out(spec.dims());
  for (Eigen::Index j = 0; j < spec.dims(); ++j) {
    out[j] = spec.lo[j] + (c[j] + 0.5) / spec.b;
  }
  return out;
}

double l1_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ValidationError("dimension mismatch in l1_distance");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    sum += std::abs(a[j] - b[j]);
  }
  return sum;
}

std::int64_t cell_l1_offset(const CellIndex& a, const CellIndex& b) {
  if (a.size() != b.size()) throw ValidationError("dimension mismatch in cell_l1_offset");
  std::int64_t sum = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    sum += std::abs(static_cast<std::int64_t>(a[j]) - b[j]);
  }
  return sum;
}

GridHistogram build_histogram(const GridSpec& spec, const Matrix& points) {
  GridHistogram hist;
  hist.spec = spec;
  hist.total = points.rows();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    ++hist.counts[cell_of(spec, points.row(i).transpose())];
  }
  return hist;
}

std::vector<CellIndex> ring_cells(const GridSpec& spec, const CellIndex& origin,
                                  int ring, std::int64_t limit, bool* truncated) {
  const int d = static_cast<int>(spec.dims());
  if (truncated) *truncated = false;
  std::vector<CellIndex> out;
  if (limit <= 0) {
    // Report whether the ring holds any cell at all.
    if (truncated) {
      std::int64_t one = 1;
      bool dummy = false;
      *truncated = !ring_cells(spec, origin, ring, one, &dummy).empty();
    }
    return out;
  }

  // suffix_cap[j] = largest offset budget dimensions j.. can absorb in bounds.
  std::vector<std::int64_t> suffix_cap(d + 1, 0);
  for (int j = d - 1; j >= 0; --j) {
    suffix_cap[j] = suffix_cap[j + 1] +
                    std::max<std::int64_t>(origin[j], spec.b - 1 - origin[j]);
  }
  if (ring > suffix_cap[0]) return out;

  CellIndex cur(d);
  bool full = false;
  auto emit = [&]() {
    if (static_cast<std::int64_t>(out.size()) >= limit) {
      full = true;
      if (truncated) *truncated = true;
      return;
    }
    out.push_back(cur);
  };
  // Offsets are enumerated most negative first per dimension, so the cells
  // come out in ascending lexicographic order of their index vectors.
  std::function<void(int, int)> descend = [&](int j, int remaining) {
    if (full) return;
    if (j == d - 1) {
      if (remaining == 0) {
        cur[j] = origin[j];
        emit();
      } else {
        if (origin[j] - remaining >= 0) {
          cur[j] = origin[j] - remaining;
          emit();
        }
        if (!full && origin[j] + remaining <= spec.b - 1) {
          cur[j] = origin[j] + remaining;
          emit();
        }
      }
      return;
    }
    const int lo_off = -static_cast<int>(std::min<std::int64_t>(remaining, origin[j]));
    const int hi_off = static_cast<int>(std::min<std::int64_t>(remaining, spec.b - 1 - origin[j]));
    for (int off = lo_off; off <= hi_off && !full; ++off) {
      if (remaining - std::abs(off) > suffix_cap[j + 1]) continue;
      cur[j] = origin[j] + off;
      descend(j + 1, remaining - std::abs(off));
    }
  };
  descend(0, ring);
  return out;
}

ShellCursor::ShellCursor(const GridSpec& spec, CellIndex origin, double delta_max,
                         std::int64_t max_cells)
    : spec_(spec), origin_(std::move(origin)), budget_(max_cells) {
  if (!in_bounds(spec_, origin_)) throw ValidationError("shell origin out of bounds");
  if (delta_max < 0.0) throw ValidationError("delta_max must be >= 0");
  std::int64_t reachable = 0;
  for (Eigen::Index j = 0; j < spec_.dims(); ++j) {
    reachable += std::max<std::int64_t>(origin_[j], spec_.b - 1 - origin_[j]);
  }
  const double limit = delta_max * spec_.b + kRingBoundaryTol;
  max_ring_ = static_cast<int>(std::min<double>(std::floor(limit), static_cast<double>(reachable)));
}

std::optional<double> ShellCursor::peek_distance() const {
  if (ring_ > max_ring_) return std::nullopt;
  return static_cast<double>(ring_) / spec_.b;
}

std::optional<Shell> ShellCursor::next() {
  while (ring_ <= max_ring_) {
    if (budget_ <= 0) {
      // Out of budget; mark truncation if any candidate cell remains.
      for (int r = ring_; r <= max_ring_ && !truncated_; ++r) {
        bool any = false;
        ring_cells(spec_, origin_, r, 0, &any);
        truncated_ = any;
      }
      ring_ = max_ring_ + 1;
      return std::nullopt;
    }
    bool trunc = false;
    Shell shell;
    shell.ring = ring_;
    shell.distance = static_cast<double>(ring_) / spec_.b;
    shell.cells = ring_cells(spec_, origin_, ring_, budget_, &trunc);
    ++ring_;
    budget_ -= static_cast<std::int64_t>(shell.cells.size());
    if (trunc) {
      truncated_ = true;
      ring_ = max_ring_ + 1;
    }
    if (shell.cells.empty() && !trunc) continue;
    return shell;
  }
  return std::nullopt;
}

std::vector<Shell> shells(const GridSpec& spec, const CellIndex& origin, double delta_max) {
  ShellCursor cursor(spec, origin, delta_max, std::numeric_limits<std::int64_t>::max() / 2);
  std::vector<Shell> out;
  while (auto shell = cursor.next()) {
    out.push_back(std::move(*shell));
  }
  return out;
}

}  // namespace dpgrid
