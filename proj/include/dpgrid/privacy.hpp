#pragma once

#include <cstdint>
#include <optional>

#include "dpgrid/grid.hpp"
#include "dpgrid/types.hpp"

namespace dpgrid {

// SplitMix64 step and finalizer (Steele, Lea, Flood 2014). Used for every
// random draw in the project so results are bit-reproducible across
// platforms; the standard library's distributions are not.
std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t splitmix64_mix(std::uint64_t z);

// Uniform in the open interval (0, 1): ((bits >> 11) + 0.5) * 2^-53.
double uniform_from_bits(std::uint64_t bits);

// Inverse-CDF Laplace(0, scale) from a uniform u in (0, 1):
//   v = u - 1/2,  x = -scale * sgn(v) * ln(1 - 2|v|).
double laplace_from_uniform(double u, double scale);

inline double laplace_scale_for(double epsilon) { return 1.0 / epsilon; }

// Sequential Laplace(0, scale) stream.
class LaplaceSampler {
 public:
  LaplaceSampler(double scale, std::uint64_t seed);

  double sample();
  double scale() const { return scale_; }

 private:
  double scale_;
  std::uint64_t state_;
};

// The per-cell noise field: a pure function of (seed, cell, scale), so the
// whole b^d field is fixed once the seed is, without materializing it, and
// every query of the same cell sees the identical realization.
double cell_noise(std::uint64_t seed, const CellIndex& c, double scale);

// Answers per-cell count queries against a histogram, either exactly or with
// memoized Laplace noise of scale 1/epsilon (count sensitivity is 1). Noisy
// counts may be negative and are never clipped. query() is const and pure,
// hence safe under concurrent calls.
class CountProvider {
 public:
  static CountProvider exact(GridHistogram histogram);
  static CountProvider noisy(GridHistogram histogram, double epsilon, std::uint64_t seed);

  double query(const CellIndex& c) const;

  bool is_noisy() const { return epsilon_.has_value(); }
  std::optional<double> epsilon() const { return epsilon_; }
  std::uint64_t seed() const { return seed_; }
  const GridHistogram& histogram() const { return histogram_; }
  const GridSpec& spec() const { return histogram_.spec; }

 private:
  CountProvider(GridHistogram histogram, std::optional<double> epsilon, std::uint64_t seed);

  GridHistogram histogram_;
  std::optional<double> epsilon_;
  std::uint64_t seed_ = 0;
  double scale_ = 0.0;
};

// Brute-force check of the count query's global sensitivity: enumerates every
// dataset of n_points rows drawn from `positions` (one candidate point per
// row), every single-point replacement, and returns the largest per-cell
// count change observed. Replacement neighbors: same size, one row swapped.
std::int64_t max_count_sensitivity(const GridSpec& spec, const Matrix& positions, int n_points);

}  // namespace dpgrid
