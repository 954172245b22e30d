#include "dpgrid/privacy.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace dpgrid {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
// Domain tag separating the keyed per-cell noise stream from sequential draws.
constexpr std::uint64_t kCellNoiseTag = 0xD96EB1A810CAAF5Full;

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += kGolden;
  return splitmix64_mix(state);
}

double uniform_from_bits(std::uint64_t bits) {
  // 53 high bits, offset half a step: strictly inside (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double laplace_from_uniform(double u, double scale) {
  const double v = u - 0.5;
  const double mag = -scale * std::log(1.0 - 2.0 * std::abs(v));
  return v < 0.0 ? -mag : mag;
}

LaplaceSampler::LaplaceSampler(double scale, std::uint64_t seed)
    : scale_(scale), state_(seed) {
  if (!(scale > 0.0)) throw ValidationError("Laplace scale must be positive");
}

double LaplaceSampler::sample() {
  return laplace_from_uniform(uniform_from_bits(splitmix64_next(state_)), scale_);
}

double cell_noise(std::uint64_t seed, const CellIndex& c, double scale) {
  std::uint64_t h = splitmix64_mix(seed ^ kCellNoiseTag);
  for (std::int32_t v : c) {
    h = splitmix64_mix(h + kGolden + static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
  }
  return laplace_from_uniform(uniform_from_bits(h), scale);
}

CountProvider::CountProvider(GridHistogram histogram, std::optional<double> epsilon,
                             std::uint64_t seed)
    : histogram_(std::move(histogram)), epsilon_(epsilon), seed_(seed) {
  if (epsilon_) {
    if (!(*epsilon_ > 0.0)) throw ValidationError("epsilon must be positive");
    scale_ = laplace_scale_for(*epsilon_);
  }
}

CountProvider CountProvider::exact(GridHistogram histogram) {
  return CountProvider(std::move(histogram), std::nullopt, 0);
}

CountProvider CountProvider::noisy(GridHistogram histogram, double epsilon, std::uint64_t seed) {
  return CountProvider(std::move(histogram), epsilon, seed);
}

double CountProvider::query(const CellIndex& c) const {
  const auto count = static_cast<double>(histogram_.count(c));
  if (!epsilon_) return count;
  return count + cell_noise(seed_, c, scale_);
}

std::int64_t max_count_sensitivity(const GridSpec& spec, const Matrix& positions, int n_points) {
  if (positions.rows() < 2) {
    throw ValidationError("need at least two candidate positions");
  }
  if (n_points < 1) throw ValidationError("n_points must be >= 1");

  const auto n_pos = static_cast<int>(positions.rows());
  std::vector<CellIndex> pos_cell(n_pos);
  for (int p = 0; p < n_pos; ++p) {
    pos_cell[p] = cell_of(spec, positions.row(p).transpose());
  }

  auto histogram_of = [&](const std::vector<int>& choice) {
    std::unordered_map<CellIndex, std::int64_t, CellIndexHash> counts;
    for (int p : choice) ++counts[pos_cell[p]];
    return counts;
  };

  std::int64_t max_change = 0;
  std::vector<int> choice(n_points, 0);
  while (true) {
    const auto base = histogram_of(choice);
    // Every replacement neighbor: one row swapped for another position.
    for (int i = 0; i < n_points; ++i) {
      for (int repl = 0; repl < n_pos; ++repl) {
        auto neighbor = base;
        --neighbor[pos_cell[choice[i]]];
        ++neighbor[pos_cell[repl]];
        for (const auto& [cell, count] : neighbor) {
          auto it = base.find(cell);
          const std::int64_t before = it == base.end() ? 0 : it->second;
          max_change = std::max(max_change, std::abs(count - before));
        }
        for (const auto& [cell, count] : base) {
          auto it = neighbor.find(cell);
          const std::int64_t after = it == neighbor.end() ? 0 : it->second;
          max_change = std::max(max_change, std::abs(count - after));
        }
      }
    }
    // Odometer over all datasets positions^n_points.
    int j = n_points - 1;
    while (j >= 0 && choice[j] == n_pos - 1) {
      choice[j] = 0;
      --j;
    }
    if (j < 0) break;
    ++choice[j];
  }
  return max_change;
}

}  // namespace dpgrid
