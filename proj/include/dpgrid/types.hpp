#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpgrid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Integer coordinates of a grid cell, one entry per dimension.
// Lexicographic order (std::vector's operator<) is the canonical tie-break
// order everywhere a deterministic cell order is needed.
using CellIndex = std::vector<std::int32_t>;

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const noexcept {
    // FNV-1a over the coordinate words.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::int32_t v : c) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Raised for malformed inputs (bad data, bad config, bad arguments).
// Everything else uses std::runtime_error.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dpgrid
