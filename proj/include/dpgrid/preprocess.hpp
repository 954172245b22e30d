#pragma once

#include <cstdint>
#include <vector>

#include "dpgrid/types.hpp"

namespace dpgrid {

// A dataset in raw feature space. Rows are observations, columns features.
// labels is either empty (unlabeled) or one 0/1 flag per row (1 = outlier).
struct RawDataset {
  Matrix points;
  std::vector<std::uint8_t> labels;

  bool has_labels() const { return !labels.empty(); }
  Eigen::Index rows() const { return points.rows(); }
  Eigen::Index dims() const { return points.cols(); }
};

// Per-dimension scaling and centering fitted on the reference set.
//
// The transform pipeline is, per dimension j:
//   u = (x / alpha[j] + 1) / 2     max-abs scale, then [-1,1] -> [0,1]
//   u = clip(u, 0, 1)              only when clamping (test data)
//   coord = u - mean[j]            center by the post-scaling mean
// so transformed reference coordinates lie in [-mean[j], 1 - mean[j]],
// an interval of length exactly 1.
struct PreprocessParams {
  Vector alpha;  // max-abs scale per dimension, > 0
  Vector mean;   // mean of the scaled reference values, in [0, 1]

  Eigen::Index dims() const { return alpha.size(); }
};

// Throws ValidationError naming the first offending row/column if any entry
// is NaN or infinite. Row numbers are 1-based data rows.
void validate_finite(const Matrix& points);

// alpha[j] = max_i |x_ij| (1 for an all-zero column), mean[j] = mean of the
// scaled column. Throws ValidationError on empty or non-finite input.
PreprocessParams fit_preprocessor(const Matrix& reference);

Vector transform_point(const PreprocessParams& params, const Vector& raw, bool clamp);
Matrix transform_matrix(const PreprocessParams& params, const Matrix& raw, bool clamp);

// Inverse of transform_point for unclamped points.
Vector inverse_transform_point(const PreprocessParams& params, const Vector& unit);

}  // namespace dpgrid
