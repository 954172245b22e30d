#include "dpgrid/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpgrid {

void validate_finite(const Matrix& points) {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (!std::isfinite(points(i, j))) {
        throw ValidationError("non-finite value at row " + std::to_string(i + 1) +
                              ", column " + std::to_string(j + 1));
      }
    }
  }
}

PreprocessParams fit_preprocessor(const Matrix& reference) {
  if (reference.rows() < 1 || reference.cols() < 1) {
    throw ValidationError("reference set must have at least one row and one column");
  }
  validate_finite(reference);

  PreprocessParams params;
  params.alpha = reference.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < params.alpha.size(); ++j) {
    if (params.alpha[j] == 0.0) params.alpha[j] = 1.0;  // constant-zero column
  }
  // Mean of the scaled values u = (x / alpha + 1) / 2, taken per column.
  params.mean = Vector::Zero(reference.cols());
  for (Eigen::Index j = 0; j < reference.cols(); ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < reference.rows(); ++i) {
      sum += (reference(i, j) / params.alpha[j] + 1.0) / 2.0;
    }
    params.mean[j] = sum / static_cast<double>(reference.rows());
  }
  return params;
}

Vector transform_point(const PreprocessParams& params, const Vector& raw, bool clamp) {
  if (raw.size() != params.dims()) {
    throw ValidationError("point has dimension " + std::to_string(raw.size()) +
                          ", expected " + std::to_string(params.dims()));
  }
  Vector out(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j) {
    double u = (raw[j] / params.alpha[j] + 1.0) / 2.0;
    if (clamp) u = std::clamp(u, 0.0, 1.0);
    out[j] = u - params.mean[j];
  }
  return out;
}

Matrix transform_matrix(const PreprocessParams& params, const Matrix& raw, bool clamp) {
  if (raw.cols() != params.dims()) {
    throw ValidationError("matrix has dimension " + std::to_string(raw.cols()) +
                          ", expected " + std::to_string(params.dims()));
  }
  Matrix out(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    out.row(i) = transform_point(params, raw.row(i).transpose(), clamp).transpose();
  }
  return out;
}

Vector inverse_transform_point(const PreprocessParams& params, const Vector& unit) {
  if (unit.size() != params.dims()) {
    throw ValidationError("point has dimension " + std::to_string(unit.size()) +
                          ", expected " + std::to_string(params.dims()));
  }
  Vector out(unit.size());
  for (Eigen::Index j = 0; j < unit.size(); ++j) {
    double u = unit[j] + params.mean[j];
    out[j] = (2.0 * u - 1.0) * params.alpha[j];
  }
  return out;
}

}  // namespace dpgrid
