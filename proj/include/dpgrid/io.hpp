#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpgrid/grid.hpp"
#include "dpgrid/preprocess.hpp"
#include "dpgrid/types.hpp"

namespace dpgrid {

// Description of one dataset: where its CSV lives, how to read labels, and
// the expected statistics used to confirm the file matches the benchmark
// the manifest was written for.
struct DatasetManifest {
  std::string name;
  std::string csv_path;  // relative paths resolve against the manifest file
  std::vector<std::string> feature_columns;
  std::optional<std::string> label_column;
  std::string outlier_value;  // label cell text marking an outlier row
  int m_outliers = 0;
  std::optional<int> expected_rows;
  std::optional<int> expected_outlier_rows;
};

DatasetManifest load_manifest(const std::string& path);

// Minimal RFC-4180 CSV: quoted fields, doubled quotes, CR/LF line ends.
// Returns rows of cells; the first row is the header.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

// Parses the manifest's feature columns as reals and maps the label column
// to 0/1 via the manifest's outlier value. Errors name the offending data
// row (1-based) and column. Validates expected row statistics when present.
RawDataset load_dataset(const DatasetManifest& manifest);

// Fitted scorer state persisted by `fit` and consumed by `score`: the
// preprocessing parameters, the grid histogram of the reference set, and the
// noise configuration (so a reloaded model answers with the identical
// noise field).
struct Model {
  std::string dataset;
  std::vector<std::string> feature_columns;
  PreprocessParams params;
  GridHistogram histogram;
  std::optional<double> epsilon;  // empty: exact counts
  std::uint64_t noise_seed = 0;
};

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

// Shortest round-trip decimal form of a double (deterministic output files).
std::string format_double(double v);

}  // namespace dpgrid
