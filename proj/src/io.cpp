#include "dpgrid/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>

#include <json.hpp>

namespace dpgrid {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_double(const std::string& text, Eigen::Index row, const std::string& column) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  // Tolerate surrounding spaces, as in hand-edited CSVs.
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || begin == end) {
    throw ValidationError("unparseable number '" + text + "' at row " + std::to_string(row) +
                          ", column '" + column + "'");
  }
  return value;
}

}  // namespace

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool row_has_content = false;

  std::size_t i = 0;
  auto end_cell = [&]() {
    row.push_back(std::move(cell));
    cell.clear();
  };
  auto end_row = [&]() {
    end_cell();
    rows.push_back(std::move(row));
    row.clear();
    row_has_content = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
      row_has_content = true;
    } else if (c == ',') {
      end_cell();
      row_has_content = true;
    } else if (c == '\r') {
      // swallowed; newline handling below
    } else if (c == '\n') {
      if (row_has_content || !cell.empty() || !row.empty()) end_row();
    } else {
      cell += c;
      row_has_content = true;
    }
    ++i;
  }
  if (quoted) throw ValidationError("unterminated quote in '" + path + "'");
  if (row_has_content || !cell.empty() || !row.empty()) end_row();
  if (rows.empty()) throw ValidationError("empty CSV file '" + path + "'");
  return rows;
}

DatasetManifest load_manifest(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  DatasetManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.csv_path = j.at("csv").get<std::string>();
    m.feature_columns = j.at("features").get<std::vector<std::string>>();
    if (j.contains("label_column")) m.label_column = j["label_column"].get<std::string>();
    if (j.contains("outlier_value")) m.outlier_value = j["outlier_value"].get<std::string>();
    m.m_outliers = j.value("m_outliers", 0);
    if (j.contains("expected_rows")) m.expected_rows = j["expected_rows"].get<int>();
    if (j.contains("expected_outlier_rows")) {
      m.expected_outlier_rows = j["expected_outlier_rows"].get<int>();
    }
  } catch (const json::exception& e) {
    throw ValidationError("manifest '" + path + "': " + e.what());
  }
  if (m.feature_columns.empty()) {
    throw ValidationError("manifest '" + path + "' lists no feature columns");
  }
  if (m.label_column && m.outlier_value.empty()) {
    throw ValidationError("manifest '" + path + "' has a label column but no outlier value");
  }
  // Relative CSV paths are taken relative to the manifest's directory.
  std::filesystem::path csv(m.csv_path);
  if (csv.is_relative()) {
    m.csv_path = (std::filesystem::path(path).parent_path() / csv).string();
  }
  return m;
}

RawDataset load_dataset(const DatasetManifest& manifest) {
  const auto rows = read_csv(manifest.csv_path);
  const auto& header = rows.front();

  auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ValidationError("column '" + name + "' missing from '" + manifest.csv_path + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  std::vector<std::size_t> feature_idx;
  feature_idx.reserve(manifest.feature_columns.size());
  for (const auto& name : manifest.feature_columns) feature_idx.push_back(column_of(name));
  std::optional<std::size_t> label_idx;
  if (manifest.label_column) label_idx = column_of(*manifest.label_column);

  const auto n = static_cast<Eigen::Index>(rows.size() - 1);
  if (n < 1) throw ValidationError("'" + manifest.csv_path + "' has no data rows");

  RawDataset data;
  data.points.resize(n, static_cast<Eigen::Index>(feature_idx.size()));
  if (label_idx) data.labels.resize(static_cast<std::size_t>(n));

  int outlier_rows = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& cells = rows[static_cast<std::size_t>(r) + 1];
    if (cells.size() != header.size()) {
      throw ValidationError("row " + std::to_string(r + 1) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
    }
    for (std::size_t f = 0; f < feature_idx.size(); ++f) {
      data.points(r, static_cast<Eigen::Index>(f)) =
          parse_double(cells[feature_idx[f]], r + 1, manifest.feature_columns[f]);
    }
    if (label_idx) {
      const bool outlier = cells[*label_idx] == manifest.outlier_value;
      data.labels[static_cast<std::size_t>(r)] = outlier ? 1 : 0;
      outlier_rows += outlier ? 1 : 0;
    }
  }
  validate_finite(data.points);

  if (manifest.expected_rows && *manifest.expected_rows != static_cast<int>(n)) {
    throw ValidationError("'" + manifest.csv_path + "' has " + std::to_string(n) +
                          " data rows, manifest expects " + std::to_string(*manifest.expected_rows));
  }
  if (manifest.expected_outlier_rows && *manifest.expected_outlier_rows != outlier_rows) {
    throw ValidationError("'" + manifest.csv_path + "' has " + std::to_string(outlier_rows) +
                          " outlier-labeled rows, manifest expects " +
                          std::to_string(*manifest.expected_outlier_rows));
  }
  if (manifest.label_column && manifest.m_outliers > outlier_rows) {
    throw ValidationError("manifest m_outliers=" + std::to_string(manifest.m_outliers) +
                          " exceeds the " + std::to_string(outlier_rows) +
                          " outlier-labeled rows");
  }
  return data;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void save_model(const Model& model, const std::string& path) {
  json cells = json::array();
  // Canonical cell order for byte-stable files.
  std::vector<const CellIndex*> keys;
  keys.reserve(model.histogram.counts.size());
  for (const auto& [cell, count] : model.histogram.counts) keys.push_back(&cell);
  std::sort(keys.begin(), keys.end(),
            [](const CellIndex* a, const CellIndex* b) { return *a < *b; });
  for (const CellIndex* cell : keys) {
    cells.push_back(json{{"idx", *cell}, {"count", model.histogram.counts.at(*cell)}});
  }

  json j{{"dataset", model.dataset},
         {"features", model.feature_columns},
         {"alpha", std::vector<double>(model.params.alpha.begin(), model.params.alpha.end())},
         {"mean", std::vector<double>(model.params.mean.begin(), model.params.mean.end())},
         {"b", model.histogram.spec.b},
         {"total", model.histogram.total},
         {"cells", std::move(cells)},
         {"noise_seed", model.noise_seed}};
  if (model.epsilon) j["epsilon"] = *model.epsilon;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

Model load_model(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("model '" + path + "' is not valid JSON: " + e.what());
  }
  Model m;
  try {
    m.dataset = j.value("dataset", std::string{});
    m.feature_columns = j.at("features").get<std::vector<std::string>>();
    const auto alpha = j.at("alpha").get<std::vector<double>>();
    const auto mean = j.at("mean").get<std::vector<double>>();
    if (alpha.size() != mean.size() || alpha.empty()) {
      throw ValidationError("model '" + path + "' has inconsistent parameter vectors");
    }
    m.params.alpha = Eigen::Map<const Vector>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
    m.params.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    m.histogram.spec = make_grid(m.params, j.at("b").get<int>());
    m.histogram.total = j.at("total").get<std::int64_t>();
    for (const auto& entry : j.at("cells")) {
      m.histogram.counts[entry.at("idx").get<CellIndex>()] = entry.at("count").get<std::int64_t>();
    }
    if (j.contains("epsilon")) m.epsilon = j["epsilon"].get<double>();
    m.noise_seed = j.value("noise_seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ValidationError("model '" + path + "': " + e.what());
  }
  return m;
}

}  // namespace dpgrid
