#include "dpgrid/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dpgrid/io.hpp"

namespace dpgrid {

namespace {

struct GroupKey {
  std::string dataset;
  Algorithm algorithm;
  int k;
  std::optional<int> b;
  std::optional<double> epsilon;

  bool operator==(const GroupKey&) const = default;
};

GroupKey key_of(const MetricsRecord& r) {
  return GroupKey{r.dataset, r.algorithm, r.k, r.b, r.epsilon};
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for a single observation.
double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double sum = 0.0;
  for (double x : v) sum += (x - m) * (x - m);
  return std::sqrt(sum / static_cast<double>(v.size() - 1));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_record_row(std::ostream& out, const MetricsRecord& r) {
  out << csv_escape(r.dataset) << ',' << to_string(r.algorithm) << ',' << r.k << ','
      << (r.b ? std::to_string(*r.b) : "") << ','
      << (r.epsilon ? format_double(*r.epsilon) : "") << ',' << r.seed << ','
      << format_double(r.auroc) << ',' << format_double(r.ap) << ','
      << format_double(r.p_at_n) << ',' << r.n_used << ','
      << format_double(r.cells_visited_mean) << ',';
  if (r.b) {
    out << "threshold=" << r.terminated_threshold << ";exhausted=" << r.terminated_exhausted
        << ";cap=" << r.terminated_cap;
  }
  out << '\n';
}

void write_summary_rows(std::ostream& out, const std::vector<const MetricsRecord*>& group) {
  const auto& first = *group.front();
  std::vector<double> aurocs, aps, ps, cells;
  std::int64_t threshold = 0, exhausted = 0, cap = 0;
  for (const MetricsRecord* r : group) {
    aurocs.push_back(r->auroc);
    aps.push_back(r->ap);
    ps.push_back(r->p_at_n);
    cells.push_back(r->cells_visited_mean);
    threshold += r->terminated_threshold;
    exhausted += r->terminated_exhausted;
    cap += r->terminated_cap;
  }
  auto prefix = [&](const char* tag) {
    out << csv_escape(first.dataset) << ',' << to_string(first.algorithm) << ',' << first.k
        << ',' << (first.b ? std::to_string(*first.b) : "") << ','
        << (first.epsilon ? format_double(*first.epsilon) : "") << ',' << tag << ',';
  };
  prefix("mean");
  out << format_double(mean_of(aurocs)) << ',' << format_double(mean_of(aps)) << ','
      << format_double(mean_of(ps)) << ',' << first.n_used << ','
      << format_double(mean_of(cells)) << ',';
  if (first.b) {
    out << "threshold=" << threshold << ";exhausted=" << exhausted << ";cap=" << cap;
  }
  out << '\n';
  prefix("std");
  out << format_double(std_of(aurocs)) << ',' << format_double(std_of(aps)) << ','
      << format_double(std_of(ps)) << ",," << format_double(std_of(cells)) << ",\n";
}

}  // namespace

void emit_results(const std::vector<MetricsRecord>& table, const std::string& path) {
  if (table.empty()) throw ValidationError("results table is empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "dataset,algorithm,k,b,epsilon,seed,auroc,ap,p_at_n,n_used,"
         "cells_visited_mean,terminated_by_counts\n";

  std::vector<const MetricsRecord*> group;
  auto flush_group = [&]() {
    if (group.size() > 1) write_summary_rows(out, group);
    group.clear();
  };
  for (const auto& r : table) {
    if (!group.empty() && !(key_of(*group.back()) == key_of(r))) flush_group();
    write_record_row(out, r);
    group.push_back(&r);
  }
  flush_group();
}

namespace {

double parse_field_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError("bad numeric field '" + s + "' in " + what);
  }
  return v;
}

std::int64_t parse_counts_entry(const std::string& field, const char* tag) {
  const auto pos = field.find(tag);
  if (pos == std::string::npos) return 0;
  const auto start = pos + std::string(tag).size();
  auto end = field.find(';', start);
  if (end == std::string::npos) end = field.size();
  return static_cast<std::int64_t>(std::stoll(field.substr(start, end - start)));
}

}  // namespace

std::vector<MetricsRecord> read_results(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.front().size() != 12 || rows.front()[0] != "dataset") {
    throw ValidationError("'" + path + "' is not a results CSV");
  }
  std::vector<MetricsRecord> records;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& c = rows[i];
    if (c.size() != 12) throw ValidationError("malformed results row " + std::to_string(i));
    if (c[5] == "mean" || c[5] == "std") continue;
    MetricsRecord r;
    r.dataset = c[0];
    r.algorithm = algorithm_from_string(c[1]);
    r.k = static_cast<int>(parse_field_double(c[2], "k"));
    if (!c[3].empty()) r.b = static_cast<int>(parse_field_double(c[3], "b"));
    if (!c[4].empty()) r.epsilon = parse_field_double(c[4], "epsilon");
    r.seed = static_cast<std::uint64_t>(parse_field_double(c[5], "seed"));
    r.auroc = parse_field_double(c[6], "auroc");
    r.ap = parse_field_double(c[7], "ap");
    r.p_at_n = parse_field_double(c[8], "p_at_n");
    r.n_used = static_cast<int>(parse_field_double(c[9], "n_used"));
    r.cells_visited_mean = c[10].empty() ? 0.0 : parse_field_double(c[10], "cells_visited_mean");
    r.terminated_threshold = parse_counts_entry(c[11], "threshold=");
    r.terminated_exhausted = parse_counts_entry(c[11], "exhausted=");
    r.terminated_cap = parse_counts_entry(c[11], "cap=");
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

struct Series {
  std::string label;
  // x -> per-seed metric values
  std::map<double, std::vector<double>> values;
};

const char* kMetricNames[] = {"auroc", "ap", "p_at_n"};

double metric_value(const MetricsRecord& r, int metric) {
  switch (metric) {
    case 0: return r.auroc;
    case 1: return r.ap;
    default: return r.p_at_n;
  }
}

std::string palette_color(std::size_t i) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#000000",
                                   "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  return kPalette[i % 8];
}

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<double>& xs, bool x_descending,
                     const std::vector<std::pair<std::string, std::map<double, std::pair<double, double>>>>& series) {
  const double width = 720, height = 480;
  const double ml = 70, mr = 200, mt = 40, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double y_min = 1e300, y_max = -1e300;
  for (const auto& [label, points] : series) {
    for (const auto& [x, ms] : points) {
      y_min = std::min(y_min, ms.first - ms.second);
      y_max = std::max(y_max, ms.first + ms.second);
    }
  }
  if (y_min > y_max) { y_min = 0; y_max = 1; }
  const double pad = std::max(0.02, (y_max - y_min) * 0.08);
  y_min -= pad;
  y_max += pad;

  std::vector<double> ordered_x = xs;
  std::sort(ordered_x.begin(), ordered_x.end());
  if (x_descending) std::reverse(ordered_x.begin(), ordered_x.end());

  auto x_pos = [&](double x) {
    const auto it = std::find(ordered_x.begin(), ordered_x.end(), x);
    const auto i = static_cast<double>(it - ordered_x.begin());
    const double n = std::max<double>(1.0, static_cast<double>(ordered_x.size()) - 1.0);
    return ml + (ordered_x.size() == 1 ? pw / 2 : pw * i / n);
  };
  auto y_pos = [&](double y) { return mt + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"" << ml << "\" y=\"22\" font-size=\"15\">" << title << "</text>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";
  for (double x : ordered_x) {
    svg << "<text x=\"" << x_pos(x) << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\">" << format_double(x) << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double y = y_min + (y_max - y_min) * t / 4.0;
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << y_pos(y) + 4
        << "\" text-anchor=\"end\">" << format_double(std::round(y * 1000) / 1000) << "</text>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << y_pos(y) << "\" x2=\"" << ml + pw << "\" y2=\""
        << y_pos(y) << "\" stroke=\"#dddddd\"/>\n";
  }
  std::size_t si = 0;
  for (const auto& [label, points] : series) {
    const std::string color = palette_color(si);
    std::ostringstream poly;
    for (double x : ordered_x) {
      const auto it = points.find(x);
      if (it == points.end()) continue;
      poly << x_pos(x) << ',' << y_pos(it->second.first) << ' ';
      if (it->second.second > 0) {
        svg << "<line x1=\"" << x_pos(x) << "\" y1=\"" << y_pos(it->second.first - it->second.second)
            << "\" x2=\"" << x_pos(x) << "\" y2=\"" << y_pos(it->second.first + it->second.second)
            << "\" stroke=\"" << color << "\"/>\n";
      }
      svg << "<circle cx=\"" << x_pos(x) << "\" cy=\"" << y_pos(it->second.first)
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    svg << "<polyline points=\"" << poly.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    const double ly = mt + 16 * static_cast<double>(si);
    svg << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw + 34
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ml + pw + 40 << "\" y=\"" << ly + 4 << "\">" << label << "</text>\n";
    ++si;
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << svg.str();
}

}  // namespace

std::vector<std::string> emit_plot_data(const std::vector<MetricsRecord>& table, PlotAxis axis,
                                        const std::string& out_dir, bool with_svg) {
  if (table.empty()) throw ValidationError("results table is empty");
  const bool by_eps = axis == PlotAxis::kEpsilon;
  bool axis_present = false;
  for (const auto& r : table) {
    axis_present |= by_eps ? r.epsilon.has_value() : r.b.has_value();
  }
  if (!axis_present) {
    throw ValidationError(std::string("results carry no ") + (by_eps ? "epsilon" : "b") +
                          " values; cannot plot along that axis");
  }

  std::filesystem::create_directories(out_dir);

  std::map<std::string, std::vector<const MetricsRecord*>> by_dataset;
  for (const auto& r : table) by_dataset[r.dataset].push_back(&r);

  std::vector<std::string> written;
  for (const auto& [dataset, records] : by_dataset) {
    // Fold swept parameters other than the axis into the series labels.
    std::set<int> ks;
    std::set<int> bs;
    std::set<double> epss;
    std::set<double> x_values;
    for (const auto* r : records) {
      ks.insert(r->k);
      if (r->b) bs.insert(*r->b);
      if (r->epsilon) epss.insert(*r->epsilon);
      if (by_eps && r->epsilon) x_values.insert(*r->epsilon);
      if (!by_eps && r->b) x_values.insert(*r->b);
    }
    if (x_values.empty()) continue;

    auto series_label = [&](const MetricsRecord& r) {
      std::string label = to_string(r.algorithm);
      if (ks.size() > 1) label += "@k=" + std::to_string(r.k);
      if (!by_eps && r.epsilon && epss.size() > 1) label += "@eps=" + format_double(*r.epsilon);
      if (by_eps && r.b && bs.size() > 1) label += "@b=" + std::to_string(*r.b);
      return label;
    };

    for (int metric = 0; metric < 3; ++metric) {
      std::map<std::string, std::map<double, std::vector<double>>> series;
      for (const auto* r : records) {
        const std::string label = series_label(*r);
        if (by_eps) {
          if (r->epsilon) {
            series[label][*r->epsilon].push_back(metric_value(*r, metric));
          } else {
            // Epsilon-free algorithms appear as flat lines across the axis.
            for (double x : x_values) series[label][x].push_back(metric_value(*r, metric));
          }
        } else {
          if (r->b) {
            series[label][*r->b].push_back(metric_value(*r, metric));
          } else {
            for (double x : x_values) series[label][x].push_back(metric_value(*r, metric));
          }
        }
      }

      std::vector<double> xs(x_values.begin(), x_values.end());
      if (by_eps) std::reverse(xs.begin(), xs.end());

      const std::string base = dataset + "_" + kMetricNames[metric] + "_by_" +
                               (by_eps ? "epsilon" : "b");
      const std::string csv_path = (std::filesystem::path(out_dir) / (base + ".csv")).string();
      std::ofstream out(csv_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write '" + csv_path + "'");
      out << "x,algorithm,mean,std\n";
      std::vector<std::pair<std::string, std::map<double, std::pair<double, double>>>> chart;
      for (const auto& [label, points] : series) {
        chart.emplace_back(label, std::map<double, std::pair<double, double>>{});
      }
      for (double x : xs) {
        std::size_t si = 0;
        for (const auto& [label, points] : series) {
          const auto it = points.find(x);
          if (it != points.end()) {
            const double m = mean_of(it->second);
            const double sd = std_of(it->second);
            out << format_double(x) << ',' << csv_escape(label) << ',' << format_double(m)
                << ',' << format_double(sd) << '\n';
            chart[si].second[x] = {m, sd};
          }
          ++si;
        }
      }
      out.close();
      written.push_back(csv_path);

      if (with_svg) {
        const std::string svg_path = (std::filesystem::path(out_dir) / (base + ".svg")).string();
        write_svg_chart(svg_path, dataset + ": " + kMetricNames[metric] + " by " +
                        (by_eps ? "epsilon" : "b"), std::vector<double>(x_values.begin(), x_values.end()),
                        by_eps, chart);
        written.push_back(svg_path);
      }
    }
  }
  return written;
}

}  // namespace dpgrid
