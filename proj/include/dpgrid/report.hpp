#pragma once

#include <string>
#include <vector>

#include "dpgrid/evaluation.hpp"

namespace dpgrid {

// Results CSV, schema:
//   dataset,algorithm,k,b,epsilon,seed,auroc,ap,p_at_n,n_used,
//   cells_visited_mean,terminated_by_counts
// One row per record; configurations with several seeds get two extra
// summary rows with seed = "mean" / "std" (sample standard deviation).
void emit_results(const std::vector<MetricsRecord>& table, const std::string& path);

// Reads back a results CSV written by emit_results (summary rows skipped).
std::vector<MetricsRecord> read_results(const std::string& path);

enum class PlotAxis { kB, kEpsilon };

// One long-format CSV per (dataset, metric) with columns x,algorithm,mean,std.
// x runs ascending for b and descending for epsilon. Parameters other than
// the axis that vary across records are folded into the series name
// (e.g. dp_grid_knn@b=2). Non-private series repeat their value across an
// epsilon axis. Returns the paths written. with_svg adds a line chart with
// error bars next to each CSV.
std::vector<std::string> emit_plot_data(const std::vector<MetricsRecord>& table,
                                        PlotAxis axis, const std::string& out_dir,
                                        bool with_svg = false);

}  // namespace dpgrid
