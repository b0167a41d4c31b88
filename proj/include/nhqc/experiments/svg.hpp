#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace nhqc::experiments {

struct ScatterSeries {
  std::string label;
  std::string color;
  double radius = 2.0;
  std::vector<std::pair<double, double>> points;
};

/// Fixed 800x600 scatter plot with axis ticks and a legend.
std::string scatter_svg(const std::vector<ScatterSeries>& series, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel);

struct LineInset {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool log_x = false;
};

/// Row-major rectangle heat map; values(r, c) is drawn at column c of row r.
/// Rows are spaced evenly and labelled with row_coords.
std::string heatmap_svg(const Eigen::MatrixXd& values, const std::vector<double>& row_coords,
                        double col_first, double col_last, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        const std::optional<LineInset>& inset = std::nullopt);

}  // namespace nhqc::experiments
