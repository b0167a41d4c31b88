#include "nhqc/experiments/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nhqc::experiments {

namespace {

constexpr int kWidth = 800, kHeight = 600;
constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 60;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
  return ticks;
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(std::abs(lo) * 0.1, 1e-3);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string header(const std::string& title) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">"
    << escape(title) << "</text>\n";
  return o.str();
}

// Viridis-like ramp on [0, 1].
std::string color_ramp(double v) {
  static constexpr std::array<std::array<double, 3>, 5> stops = {
      {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  v = std::clamp(v, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(v), stops.size() - 2);
  const double f = v - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k)
    rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

std::string scatter_svg(const std::vector<ScatterSeries>& series, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  if (!std::isfinite(xlo)) xlo = -1, xhi = 1, ylo = -1, yhi = 1;
  std::tie(xlo, xhi) = padded_range(xlo, xhi);
  std::tie(ylo, yhi) = padded_range(ylo, yhi);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return kTop + (yhi - y) / (yhi - ylo) * ph; };

  std::ostringstream o;
  o << header(title);
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : nice_ticks(xlo, xhi)) {
    o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << num(px(t))
      << "\" y2=\"" << kTop + ph + 5 << "\" stroke=\"black\"/>"
      << "<text x=\"" << num(px(t)) << "\" y=\"" << kTop + ph + 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(t)
      << "</text>\n";
  }
  for (double t : nice_ticks(ylo, yhi)) {
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(py(t)) << "\" x2=\"" << kLeft
      << "\" y2=\"" << num(py(t)) << "\" stroke=\"black\"/>"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(py(t) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(t)
      << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape(xlabel)
    << "</text>\n";
  o << "<text x=\"20\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << kTop + ph / 2 << ")\" font-family=\"sans-serif\" font-size=\"14\">" << escape(ylabel)
    << "</text>\n";

  for (const auto& s : series) {
    o << "<g fill=\"" << s.color << "\">\n";
    for (const auto& [x, y] : s.points)
      o << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"" << s.radius
        << "\"/>\n";
    o << "</g>\n";
  }
  double ly = kTop + 15;
  for (const auto& s : series) {
    o << "<circle cx=\"" << kLeft + pw - 150 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << s.color
      << "\"/><text x=\"" << kLeft + pw - 140 << "\" y=\"" << ly + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.label) << "</text>\n";
    ly += 18;
  }
  o << "</svg>\n";
  return o.str();
}

std::string heatmap_svg(const Eigen::MatrixXd& values, const std::vector<double>& row_coords,
                        double col_first, double col_last, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        const std::optional<LineInset>& inset) {
  const Eigen::Index rows = values.rows(), cols = values.cols();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double vmax = rows > 0 && cols > 0 ? values.maxCoeff() : 1.0;
  const double vmin = rows > 0 && cols > 0 ? values.minCoeff() : 0.0;
  const double span = vmax > vmin ? vmax - vmin : 1.0;

  std::ostringstream o;
  o << header(title);
  if (rows > 0 && cols > 0) {
    const double cw = pw / cols, rh = ph / rows;
    for (Eigen::Index r = 0; r < rows; ++r) {
      // time runs upwards
      const double y = kTop + ph - (r + 1) * rh;
      for (Eigen::Index c = 0; c < cols; ++c)
        o << "<rect x=\"" << num(kLeft + c * cw) << "\" y=\"" << num(y) << "\" width=\""
          << num(cw + 0.3) << "\" height=\"" << num(rh + 0.3) << "\" fill=\""
          << color_ramp((values(r, c) - vmin) / span) << "\"/>\n";
    }
    for (double t : nice_ticks(col_first, col_last)) {
      const double x = kLeft + (t - col_first) / std::max(col_last - col_first, 1e-12) * pw;
      o << "<text x=\"" << num(x) << "\" y=\"" << kTop + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(t) << "</text>\n";
    }
    const int nlabels = static_cast<int>(std::min<Eigen::Index>(rows, 6));
    for (int k = 0; k < nlabels; ++k) {
      const Eigen::Index r = nlabels == 1 ? 0 : k * (rows - 1) / (nlabels - 1);
      const double y = kTop + ph - (r + 0.5) * rh;
      const double coord = r < static_cast<Eigen::Index>(row_coords.size()) ? row_coords[r] : r;
      o << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(coord) << "</text>\n";
    }
  }
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape(xlabel)
    << "</text>\n";
  o << "<text x=\"20\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << kTop + ph / 2 << ")\" font-family=\"sans-serif\" font-size=\"14\">" << escape(ylabel)
    << "</text>\n";

  if (inset && inset->x.size() >= 2) {
    const double ix = kLeft + pw - 230, iy = kTop + 10, iw = 220, ih = 140;
    auto tx = [&](double x) { return inset->log_x ? std::log10(std::max(x, 1e-12)) : x; };
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = 0, yhi = -xlo;
    for (std::size_t k = 0; k < inset->x.size(); ++k) {
      if (inset->log_x && !(inset->x[k] > 0)) continue;
      xlo = std::min(xlo, tx(inset->x[k]));
      xhi = std::max(xhi, tx(inset->x[k]));
      yhi = std::max(yhi, inset->y[k]);
    }
    if (!(xhi > xlo)) xhi = xlo + 1;
    if (!(yhi > ylo)) yhi = ylo + 1;
    o << "<rect x=\"" << ix << "\" y=\"" << iy << "\" width=\"" << iw << "\" height=\"" << ih
      << "\" fill=\"white\" fill-opacity=\"0.9\" stroke=\"black\"/>\n<polyline fill=\"none\" "
         "stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < inset->x.size(); ++k) {
      if (inset->log_x && !(inset->x[k] > 0)) continue;
      o << num(ix + (tx(inset->x[k]) - xlo) / (xhi - xlo) * iw) << ","
        << num(iy + ih - (inset->y[k] - ylo) / (yhi - ylo) * ih) << " ";
    }
    o << "\"/>\n<text x=\"" << ix + 6 << "\" y=\"" << iy + 14
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(inset->label) << " (max "
      << tick_label(yhi) << ")</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace nhqc::experiments
