// Copyright 2026 The sparseforest Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sparseforest/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sparseforest/errors.hpp"
#include "sparseforest/stats.hpp"

namespace sparseforest::plot {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Axis {
  double lo, hi;
  double a, b;  // pixel range
  double map(double v) const { return hi == lo ? 0.5 * (a + b) : a + (v - lo) / (hi - lo) * (b - a); }
};

// Pads a degenerate or tight range a little so marks are not drawn on the frame.
std::pair<double, double> padded(double lo, double hi) {
  if (!(lo < hi)) {
    const double w = std::max(std::abs(lo) * 0.1, 1e-3);
    return {lo - w, hi + w};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

class Svg {
 public:
  explicit Svg(const std::string& title) {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kWidth / 2, 22, title, "middle", 14);
  }
  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double width = 1) {
    os_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
        << "\" y2=\"" << num(y2) << "\" stroke=\"" << color << "\" stroke-width=\"" << width
        << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill) {
    os_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
        << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\" stroke=\"black\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& color) {
    os_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << r
        << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    os_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) os_ << num(x) << ',' << num(y) << ' ';
    os_ << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, const char* anchor = "middle",
            int size = 12, bool vertical = false) {
    os_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor
        << "\" font-size=\"" << size << "\"";
    if (vertical) os_ << " transform=\"rotate(-90 " << num(x) << ' ' << num(y) << ")\"";
    os_ << ">" << escape(s) << "</text>\n";
  }
  void frame(const Axis& y, const std::string& x_label, const std::string& y_label) {
    line(kLeft, kTop, kLeft, kHeight - kBottom, "black");
    line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "black");
    for (int t = 0; t <= 4; ++t) {
      const double v = y.lo + (y.hi - y.lo) * t / 4.0;
      const double py = y.map(v);
      line(kLeft - 4, py, kLeft, py, "black");
      text(kLeft - 6, py + 4, num(v), "end", 10);
    }
    text(kWidth / 2, kHeight - 15, x_label);
    text(18, kHeight / 2, y_label, "middle", 12, true);
  }
  void save(const std::filesystem::path& path) {
    os_ << "</svg>\n";
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << os_.str();
  }

 private:
  std::ostringstream os_;
};

}  // namespace

void boxplot_svg(const std::string& title, const std::string& y_label,
                 const std::vector<Box>& boxes, const std::filesystem::path& path) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& b : boxes)
    for (double v : b.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  const auto [ylo, yhi] = padded(lo, hi);
  const Axis y{ylo, yhi, kHeight - kBottom, kTop};
  Svg svg(title);
  svg.frame(y, "coordinate", y_label);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(boxes.size(), 1));
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = 0.3 * slot;
    svg.text(cx, kHeight - kBottom + 16, boxes[i].label, "middle", 10);
    if (boxes[i].values.empty()) continue;
    const auto q = quartiles(boxes[i].values);
    const double iqr = q.q3 - q.q1;
    double wlo = q.q3, whi = q.q1;
    for (double v : boxes[i].values) {
      if (v >= q.q1 - 1.5 * iqr) wlo = std::min(wlo, v);
      if (v <= q.q3 + 1.5 * iqr) whi = std::max(whi, v);
    }
    svg.line(cx, y.map(wlo), cx, y.map(q.q1), "black");
    svg.line(cx, y.map(q.q3), cx, y.map(whi), "black");
    svg.line(cx - half / 2, y.map(wlo), cx + half / 2, y.map(wlo), "black");
    svg.line(cx - half / 2, y.map(whi), cx + half / 2, y.map(whi), "black");
    svg.rect(cx - half, y.map(q.q3), 2 * half, std::max(y.map(q.q1) - y.map(q.q3), 0.5), "#c6dbef");
    svg.line(cx - half, y.map(q.median), cx + half, y.map(q.median), "black", 2);
    for (double v : boxes[i].values)
      if (v < wlo || v > whi) svg.circle(cx, y.map(v), 2.5, "black");
  }
  svg.save(path);
}

void line_chart_svg(const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series, bool log_x,
                    const std::filesystem::path& path) {
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || (!s.err.empty() && s.err.size() != s.y.size()))
      throw DataError("series " + s.name + " has mismatched lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_x && !(s.x[i] > 0.0)) throw DataError("log axis needs positive x");
      const double e = s.err.empty() ? 0.0 : s.err[i];
      xlo = std::min(xlo, tx(s.x[i]));
      xhi = std::max(xhi, tx(s.x[i]));
      ylo = std::min(ylo, s.y[i] - e);
      yhi = std::max(yhi, s.y[i] + e);
    }
  }
  if (!std::isfinite(xlo)) xlo = xhi = ylo = yhi = 0.0;
  const auto [px0, px1] = padded(xlo, xhi);
  const auto [py0, py1] = padded(ylo, yhi);
  const Axis x{px0, px1, kLeft, kWidth - kRight};
  const Axis y{py0, py1, kHeight - kBottom, kTop};
  Svg svg(title);
  svg.frame(y, log_x ? x_label + " (log scale)" : x_label, y_label);
  std::vector<double> ticks;
  for (const auto& s : series) ticks.insert(ticks.end(), s.x.begin(), s.x.end());
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (double t : ticks) {
    const double px = x.map(tx(t));
    svg.line(px, kHeight - kBottom, px, kHeight - kBottom + 4, "black");
    svg.text(px, kHeight - kBottom + 16, num(t), "middle", 10);
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string color = kPalette[k % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double px = x.map(tx(s.x[i])), py = y.map(s.y[i]);
      pts.emplace_back(px, py);
      svg.circle(px, py, 3, color);
      if (!s.err.empty() && s.err[i] > 0.0) {
        svg.line(px, y.map(s.y[i] - s.err[i]), px, y.map(s.y[i] + s.err[i]), color);
        svg.line(px - 4, y.map(s.y[i] - s.err[i]), px + 4, y.map(s.y[i] - s.err[i]), color);
        svg.line(px - 4, y.map(s.y[i] + s.err[i]), px + 4, y.map(s.y[i] + s.err[i]), color);
      }
    }
    svg.polyline(pts, color);
    svg.text(kWidth - kRight - 8, kTop + 16 * static_cast<double>(k + 1), s.name, "end");
  }
  svg.save(path);
}

}  // namespace sparseforest::plot
