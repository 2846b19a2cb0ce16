#include "lbandit/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lbandit {

namespace {

constexpr const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

double mean_of(const AggregateRow& r, PlotMetric m) {
  return m == PlotMetric::avg_reward ? r.mean_avg_reward : r.mean_bound;
}
double std_of(const AggregateRow& r, PlotMetric m) {
  return m == PlotMetric::avg_reward ? r.std_avg_reward : r.std_bound;
}

bool has_values(const PlotSeries& s, PlotMetric m) {
  return std::any_of(s.rows.begin(), s.rows.end(), [m](const AggregateRow& r) { return std::isfinite(mean_of(r, m)); });
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

double PlotFrame::x_px(double x) const {
  return x_max == x_min ? 0.5 * (left + right) : left + (x - x_min) / (x_max - x_min) * (right - left);
}

double PlotFrame::y_px(double y) const {
  return y_max == y_min ? 0.5 * (top + bottom) : bottom - (y - y_min) / (y_max - y_min) * (bottom - top);
}

std::string_view metric_name(PlotMetric m) { return m == PlotMetric::avg_reward ? "avg_reward" : "bound"; }

PlotFrame fit_frame(std::span<const PlotSeries> series, PlotMetric metric) {
  PlotFrame f;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double xlo = lo;
  double xhi = -lo;
  for (const PlotSeries& s : series) {
    for (const AggregateRow& r : s.rows) {
      const double mu = mean_of(r, metric);
      if (!std::isfinite(mu)) continue;
      const double sd = std::isfinite(std_of(r, metric)) ? std_of(r, metric) : 0.0;
      lo = std::min(lo, mu - sd);
      hi = std::max(hi, mu + sd);
      xlo = std::min(xlo, static_cast<double>(r.task_index));
      xhi = std::max(xhi, static_cast<double>(r.task_index));
    }
  }
  if (!std::isfinite(lo)) return f;
  const double pad = hi > lo ? 0.05 * (hi - lo) : 0.05 * std::max(1.0, std::abs(lo));
  f.y_min = lo - pad;
  f.y_max = hi + pad;
  f.x_min = xlo;
  f.x_max = xhi;
  return f;
}

std::string render_svg(std::span<const PlotSeries> series, PlotMetric metric) {
  const PlotFrame f = fit_frame(series, metric);
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n"
      "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  svg += "<g stroke=\"black\" fill=\"none\"><rect x=\"" + fmt(f.left) + "\" y=\"" + fmt(f.top) + "\" width=\"" +
         fmt(f.right - f.left) + "\" height=\"" + fmt(f.bottom - f.top) + "\"/></g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = f.y_min + (f.y_max - f.y_min) * t / 4.0;
    svg += "<text x=\"" + fmt(f.left - 6) + "\" y=\"" + fmt(f.y_px(y) + 4) + "\" text-anchor=\"end\">" + fmt(y) + "</text>\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", f.x_min);
  svg += "<text x=\"" + fmt(f.left) + "\" y=\"" + fmt(f.bottom + 16) + "\" text-anchor=\"middle\">" + buf + "</text>\n";
  std::snprintf(buf, sizeof buf, "%g", f.x_max);
  svg += "<text x=\"" + fmt(f.right) + "\" y=\"" + fmt(f.bottom + 16) + "\" text-anchor=\"middle\">" + buf + "</text>\n";
  svg += "<text x=\"" + fmt(0.5 * (f.left + f.right)) + "\" y=\"" + fmt(f.bottom + 34) +
         "\" text-anchor=\"middle\">task</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt(0.5 * (f.top + f.bottom)) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt(0.5 * (f.top + f.bottom)) + ")\">" + std::string(metric_name(metric)) + "</text>\n</g>\n";

  std::size_t shown = 0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const PlotSeries& ps = series[s];
    if (!has_values(ps, metric)) continue;
    const std::string colour = kColours[shown % std::size(kColours)];
    std::string upper;
    std::string lower;
    std::string line;
    for (const AggregateRow& r : ps.rows) {
      const double mu = mean_of(r, metric);
      if (!std::isfinite(mu)) continue;
      const double sd = std::isfinite(std_of(r, metric)) ? std_of(r, metric) : 0.0;
      const std::string x = fmt(f.x_px(static_cast<double>(r.task_index)));
      upper += x + "," + fmt(f.y_px(mu + sd)) + " ";
      lower = x + "," + fmt(f.y_px(mu - sd)) + " " + lower;
      line += x + "," + fmt(f.y_px(mu)) + " ";
    }
    svg += "<polygon class=\"band\" points=\"" + upper + lower + "\" fill=\"" + colour +
           "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg += "<polyline class=\"mean\" points=\"" + line + "\" fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"1.5\"/>\n";
    const double ly = f.top + 12 + 16.0 * static_cast<double>(shown);
    svg += "<g class=\"legend\"><line x1=\"" + fmt(f.left + 10) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(f.left + 30) +
           "\" y2=\"" + fmt(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/><text x=\"" + fmt(f.left + 36) +
           "\" y=\"" + fmt(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(ps.label) +
           "</text></g>\n";
    ++shown;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace lbandit
