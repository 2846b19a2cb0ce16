#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbandit/experiment.hpp"

namespace lbandit {

/// Linear data-to-pixel mapping of the plot area.
struct PlotFrame {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  double left = 70.0, right = 610.0;
  double top = 30.0, bottom = 370.0;

  double x_px(double x) const;
  double y_px(double y) const;
};

struct PlotSeries {
  std::string label;
  std::vector<AggregateRow> rows;
};

enum class PlotMetric { avg_reward, bound };
std::string_view metric_name(PlotMetric m);

/// Frame covering every finite mean +- std of the metric, padded 5%.
PlotFrame fit_frame(std::span<const PlotSeries> series, PlotMetric metric);

/// Mean line with a shaded mean +- std band per series, plus a legend.
/// Series whose metric is entirely NaN are skipped.
std::string render_svg(std::span<const PlotSeries> series, PlotMetric metric);

}  // namespace lbandit
