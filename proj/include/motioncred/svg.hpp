#pragma once

#include <string>
#include <vector>

namespace motioncred::svg {

struct Series {
  std::string name;
  std::vector<double> values;
};

/// Grouped bars, one group per category, one bar per series.
std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& categories, const std::vector<Series>& series,
                      double y_max = 1.0);

/// Polylines over shared categories.
std::string line_chart(const std::string& title, const std::string& y_label,
                       const std::vector<std::string>& categories, const std::vector<Series>& series,
                       double y_max = 1.0);

/// Small multiples: one panel per entry, each overlaying series as step
/// histograms over [0, 1].
struct Panel {
  std::string title;
  std::vector<Series> series;  // bin heights, equal-width bins on [0, 1]
};
std::string histogram_panels(const std::string& title, const std::vector<Panel>& panels);

}  // namespace motioncred::svg
