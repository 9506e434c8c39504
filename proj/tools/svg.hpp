#pragma once

// Minimal deterministic SVG emitters for the plot subcommand: per-frame
// score curves with ground-truth/selection shading, and mean-F1 bars
// across budgets.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace vsum::svg {

struct Series {
  std::string label;
  std::vector<double> values;  // one per budget
};

// Frame scores as a polyline over [0,1], ground-truth key shots shaded
// green behind it, selected summary shots marked blue along the bottom.
std::string score_curve(const std::string& title,
                        const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& gt_mask,
                        const std::vector<std::pair<int, int>>& selected);

// Grouped bars of mean F1 per budget, one group color per series.
std::string budget_bars(const std::string& title,
                        const std::vector<double>& budgets,
                        const std::vector<Series>& series);

}  // namespace vsum::svg
