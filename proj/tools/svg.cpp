#include "svg.hpp"

#include <algorithm>
#include <cstdio>

namespace vsum::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void rect(std::string& out, double x, double y, double w, double h,
          const std::string& fill, const std::string& opacity = "") {
  out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"";
  if (!opacity.empty()) out += " fill-opacity=\"" + opacity + "\"";
  out += "/>\n";
}

void text(std::string& out, double x, double y, int size,
          const std::string& s, const std::string& anchor = "start") {
  out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
         std::to_string(size) +
         "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s +
         "</text>\n";
}

}  // namespace

std::string score_curve(const std::string& title,
                        const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& gt_mask,
                        const std::vector<std::pair<int, int>>& selected) {
  const int width = 960, height = 240;
  const double left = 40, right = 15, top = 28, bottom = 34;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const int T = static_cast<int>(scores.size());
  const double x_of = plot_w / std::max(1, T);

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\">\n";
  rect(out, 0, 0, width, height, "#ffffff");
  text(out, left, 18, 13, title);

  // ground-truth key shots as green bands
  for (int t = 0; t < static_cast<int>(gt_mask.size()); ++t) {
    if (!gt_mask[t]) continue;
    int end = t;
    while (end < static_cast<int>(gt_mask.size()) && gt_mask[end]) ++end;
    rect(out, left + t * x_of, top, (end - t) * x_of, plot_h, "#74c476",
         "0.45");
    t = end;
  }
  // selected summary shots as blue strips along the bottom
  for (const auto& [s, e] : selected) {
    rect(out, left + s * x_of, top + plot_h - 8, (e - s) * x_of, 8, "#3182bd",
         "0.9");
  }

  // axes
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) +
         "\" x2=\"" + num(left + plot_w) + "\" y2=\"" + num(top + plot_h) +
         "\" stroke=\"#444444\"/>\n";
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" +
         num(left) + "\" y2=\"" + num(top + plot_h) +
         "\" stroke=\"#444444\"/>\n";
  text(out, left - 5, top + 5, 10, "1", "end");
  text(out, left - 5, top + plot_h, 10, "0", "end");
  text(out, left + plot_w / 2, height - 10, 11, "frame", "middle");

  // the score polyline
  out += "<polyline fill=\"none\" stroke=\"#cb181d\" stroke-width=\"1.2\" "
         "points=\"";
  for (int t = 0; t < T; ++t) {
    const double x = left + (t + 0.5) * x_of;
    const double y = top + (1.0 - std::clamp(scores[t], 0.0, 1.0)) * plot_h;
    out += num(x) + "," + num(y) + " ";
  }
  out += "\"/>\n</svg>\n";
  return out;
}

std::string budget_bars(const std::string& title,
                        const std::vector<double>& budgets,
                        const std::vector<Series>& series) {
  const int width = 640, height = 340;
  const double left = 50, right = 15, top = 30, bottom = 48;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const std::vector<std::string> palette = {"#3182bd", "#74c476", "#fd8d3c",
                                            "#9e9ac8"};

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\">\n";
  rect(out, 0, 0, width, height, "#ffffff");
  text(out, left, 18, 13, title);

  // y grid at 0, 25, 50, 75, 100 percent F1
  for (int grid = 0; grid <= 4; ++grid) {
    const double y = top + plot_h * (1.0 - grid / 4.0);
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(left + plot_w) + "\" y2=\"" + num(y) +
           "\" stroke=\"#dddddd\"/>\n";
    text(out, left - 6, y + 4, 10, std::to_string(grid * 25), "end");
  }

  const int n_groups = static_cast<int>(budgets.size());
  const int n_series = std::max<int>(1, static_cast<int>(series.size()));
  const double group_w = plot_w / std::max(1, n_groups);
  const double bar_w = group_w * 0.7 / n_series;

  for (int g = 0; g < n_groups; ++g) {
    for (int s = 0; s < static_cast<int>(series.size()); ++s) {
      const double value = std::clamp(series[s].values[g], 0.0, 1.0);
      const double x = left + g * group_w + group_w * 0.15 + s * bar_w;
      const double h = value * plot_h;
      rect(out, x, top + plot_h - h, bar_w * 0.92, h,
           palette[s % palette.size()]);
      text(out, x + bar_w * 0.46, top + plot_h - h - 4, 9,
           num(100.0 * value), "middle");
    }
    char label[32];
    std::snprintf(label, sizeof(label), "%g%%", 100.0 * budgets[g]);
    text(out, left + g * group_w + group_w / 2, top + plot_h + 16, 11, label,
         "middle");
  }
  text(out, left + plot_w / 2, height - 8, 11, "summary budget", "middle");

  // legend
  double lx = left + 8;
  for (int s = 0; s < static_cast<int>(series.size()); ++s) {
    rect(out, lx, top - 20, 10, 10, palette[s % palette.size()]);
    text(out, lx + 14, top - 11, 10, series[s].label);
    lx += 22 + 7.0 * series[s].label.size();
  }

  out += "</svg>\n";
  return out;
}

}  // namespace vsum::svg
