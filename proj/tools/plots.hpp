#pragma once

#include <filesystem>
#include <string>
#include <vector>

// Static plot output: every series goes to a two-column .dat file and the
// figure is rendered to a standalone SVG next to it.
namespace regx::plots {

struct Series {
  std::string name;
  std::vector<double> x, y;
  std::vector<double> err;  // optional symmetric error bars
};

enum class Style { points, lines, bars };

struct Figure {
  std::string title;
  std::string x_label, y_label;
  Style style = Style::points;
  bool log_x = false;
  std::vector<Series> series;
  std::vector<std::string> categories;  // bar labels, one per x
};

/// Writes <stem>_<series>.dat for each series and <stem>.svg; returns the
/// paths written.
std::vector<std::filesystem::path> write_figure(const Figure& fig,
                                                const std::filesystem::path& dir,
                                                const std::string& stem);

std::string render_svg(const Figure& fig);

}  // namespace regx::plots
