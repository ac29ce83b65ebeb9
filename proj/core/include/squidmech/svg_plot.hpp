#pragma once

#include <string>
#include <vector>

#include "squidmech/csv.hpp"

namespace squidmech {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Optional grayscale background raster (row-major, rows along y).
struct PlotRaster {
  std::vector<double> x_edges;  // size nx + 1
  std::vector<double> y_edges;  // size ny + 1
  std::vector<double> values;   // size nx * ny, in [0, 1]
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  PlotRaster raster;
};

enum class PlotKind { tune, sweep, spectrum, lock };

/// Kind inferred from the CSV header; throws ConfigError for unknown layouts.
[[nodiscard]] PlotKind detect_plot_kind(const CsvTable& table);
[[nodiscard]] PlotKind parse_plot_kind(const std::string& name);

/// Builds the figure for one of this toolkit's CSV exports:
/// tune: one curve per in-plane field; sweep: |S21|^2 raster plus dip locus;
/// spectrum: the PSD; lock: drift and residual flux.
[[nodiscard]] PlotSpec plot_from_csv(const CsvTable& table, PlotKind kind);

/// Self-contained SVG with axes, ticks, labels, a legend and one <path> per
/// series. Output depends only on the input.
[[nodiscard]] std::string render_svg(const PlotSpec& spec);

}  // namespace squidmech
