#include "squidmech/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "squidmech/errors.hpp"

namespace squidmech {

namespace {

constexpr double width = 720.0;
constexpr double height = 480.0;
constexpr double margin_left = 90.0;
constexpr double margin_right = 150.0;
constexpr double margin_top = 40.0;
constexpr double margin_bottom = 60.0;

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace

PlotKind detect_plot_kind(const CsvTable& table) {
  if (table.has_column("omega_m_hz")) return PlotKind::tune;
  if (table.has_column("s21_sq")) return PlotKind::sweep;
  if (table.has_column("psd_v2_per_hz")) return PlotKind::spectrum;
  if (table.has_column("residual_phi0")) return PlotKind::lock;
  throw ConfigError("plot: unrecognized CSV header");
}

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "tune") return PlotKind::tune;
  if (name == "sweep") return PlotKind::sweep;
  if (name == "spectrum") return PlotKind::spectrum;
  if (name == "lock") return PlotKind::lock;
  throw ConfigError("plot: unknown kind \"" + name + "\"");
}

PlotSpec plot_from_csv(const CsvTable& table, PlotKind kind) {
  PlotSpec spec;
  switch (kind) {
    case PlotKind::tune: {
      const auto pc = table.column("phi_over_pi");
      const auto bc = table.column("b_ip_T");
      const auto oc = table.column("omega_m_hz");
      double f_ref = std::numeric_limits<double>::infinity();
      for (const auto& r : table.rows) f_ref = std::min(f_ref, r[oc]);
      std::map<double, PlotSeries> by_field;
      for (const auto& r : table.rows) {
        auto& s = by_field[r[bc]];
        s.x.push_back(r[pc]);
        s.y.push_back(r[oc] - f_ref);
      }
      for (auto& [field, s] : by_field) {
        s.label = "B_IP = " + tick_label(field * 1e3) + " mT";
        spec.series.push_back(std::move(s));
      }
      spec.title = "Mechanical frequency vs flux bias";
      spec.x_label = "Phi_b / Phi_0 (phi_b / pi)";
      spec.y_label = "Omega_m/2pi - " + tick_label(f_ref) + " Hz";
      break;
    }
    case PlotKind::sweep: {
      const auto pc = table.column("phi_over_pi");
      const auto fc = table.column("freq_hz");
      const auto sc = table.column("s21_sq");
      std::vector<double> phis;
      std::vector<double> freqs;
      for (const auto& r : table.rows) {
        if (phis.empty() || phis.back() != r[pc]) phis.push_back(r[pc]);
      }
      for (const auto& r : table.rows) {
        if (r[pc] != phis.front()) break;
        freqs.push_back(r[fc] * 1e-9);
      }
      if (phis.size() * freqs.size() != table.rows.size()) {
        throw ConfigError("plot: sweep CSV is not a complete flux x frequency grid");
      }
      auto edges = [](const std::vector<double>& c) {
        std::vector<double> e(c.size() + 1);
        if (c.size() == 1) return std::vector<double>{c[0] - 0.5, c[0] + 0.5};
        e.front() = c.front() - 0.5 * (c[1] - c[0]);
        e.back() = c.back() + 0.5 * (c.back() - c[c.size() - 2]);
        for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
        return e;
      };
      // Decimate to at most 120 x 120 cells.
      const std::size_t sx = (phis.size() + 119) / 120;
      const std::size_t sy = (freqs.size() + 119) / 120;
      std::vector<double> px;
      std::vector<double> fy;
      for (std::size_t i = 0; i < phis.size(); i += sx) px.push_back(phis[i]);
      for (std::size_t j = 0; j < freqs.size(); j += sy) fy.push_back(freqs[j]);
      spec.raster.x_edges = edges(px);
      spec.raster.y_edges = edges(fy);
      for (std::size_t j = 0; j < freqs.size(); j += sy) {
        for (std::size_t i = 0; i < phis.size(); i += sx) {
          spec.raster.values.push_back(std::clamp(table.rows[i * freqs.size() + j][sc], 0.0, 1.0));
        }
      }
      PlotSeries locus;
      locus.label = "dip";
      for (std::size_t i = 0; i < phis.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < freqs.size(); ++j) {
          if (table.rows[i * freqs.size() + j][sc] < table.rows[i * freqs.size() + best][sc]) best = j;
        }
        locus.x.push_back(phis[i]);
        locus.y.push_back(freqs[best]);
      }
      spec.series.push_back(std::move(locus));
      spec.title = "|S21|^2 vs flux bias";
      spec.x_label = "Phi_b / Phi_0 (phi_b / pi)";
      spec.y_label = "frequency (GHz)";
      break;
    }
    case PlotKind::spectrum: {
      const auto fc = table.column("freq_hz");
      const auto pc = table.column("psd_v2_per_hz");
      const double mid = 0.5 * (table.rows.front()[fc] + table.rows.back()[fc]);
      PlotSeries s;
      s.label = "PSD";
      for (const auto& r : table.rows) {
        s.x.push_back(r[fc] - mid);
        s.y.push_back(r[pc] * 1e12);
      }
      spec.series.push_back(std::move(s));
      spec.title = "Anti-Stokes sideband PSD";
      spec.x_label = "f - " + tick_label(mid) + " Hz";
      spec.y_label = "PSD (uV^2/Hz)";
      break;
    }
    case PlotKind::lock: {
      const auto sc = table.column("step");
      const auto dc = table.column("drift_phi0");
      const auto rc = table.column("residual_phi0");
      // At most ~2000 points per path.
      const std::size_t stride = (table.rows.size() + 1999) / 2000;
      PlotSeries drift{"drift", {}, {}};
      PlotSeries residual{"residual", {}, {}};
      for (std::size_t i = 0; i < table.rows.size(); i += stride) {
        const auto& r = table.rows[i];
        drift.x.push_back(r[sc]);
        drift.y.push_back(r[dc]);
        residual.x.push_back(r[sc]);
        residual.y.push_back(r[rc]);
      }
      spec.series.push_back(std::move(drift));
      spec.series.push_back(std::move(residual));
      spec.title = "Flux lock";
      spec.x_label = "step";
      spec.y_label = "flux (Phi_0)";
      break;
    }
  }
  return spec;
}

std::string render_svg(const PlotSpec& spec) {
  Range xr;
  Range yr;
  for (const auto& s : spec.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  for (double v : spec.raster.x_edges) xr.add(v);
  for (double v : spec.raster.y_edges) yr.add(v);
  xr.finish();
  yr.finish();

  const double plot_w = width - margin_left - margin_right;
  const double plot_h = height - margin_top - margin_bottom;
  auto sx = [&](double x) { return margin_left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto sy = [&](double y) { return margin_top + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" fill=\"white\"/>\n";

  const auto& r = spec.raster;
  if (!r.values.empty()) {
    const std::size_t nx = r.x_edges.size() - 1;
    const std::size_t ny = r.y_edges.size() - 1;
    out << "<g class=\"raster\">\n";
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const int level = static_cast<int>(std::lround(255.0 * r.values[j * nx + i]));
        const double x0 = sx(r.x_edges[i]);
        const double x1 = sx(r.x_edges[i + 1]);
        const double y0 = sy(r.y_edges[j + 1]);
        const double y1 = sy(r.y_edges[j]);
        out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0)
            << "\" height=\"" << num(y1 - y0) << "\" fill=\"rgb(" << level << ',' << level << ','
            << level << ")\"/>\n";
      }
    }
    out << "</g>\n";
  }

  out << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<rect x=\"" << num(margin_left) << "\" y=\"" << num(margin_top) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h) << "\"/>\n";
  for (double t : nice_ticks(xr.lo, xr.hi)) {
    out << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(margin_top + plot_h) << "\" x2=\""
        << num(sx(t)) << "\" y2=\"" << num(margin_top + plot_h + 5) << "\"/>\n";
  }
  for (double t : nice_ticks(yr.lo, yr.hi)) {
    out << "<line x1=\"" << num(margin_left - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\""
        << num(margin_left) << "\" y2=\"" << num(sy(t)) << "\"/>\n";
  }
  out << "</g>\n<g class=\"labels\" font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (double t : nice_ticks(xr.lo, xr.hi)) {
    out << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(margin_top + plot_h + 20)
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(yr.lo, yr.hi)) {
    out << "<text x=\"" << num(margin_left - 8) << "\" y=\"" << num(sy(t) + 4)
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  out << "<text x=\"" << num(margin_left + plot_w / 2) << "\" y=\"" << num(height - 15)
      << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n"
      << "<text x=\"20\" y=\"" << num(margin_top + plot_h / 2) << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 20 " << num(margin_top + plot_h / 2) << ")\">"
      << escape(spec.y_label) << "</text>\n"
      << "<text x=\"" << num(margin_left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape(spec.title) << "</text>\n</g>\n";

  out << "<g class=\"series\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    out << "<path stroke=\"" << palette[k % std::size(palette)] << "\" d=\"";
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        pen_down = false;
        continue;
      }
      out << (pen_down ? " L" : (i ? " M" : "M")) << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
      pen_down = true;
    }
    out << "\"/>\n";
  }
  out << "</g>\n<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const double y = margin_top + 10 + 18.0 * static_cast<double>(k);
    const double x = margin_left + plot_w + 12;
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 20) << "\" y2=\""
        << num(y) << "\" stroke=\"" << palette[k % std::size(palette)] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y + 4) << "\">" << escape(spec.series[k].label)
        << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace squidmech
