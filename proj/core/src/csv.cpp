#include "squidmech/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "squidmech/errors.hpp"

namespace squidmech {

using constants::pi;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string located(std::string_view source, std::size_t line, const std::string& what) {
  return std::string(source) + ":" + std::to_string(line) + ": " + what;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("csv: missing column \"" + std::string(name) + "\"");
}

bool CsvTable::has_column(std::string_view name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable read_csv(std::istream& in, std::string_view source) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    if (!have_header) {
      for (auto f : fields) {
        if (f.empty()) throw ConfigError(located(source, line_no, "empty header field"));
        table.header.emplace_back(f);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ConfigError(located(source, line_no,
                                "expected " + std::to_string(table.header.size()) + " fields, found " +
                                    std::to_string(fields.size())));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ConfigError(located(source, line_no, "non-numeric field \"" + std::string(f) + "\""));
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError(std::string(source) + ": empty CSV");
  if (table.rows.empty()) throw ConfigError(std::string(source) + ": CSV has a header but no data");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_csv(in, path.string());
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

std::string to_string(const CsvTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename " + tmp.string() + ": " + ec.message());
}

CsvTable to_csv(const FluxMap& map) {
  CsvTable t;
  t.header = {"phi_over_pi", "freq_hz", "s21_sq"};
  t.rows.reserve(map.s21_sq.size());
  for (std::size_t i = 0; i < map.phi_b.size(); ++i) {
    for (std::size_t j = 0; j < map.omega.size(); ++j) {
      t.rows.push_back({map.phi_b[i] / pi, map.omega[j] / (2.0 * pi), map.at(i, j)});
    }
  }
  return t;
}

CsvTable to_csv(const std::vector<TuningPoint>& points) {
  CsvTable t;
  t.header = {"phi_over_pi", "b_ip_T", "omega_m_hz"};
  for (const auto& p : points) t.rows.push_back({p.phi_b / pi, p.b_ip_T, p.omega_m / (2.0 * pi)});
  return t;
}

CsvTable to_csv(const SpectrumTrace& trace) {
  CsvTable t;
  t.header = {"freq_hz", "psd_v2_per_hz"};
  for (std::size_t i = 0; i < trace.freqs.size(); ++i) t.rows.push_back({trace.freqs[i], trace.psd[i]});
  return t;
}

CsvTable to_csv(const LockResult& result) {
  CsvTable t;
  t.header = {"step", "drift_phi0", "correction_phi0", "residual_phi0", "error_signal"};
  t.rows.reserve(result.trace.size());
  for (std::size_t n = 0; n < result.trace.size(); ++n) {
    const auto& r = result.trace[n];
    t.rows.push_back({static_cast<double>(n), r.drift, r.correction, r.residual, r.error_signal});
  }
  return t;
}

SpectrumTrace spectrum_from_csv(const CsvTable& table) {
  const std::size_t fc = table.column("freq_hz");
  const std::size_t pc = table.column("psd_v2_per_hz");
  SpectrumTrace trace;
  for (const auto& row : table.rows) {
    trace.freqs.push_back(row[fc]);
    trace.psd.push_back(row[pc]);
  }
  trace.validate();
  return trace;
}

std::vector<TuningPoint> tuning_from_csv(const CsvTable& table) {
  const std::size_t pc = table.column("phi_over_pi");
  const std::size_t bc = table.column("b_ip_T");
  const std::size_t oc = table.column("omega_m_hz");
  std::vector<TuningPoint> points;
  for (const auto& row : table.rows) {
    points.push_back({row[pc] * pi, row[bc], row[oc] * 2.0 * pi});
  }
  return points;
}

}  // namespace squidmech
