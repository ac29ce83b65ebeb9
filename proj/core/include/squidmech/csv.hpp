#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "squidmech/circuit_model.hpp"
#include "squidmech/fluxlock_sim.hpp"
#include "squidmech/mechanics_model.hpp"
#include "squidmech/spectra.hpp"

namespace squidmech {

/// Numeric CSV with a single header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of `name` in the header; throws ConfigError when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] bool has_column(std::string_view name) const;
};

/// Shortest decimal representation that reads back to the same double.
[[nodiscard]] std::string format_double(double v);

/// Throws ConfigError naming the offending line for empty input, ragged rows
/// and non-numeric fields.
[[nodiscard]] CsvTable read_csv(std::istream& in, std::string_view source = "<input>");
[[nodiscard]] CsvTable read_csv_file(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);
[[nodiscard]] std::string to_string(const CsvTable& table);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// phi_over_pi,freq_hz,s21_sq
[[nodiscard]] CsvTable to_csv(const FluxMap& map);
/// phi_over_pi,b_ip_T,omega_m_hz
[[nodiscard]] CsvTable to_csv(const std::vector<TuningPoint>& points);
/// freq_hz,psd_v2_per_hz
[[nodiscard]] CsvTable to_csv(const SpectrumTrace& trace);
/// step,drift_phi0,correction_phi0,residual_phi0,error_signal
[[nodiscard]] CsvTable to_csv(const LockResult& result);

[[nodiscard]] SpectrumTrace spectrum_from_csv(const CsvTable& table);
[[nodiscard]] std::vector<TuningPoint> tuning_from_csv(const CsvTable& table);

}  // namespace squidmech
