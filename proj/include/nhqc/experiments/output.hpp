#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhqc/dynamics.hpp"
#include "nhqc/spectral.hpp"
#include "nhqc/topology.hpp"

namespace nhqc::experiments {

/// Scientific notation, 12 significant digits, locale independent.
std::string format_real(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable spectrum_table(const ComplexSpectrum& spec);

struct WindingRow {
  Complex base_energy;
  std::optional<WindingResult> result;  // empty => failed
};

CsvTable winding_table(const std::vector<WindingRow>& rows);
CsvTable winding_table(const WindingMap& map);
CsvTable spreading_table(const SpreadingRecord& record);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

}  // namespace nhqc::experiments
