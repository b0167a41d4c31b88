#include "nhqc/experiments/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nhqc::experiments {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CsvTable: row width mismatch");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

CsvTable spectrum_table(const ComplexSpectrum& spec) {
  CsvTable t({"index", "Re_E", "Im_E", "IPR", "label"});
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const char* label = j < spec.labels.size() ? to_string(spec.labels[j]) : "Unset";
    t.add_row({std::to_string(j), format_real(spec.eigenvalues[j].real()),
               format_real(spec.eigenvalues[j].imag()), format_real(spec.ipr[j]), label});
  }
  return t;
}

CsvTable winding_table(const std::vector<WindingRow>& rows) {
  CsvTable t({"Re_EB", "Im_EB", "W", "quant_err"});
  for (const auto& r : rows) {
    t.add_row({format_real(r.base_energy.real()), format_real(r.base_energy.imag()),
               r.result ? std::to_string(r.result->winding) : "fail",
               r.result ? format_real(r.result->quantization_error) : "nan"});
  }
  return t;
}

CsvTable winding_table(const WindingMap& map) {
  std::vector<WindingRow> rows;
  const std::size_t n_re = map.grid.re.size();
  for (std::size_t i = 0; i < map.grid.im.size(); ++i)
    for (std::size_t r = 0; r < n_re; ++r)
      rows.push_back({Complex(map.grid.re[r], map.grid.im[i]), map.results[i * n_re + r]});
  return winding_table(rows);
}

CsvTable spreading_table(const SpreadingRecord& record) {
  CsvTable t({"t_or_m", "sigma", "com", "log_norm"});
  for (std::size_t k = 0; k < record.size(); ++k)
    t.add_row({format_real(record.times[k]), format_real(record.sigma[k]),
               format_real(record.center_of_mass[k]), format_real(record.log_norms[k])});
  return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace nhqc::experiments
