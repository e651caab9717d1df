#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace scs {

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);
/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string csv_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void header(const std::vector<std::string>& cols);

  CsvWriter& operator<<(const std::string& s);
  CsvWriter& operator<<(const char* s) { return *this << std::string(s); }
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(int v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(long v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(long long v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(unsigned long v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(unsigned long long v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(bool v) { return cell(v ? "true" : "false"); }
  void end();

 private:
  CsvWriter& cell(const std::string& raw);
  std::ostream& os_;
  bool first_ = true;
};

/// Splits RFC-4180 text into rows of fields (used by tests and tools).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace scs
