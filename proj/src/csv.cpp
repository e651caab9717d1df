#include "stickycs/csv.hpp"

#include <cmath>
#include <cstdio>

namespace scs {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& cols) {
  for (const auto& c : cols) *this << c;
  end();
}

CsvWriter& CsvWriter::cell(const std::string& raw) {
  if (!first_) os_ << ',';
  os_ << raw;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) { return cell(csv_field(s)); }
CsvWriter& CsvWriter::operator<<(double v) { return cell(csv_number(v)); }

void CsvWriter::end() {
  os_ << "\r\n";
  first_ = true;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string f;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        f += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        f += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      row.push_back(std::move(f));
      f.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !f.empty()) row.push_back(std::move(f));
      if (!row.empty()) rows.push_back(std::move(row));
      row.clear();
      f.clear();
      any = false;
    } else {
      f += c;
      any = true;
    }
  }
  if (any || !f.empty()) row.push_back(std::move(f));
  if (!row.empty()) rows.push_back(std::move(row));
  return rows;
}

}  // namespace scs
