// Minimal CSV reader/writer for the toolkit's tabular outputs. Fields are
// numeric values or simple identifiers; no quoting or embedded commas.
// Doubles are written with std::to_chars (shortest round-trip form) so output
// files are byte-stable and parse back to the exact same values.
#pragma once

#include <string>
#include <vector>

namespace pulsekit {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

std::string format_double(double v);
double parse_double(const std::string& field, const std::string& context);
long parse_long(const std::string& field, const std::string& context);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> fields);
  const std::string& text() const { return text_; }
  void write_file(const std::string& path) const;

 private:
  std::size_t width_;
  std::string text_;
};

}  // namespace pulsekit
