#pragma once

// CSV report output. Numbers are printed with 17 significant digits through
// std::to_chars, so the format is locale-independent ('.' decimal point) and
// values round-trip exactly; rows end in '\n'. Identical inputs therefore
// produce byte-identical files.

#include <string>
#include <vector>

namespace lbdie {

std::string format_number(double v);

class CsvReport {
 public:
  explicit CsvReport(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvReport& add(std::vector<std::string> row);
  // convenience: label in the first column, numbers after it
  CsvReport& add(const std::string& label, const std::vector<double>& values);

  std::string text() const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace lbdie
