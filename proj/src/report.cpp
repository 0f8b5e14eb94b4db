#include "lbdie/report.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace lbdie {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvReport& CsvReport::add(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw std::invalid_argument("CsvReport: row width does not match the header");
  rows_.push_back(std::move(row));
  return *this;
}

CsvReport& CsvReport::add(const std::string& label, const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size() + 1);
  row.push_back(label);
  for (double v : values) row.push_back(format_number(v));
  return add(std::move(row));
}

std::string CsvReport::text() const {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  };
  append_row(header_);
  for (const auto& r : rows_) append_row(r);
  return out;
}

void CsvReport::write(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::string body = text();
  std::fwrite(body.data(), 1, body.size(), f);
  std::fclose(f);
}

}  // namespace lbdie
