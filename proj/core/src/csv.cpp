#include "ftlab/csv.hpp"

#include <charconv>
#include <cmath>

namespace ftlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out) {
  std::size_t i = 0;
  for (auto h : header) put(h, i++);
  out_ << '\n';
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out) {
  std::size_t i = 0;
  for (const auto& h : header) put(std::string_view(h), i++);
  out_ << '\n';
}

}  // namespace ftlab
