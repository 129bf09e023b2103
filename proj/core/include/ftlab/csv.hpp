#pragma once

#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ftlab {

/// Shortest-safe decimal form with 17 significant digits; "nan", "inf",
/// "-inf" for non-finite values.
std::string format_double(double v);

/// Comma-separated writer with a header row and LF line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  template <class... Fields>
  void row(const Fields&... fields) {
    std::size_t i = 0;
    ((put(fields, i++)), ...);
    out_ << '\n';
  }

 private:
  void sep(std::size_t i) {
    if (i > 0) out_ << ',';
  }
  void put(double v, std::size_t i) {
    sep(i);
    out_ << format_double(v);
  }
  template <std::integral T>
  void put(T v, std::size_t i) {
    sep(i);
    out_ << v;
  }
  void put(std::string_view v, std::size_t i) {
    sep(i);
    out_ << v;
  }

  std::ostream& out_;
};

}  // namespace ftlab
