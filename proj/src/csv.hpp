// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qsynth::csv {

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line
/// breaks. CRLF and LF row endings are both accepted.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Throws std::runtime_error on
  /// an unterminated quoted field.
  std::optional<std::vector<std::string>> next();

  /// Physical line on which the last returned record started (1-based).
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

void write_field(std::ostream& out, const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace qsynth::csv
