// SPDX-License-Identifier: Apache-2.0
#include "csv.hpp"

#include <stdexcept>

namespace qsynth::csv {

std::optional<std::vector<std::string>> Reader::next() {
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return std::nullopt;

  record_line_ = line_;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;

  for (;; c = in_.get()) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw std::runtime_error("unterminated quoted field starting on line " + std::to_string(record_line_));
      fields.push_back(std::move(field));
      return fields;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field.empty() && !was_quoted) {
          quoted = true;
          was_quoted = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        break;
      case '\r':
        if (in_.peek() == '\n') break;
        field.push_back(ch);
        break;
      case '\n':
        ++line_;
        fields.push_back(std::move(field));
        return fields;
      default:
        field.push_back(ch);
    }
  }
}

void write_field(std::ostream& out, const std::string& field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos || field.empty() ||
                            field.front() == ' ' || field.back() == ' ';
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char ch : field) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

}  // namespace qsynth::csv
