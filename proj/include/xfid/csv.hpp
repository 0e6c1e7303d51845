#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace xfid::csv {

/// One parsed record plus the 1-based line on which it started.
struct Record {
  std::vector<std::string> fields;
  std::vector<bool> quoted;  // distinguishes `""` from an empty field
  std::size_t line = 0;
};

/// Streaming RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF, and
/// newlines inside quoted fields. Lines starting with '#' outside a record are
/// skipped (provenance comments written by this toolkit).
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Throws Error(MalformedRecord)
  /// on an unterminated quote.
  std::optional<Record> next();

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace xfid::csv
