#include "xfid/csv.hpp"

#include "xfid/error.hpp"

namespace xfid::csv {

std::optional<Record> Reader::next() {
  int c = in_.peek();
  while (c == '#' || c == '\n' || c == '\r') {
    std::string skipped;
    std::getline(in_, skipped);
    ++line_;
    c = in_.peek();
  }
  if (c == std::char_traits<char>::eof()) return std::nullopt;

  Record rec;
  rec.line = line_;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  while (true) {
    const int ch = in_.get();
    if (ch == std::char_traits<char>::eof()) {
      if (quoted) {
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(rec.line) + ": unterminated quoted field");
      }
      rec.fields.push_back(std::move(field));
      rec.quoted.push_back(field_was_quoted);
      return rec;
    }
    const char x = static_cast<char>(ch);
    if (quoted) {
      if (x == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (x == '\n') ++line_;
        field.push_back(x);
      }
      continue;
    }
    if (x == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (x == ',') {
      rec.fields.push_back(std::move(field));
      rec.quoted.push_back(field_was_quoted);
      field.clear();
      field_was_quoted = false;
    } else if (x == '\r') {
      // swallowed; the following '\n' terminates the record
    } else if (x == '\n') {
      ++line_;
      rec.fields.push_back(std::move(field));
      rec.quoted.push_back(field_was_quoted);
      return rec;
    } else {
      field.push_back(x);
    }
  }
}

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace xfid::csv
