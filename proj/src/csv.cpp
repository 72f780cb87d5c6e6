#include "hategraph/csv.hpp"

namespace hategraph::csv {

bool DelimitedReader::next_record(std::vector<std::string>& fields) {
  fields.clear();
  int c = in_.get();
  if (c == std::istream::traits_type::eof()) return false;

  std::string field;
  bool in_quotes = false;
  for (;;) {
    if (c == std::istream::traits_type::eof()) {
      fields.push_back(std::move(field));
      return true;
    }
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        int peek = in_.peek();
        if (peek == '"') {
          in_.get();
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && field.empty()) {
      in_quotes = true;
    } else if (ch == delimiter_) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else if (ch == '\r') {
      if (in_.peek() == '\n') in_.get();
      fields.push_back(std::move(field));
      return true;
    } else {
      field += ch;
    }
    c = in_.get();
  }
}

char detect_delimiter(const std::filesystem::path& path) {
  return path.extension() == ".tsv" ? '\t' : ',';
}

std::string escape_field(const std::string& field, char delimiter) {
  bool needs_quotes = field.find(delimiter) != std::string::npos ||
                      field.find('"') != std::string::npos ||
                      field.find('\n') != std::string::npos ||
                      field.find('\r') != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace hategraph::csv
