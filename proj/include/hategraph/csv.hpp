#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace hategraph::csv {

// RFC-4180 style reader: quoted fields, doubled-quote escapes, embedded
// newlines and CRLF. Works for any single-character delimiter.
class DelimitedReader {
 public:
  DelimitedReader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

  // Reads one record; returns false at end of input.
  bool next_record(std::vector<std::string>& fields);

 private:
  std::istream& in_;
  char delimiter_;
};

// '\t' for .tsv, ',' otherwise.
char detect_delimiter(const std::filesystem::path& path);

std::string escape_field(const std::string& field, char delimiter);

}  // namespace hategraph::csv
