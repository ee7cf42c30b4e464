#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rofigs {

// RFC 4180 reader: quoted fields, doubled-quote escapes, CRLF or LF line
// ends, newlines allowed inside quoted fields. The first record is the
// header. Throws Error on unbalanced quotes or ragged rows ("row N" counts
// data rows, header excluded).
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

// Quotes a field only when needed (comma, quote, or newline present).
std::string csv_escape(const std::string& field);

}  // namespace rofigs
