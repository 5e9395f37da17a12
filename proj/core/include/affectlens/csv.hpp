#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace affectlens::csv {

// RFC-4180 quoting; rows are LF-terminated.
std::string escape(std::string_view field);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

// Reads one record, honoring quoted fields (including embedded commas,
// quotes and newlines). Returns nullopt at end of input.
std::optional<std::vector<std::string>> read_record(std::istream& is);

}  // namespace affectlens::csv
