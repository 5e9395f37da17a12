#include "affectlens/csv.hpp"

#include <charconv>

namespace affectlens::csv {

std::string escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os.put(',');
    os << escape(fields[i]);
  }
  os.put('\n');
}

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::optional<std::vector<std::string>> read_record(std::istream& is) {
  int c = is.get();
  if (c == EOF) return std::nullopt;

  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  while (true) {
    if (c == EOF) {
      fields.push_back(std::move(cur));
      return fields;
    }
    if (quoted) {
      if (c == '"') {
        const int peek = is.peek();
        if (peek == '"') {
          is.get();
          cur.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(static_cast<char>(c));
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(cur));
      return fields;
    } else if (c == '\r') {
      if (is.peek() == '\n') is.get();
      fields.push_back(std::move(cur));
      return fields;
    } else {
      cur.push_back(static_cast<char>(c));
    }
    c = is.get();
  }
}

}  // namespace affectlens::csv
