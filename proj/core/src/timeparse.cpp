#include "affectlens/timeparse.hpp"

#include <array>
#include <cstdio>

namespace affectlens {

namespace {

// Proleptic Gregorian day count (Howard Hinnant's days_from_civil).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool read_digits(std::string_view s, std::size_t& i, std::size_t n, int& out) {
  if (i + n > s.size()) return false;
  int v = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const char c = s[i + k];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  i += n;
  out = v;
  return true;
}

bool days_in_month_ok(int y, int m, int d) {
  static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                  31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int max = lengths[static_cast<std::size_t>(m - 1)];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) max = 29;
  return d <= max;
}

}  // namespace

std::optional<EpochSeconds> parse_iso8601(std::string_view text) {
  std::size_t i = 0;
  int year = 0, month = 0, day = 0;
  if (!read_digits(text, i, 4, year)) return std::nullopt;
  if (i >= text.size() || text[i] != '-') return std::nullopt;
  ++i;
  if (!read_digits(text, i, 2, month)) return std::nullopt;
  if (i >= text.size() || text[i] != '-') return std::nullopt;
  ++i;
  if (!read_digits(text, i, 2, day)) return std::nullopt;
  if (!days_in_month_ok(year, month, day)) return std::nullopt;

  int hh = 0, mm = 0, ss = 0;
  std::int64_t offset = 0;
  if (i < text.size()) {
    if (text[i] != 'T' && text[i] != ' ') return std::nullopt;
    ++i;
    if (!read_digits(text, i, 2, hh)) return std::nullopt;
    if (i >= text.size() || text[i] != ':') return std::nullopt;
    ++i;
    if (!read_digits(text, i, 2, mm)) return std::nullopt;
    if (i >= text.size() || text[i] != ':') return std::nullopt;
    ++i;
    if (!read_digits(text, i, 2, ss)) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    if (i < text.size()) {
      if (text[i] == 'Z') {
        ++i;
      } else if (text[i] == '+' || text[i] == '-') {
        const int sign = text[i] == '+' ? 1 : -1;
        ++i;
        int oh = 0, om = 0;
        if (!read_digits(text, i, 2, oh)) return std::nullopt;
        if (i < text.size() && text[i] == ':') ++i;
        if (!read_digits(text, i, 2, om)) return std::nullopt;
        offset = sign * (oh * 3600 + om * 60);
      } else {
        return std::nullopt;
      }
    }
    if (i != text.size()) return std::nullopt;
  }

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  return days * 86400 + hh * 3600 + mm * 60 + ss - offset;
}

std::string format_iso8601(EpochSeconds t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace affectlens
