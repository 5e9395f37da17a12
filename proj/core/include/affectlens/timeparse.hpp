#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace affectlens {

// Seconds since the Unix epoch, UTC.
using EpochSeconds = std::int64_t;

// Accepts "YYYY-MM-DD", optionally followed by "Thh:mm:ss" (a space also
// works as the separator) and an optional "Z" or "+hh:mm"/"-hh:mm" offset.
// A bare date means midnight UTC. Returns nullopt on malformed input.
std::optional<EpochSeconds> parse_iso8601(std::string_view text);

// "YYYY-MM-DDThh:mm:ssZ"
std::string format_iso8601(EpochSeconds t);

}  // namespace affectlens
