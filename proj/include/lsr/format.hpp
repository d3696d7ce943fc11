#pragma once

#include <charconv>
#include <string>

namespace lsr {

/// Shortest decimal representation that round-trips the double exactly.
/// Used wherever output must be bit-stable (CSV columns, mask names,
/// serialized weights).
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace lsr
