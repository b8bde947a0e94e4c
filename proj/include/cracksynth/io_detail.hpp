#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

#include "cracksynth/errors.hpp"

namespace cracksynth::io_detail {

// Shortest decimal representation that round-trips the exact double.
// Locale-independent ('.' decimal point).
inline std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw InternalError("double formatting failed");
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    // Trim ASCII whitespace and CR (tolerate CRLF input).
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError("cannot parse number: '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError("cannot parse integer: '" + std::string(s) + "'");
    return v;
}

}  // namespace cracksynth::io_detail
