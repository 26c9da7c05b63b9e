#pragma once

#include <string>
#include <string_view>

namespace logkg::text {

/// Replaces every ill-formed UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

std::string_view trim(std::string_view s);

/// Unicode NFC normalization. Input must be valid UTF-8.
std::string nfc(std::string_view utf8);

/// trim followed by NFC; the normalization used for triple matching.
std::string normalize(std::string_view utf8);

std::string to_lower_ascii(std::string_view s);

}  // namespace logkg::text
