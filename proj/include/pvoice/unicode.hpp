#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pvoice::unicode {

struct Decoded {
    char32_t cp;
    int len;  // bytes consumed, >= 1
};

// Lenient UTF-8 decode at byte offset i. Invalid sequences are consumed one
// byte at a time with the raw byte value as code point, so round trips stay
// deterministic on dirty input.
Decoded decode(std::string_view s, std::size_t i);

void encode(char32_t cp, std::string& out);

bool is_space(char32_t cp);

}  // namespace pvoice::unicode
