#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Minimal UTF-8 helpers. Malformed bytes are treated as single code points
// (latin-1 fallback) so that counting and scanning never throw.

namespace newscite::unicode {

struct Decoded {
    char32_t cp;
    std::size_t length;  // bytes consumed, >= 1
};

inline Decoded decode(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1};
    auto cont = [&](std::size_t i) {
        return i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(pos + 1)) {
        char32_t cp = (b0 & 0x1Fu) << 6 | (static_cast<unsigned char>(s[pos + 1]) & 0x3Fu);
        return {cp, 2};
    }
    if ((b0 & 0xF0) == 0xE0 && cont(pos + 1) && cont(pos + 2)) {
        char32_t cp = (b0 & 0x0Fu) << 12 | (static_cast<unsigned char>(s[pos + 1]) & 0x3Fu) << 6 |
                      (static_cast<unsigned char>(s[pos + 2]) & 0x3Fu);
        return {cp, 3};
    }
    if ((b0 & 0xF8) == 0xF0 && cont(pos + 1) && cont(pos + 2) && cont(pos + 3)) {
        char32_t cp = (b0 & 0x07u) << 18 | (static_cast<unsigned char>(s[pos + 1]) & 0x3Fu) << 12 |
                      (static_cast<unsigned char>(s[pos + 2]) & 0x3Fu) << 6 |
                      (static_cast<unsigned char>(s[pos + 3]) & 0x3Fu);
        return {cp, 4};
    }
    return {b0, 1};
}

// Number of code points in a UTF-8 string.
inline std::size_t length(std::string_view s) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); i += decode(s, i).length) ++n;
    return n;
}

inline bool is_ascii_alnum(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

inline bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

// Common non-ASCII punctuation that must not glue tokens together.
inline bool is_unicode_punct(char32_t cp) {
    switch (cp) {
        case 0x2018: case 0x2019: case 0x201C: case 0x201D:  // curly quotes
        case 0x2013: case 0x2014: case 0x2026:               // dashes, ellipsis
        case 0x00AB: case 0x00BB:                            // guillemets
        case 0x00A0:                                         // nbsp
            return true;
        default:
            return false;
    }
}

// Word constituents: ASCII alphanumerics plus any non-ASCII code point that
// is not in the punctuation set above. Good enough for the Latin-heavy news
// text this library deals with.
inline bool is_word_char(char32_t cp) {
    if (cp < 0x80) return is_ascii_alnum(cp);
    return !is_unicode_punct(cp);
}

inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;  // latin-1 letters
    return cp;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        auto [cp, len] = decode(s, i);
        append(out, to_lower(cp));
        i += len;
    }
    return out;
}

}  // namespace newscite::unicode
