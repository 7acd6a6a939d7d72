#pragma once
#ifndef CHAINAUDIT_UNICODE_HPP
#define CHAINAUDIT_UNICODE_HPP

#include <unicode/uchar.h>
#include <unicode/ustring.h>
#include <unicode/utf8.h>

#include <string>
#include <string_view>
#include <vector>

#include "chainaudit/common.hpp"

namespace chainaudit::unicode {

inline constexpr UChar32 kReplacementChar = 0xFFFD;

/// Decodes arbitrary bytes as UTF-8, replacing each maximal invalid
/// subsequence with U+FFFD. Valid input is returned unchanged.
inline std::string decode_utf8_lossy(std::string_view bytes)
{
    if (bytes.empty()) {
        return {};
    }
    UErrorCode status = U_ZERO_ERROR;
    int32_t utf16_length = 0;
    int32_t substitutions = 0;
    u_strFromUTF8WithSub(nullptr, 0, &utf16_length, bytes.data(), static_cast<int32_t>(bytes.size()),
                         kReplacementChar, &substitutions, &status);
    if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) {
        throw Error("utf-8 decode failed");
    }
    if (substitutions == 0 && status != U_BUFFER_OVERFLOW_ERROR) {
        return std::string(bytes);
    }
    std::u16string utf16(static_cast<std::size_t>(utf16_length), u'\0');
    status = U_ZERO_ERROR;
    u_strFromUTF8WithSub(utf16.data(), utf16_length, &utf16_length, bytes.data(),
                         static_cast<int32_t>(bytes.size()), kReplacementChar, &substitutions, &status);
    if (U_FAILURE(status)) {
        throw Error("utf-8 decode failed");
    }
    if (substitutions == 0) {
        return std::string(bytes);
    }
    int32_t utf8_length = 0;
    status = U_ZERO_ERROR;
    u_strToUTF8(nullptr, 0, &utf8_length, utf16.data(), utf16_length, &status);
    std::string out(static_cast<std::size_t>(utf8_length), '\0');
    status = U_ZERO_ERROR;
    u_strToUTF8(out.data(), utf8_length, &utf8_length, utf16.data(), utf16_length, &status);
    if (U_FAILURE(status)) {
        throw Error("utf-8 re-encode failed");
    }
    return out;
}

/// Calls fn(code_point, byte_offset, byte_length) for each code point.
/// Invalid bytes surface as negative code points.
template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn)
{
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t start = i;
        UChar32 c = 0;
        U8_NEXT(s, i, length, c);
        fn(c, static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
    }
}

inline bool is_alnum(UChar32 c)
{
    return c >= 0 && u_isalnum(c) != 0;
}

inline void append_code_point(std::string& out, UChar32 c)
{
    char buffer[U8_MAX_LENGTH];
    int32_t offset = 0;
    UBool error = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buffer), offset, U8_MAX_LENGTH, c, error);
    if (!error) {
        out.append(buffer, static_cast<std::size_t>(offset));
    }
}

/// Keeps only alphanumeric code points, lowercased with simple case mapping.
inline std::string alnum_lower(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for_each_code_point(text, [&](UChar32 c, std::size_t, std::size_t) {
        if (is_alnum(c)) {
            append_code_point(out, u_tolower(c));
        }
    });
    return out;
}

}  // namespace chainaudit::unicode

#endif  // CHAINAUDIT_UNICODE_HPP
