#pragma once
#ifndef CHAINAUDIT_LICENSE_TOKENIZE_HPP
#define CHAINAUDIT_LICENSE_TOKENIZE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "chainaudit/unicode.hpp"

namespace chainaudit::license {

using TokenSequence = std::vector<std::string>;

/// Lowercased maximal runs of alphanumeric code points. Everything else
/// (punctuation, whitespace, symbols, invalid bytes) separates tokens.
inline TokenSequence tokenize(std::string_view text)
{
    TokenSequence tokens;
    std::string current;
    unicode::for_each_code_point(text, [&](UChar32 c, std::size_t, std::size_t) {
        if (unicode::is_alnum(c)) {
            unicode::append_code_point(current, u_tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    });
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

inline std::string join_tokens(const TokenSequence& tokens)
{
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) {
            out += ' ';
        }
        out += t;
    }
    return out;
}

}  // namespace chainaudit::license

#endif  // CHAINAUDIT_LICENSE_TOKENIZE_HPP
