#pragma once
#ifndef CHAINAUDIT_LICENSE_COPYRIGHT_HPP
#define CHAINAUDIT_LICENSE_COPYRIGHT_HPP

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainaudit/common.hpp"
#include "chainaudit/retrieval/types.hpp"

namespace chainaudit::license {

struct CopyrightNotice {
    std::string raw_text;
    std::string holder;
    std::vector<int> years;
    std::string file_path;
    retrieval::FileClass location_class = retrieval::FileClass::none;

    friend bool operator==(const CopyrightNotice&, const CopyrightNotice&) = default;
};

namespace detail {

inline constexpr std::string_view kCopyrightSign = "\xC2\xA9";
inline constexpr std::string_view kSpdxTag = "spdx-filecopyrighttext:";
inline constexpr std::size_t kMaxStatementBytes = 300;

// A yearless statement whose holder starts with one of these words is prose
// about copyright ("copyright notice", "copyright holders", ...), not a notice.
inline constexpr std::array<std::string_view, 40> kStopWords = {
    "notice",     "notices",    "holder",    "holders",     "owner",      "owners",     "law",
    "laws",       "license",    "licence",   "licenses",    "licensed",   "statement",  "statements",
    "protection", "and",        "or",        "like",        "claim",      "claims",     "interest",
    "interests",  "information", "of",       "on",          "in",         "to",         "for",
    "is",         "are",        "may",       "shall",       "must",       "will",       "disclaimer",
    "rights",     "act",        "status",    "infringement", "permission"};

inline bool is_decoration(unsigned char c)
{
    return std::isspace(c) != 0 || std::string_view("#*/;!->|\"'`%=+~").find(static_cast<char>(c)) !=
                                       std::string_view::npos;
}

inline bool is_ascii_alnum(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

enum class Marker { none, word, paren_c, sign };

// Marker starting exactly at pos in the lowercased line.
inline std::pair<Marker, std::size_t> marker_at(std::string_view lower, std::size_t pos)
{
    if (lower.substr(pos, 9) == "copyright") {
        const bool left_ok = pos == 0 || !is_ascii_alnum(lower[pos - 1]);
        const bool right_ok =
            pos + 9 >= lower.size() || (!is_ascii_alnum(lower[pos + 9]) && lower[pos + 9] != '-');
        if (left_ok && right_ok) {
            return {Marker::word, 9};
        }
        return {Marker::none, 0};
    }
    if (lower.substr(pos, 3) == "(c)") {
        return {Marker::paren_c, 3};
    }
    if (lower.substr(pos, kCopyrightSign.size()) == kCopyrightSign) {
        return {Marker::sign, kCopyrightSign.size()};
    }
    return {Marker::none, 0};
}

inline std::optional<std::size_t> find_marker(std::string_view lower, std::size_t from)
{
    for (std::size_t pos = from; pos < lower.size(); ++pos) {
        if (marker_at(lower, pos).first != Marker::none) {
            return pos;
        }
    }
    return std::nullopt;
}

inline std::optional<int> year_at(std::string_view s, std::size_t pos)
{
    if (pos + 4 > s.size()) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[pos + i]))) {
            return std::nullopt;
        }
    }
    if (pos + 4 < s.size() && std::isdigit(static_cast<unsigned char>(s[pos + 4]))) {
        return std::nullopt;
    }
    const int year = std::stoi(std::string(s.substr(pos, 4)));
    if (year < 1900 || year > 2099) {
        return std::nullopt;
    }
    return year;
}

inline std::size_t skip_spaces(std::string_view s, std::size_t pos)
{
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) {
        ++pos;
    }
    return pos;
}

// Range separators: '-', en dash, em dash.
inline std::size_t range_separator_length(std::string_view s, std::size_t pos)
{
    if (pos < s.size() && s[pos] == '-') {
        return 1;
    }
    if (s.substr(pos, 3) == "\xE2\x80\x93" || s.substr(pos, 3) == "\xE2\x80\x94") {
        return 3;
    }
    return 0;
}

inline std::string strip_placeholders(std::string_view s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char open = s[i];
        if (open == '<' || open == '[') {
            const char close = open == '<' ? '>' : ']';
            if (auto end = s.find(close, i); end != std::string_view::npos) {
                i = end;
                continue;
            }
        }
        out += s[i];
    }
    return std::string(trim(out));
}

inline std::string first_word_lower(std::string_view s)
{
    std::string word;
    for (char c : s) {
        if (!is_ascii_alnum(c)) {
            break;
        }
        word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return word;
}

inline bool is_stop_word(std::string_view word)
{
    for (auto stop : kStopWords) {
        if (word == stop) {
            return true;
        }
    }
    return false;
}

inline std::string_view strip_trailing_noise(std::string_view s)
{
    bool changed = true;
    while (changed) {
        changed = false;
        s = trim(s);
        const std::string lower = to_lower_ascii(s);
        for (std::string_view tail : {"all rights reserved.", "all rights reserved"}) {
            if (lower.size() >= tail.size() && lower.substr(lower.size() - tail.size()) == tail) {
                s.remove_suffix(tail.size());
                changed = true;
                break;
            }
        }
        while (!s.empty() && std::string_view(",;*`_#/|").find(s.back()) != std::string_view::npos) {
            s.remove_suffix(1);
            changed = true;
        }
    }
    return s;
}

inline std::optional<CopyrightNotice> parse_line(std::string_view line)
{
    if (line.size() > 4 * kMaxStatementBytes) {
        line = line.substr(0, 4 * kMaxStatementBytes);
    }
    const std::string lower = to_lower_ascii(line);
    std::size_t cursor = 0;
    std::optional<std::size_t> statement_start;
    if (auto tag = lower.find(kSpdxTag); tag != std::string::npos) {
        statement_start = tag;
        cursor = tag + kSpdxTag.size();
    }
    std::size_t marker_pos = cursor;
    bool at_line_start = true;
    if (auto found = find_marker(lower, cursor)) {
        marker_pos = *found;
        for (std::size_t i = cursor; i < marker_pos; ++i) {
            if (!is_decoration(static_cast<unsigned char>(lower[i]))) {
                at_line_start = false;
                break;
            }
        }
        if (!statement_start) {
            statement_start = marker_pos;
        } else if (!at_line_start) {
            marker_pos = cursor;
            at_line_start = true;
        }
    } else if (!statement_start) {
        return std::nullopt;
    }

    bool has_word = false;
    bool has_sign = false;
    std::size_t pos = marker_pos;
    while (true) {
        pos = skip_spaces(lower, pos);
        if (pos < lower.size() && lower[pos] == ':') {
            ++pos;
            continue;
        }
        auto [marker, length] = marker_at(lower, pos);
        if (marker == Marker::none) {
            break;
        }
        has_word = has_word || marker == Marker::word;
        has_sign = has_sign || marker == Marker::sign;
        pos += length;
    }
    const bool tagged = lower.find(kSpdxTag) != std::string::npos;

    std::vector<int> years;
    while (true) {
        std::size_t probe = pos;
        while (probe < lower.size() && (lower[probe] == ' ' || lower[probe] == '\t' || lower[probe] == ',')) {
            ++probe;
        }
        auto year = year_at(lower, probe);
        if (!year) {
            break;
        }
        years.push_back(*year);
        pos = probe + 4;
        std::size_t after = skip_spaces(lower, pos);
        if (auto sep = range_separator_length(lower, after); sep > 0) {
            std::size_t next = skip_spaces(lower, after + sep);
            if (auto end_year = year_at(lower, next)) {
                years.push_back(*end_year);
                pos = next + 4;
            } else if (lower.substr(next, 7) == "present") {
                pos = next + 7;
            }
        }
    }

    std::string_view rest = std::string_view(line).substr(pos);
    while (!rest.empty() && (std::isspace(static_cast<unsigned char>(rest.front())) ||
                             std::string_view(",:;.-").find(rest.front()) != std::string_view::npos)) {
        rest.remove_prefix(1);
    }
    if (to_lower_ascii(rest.substr(0, 3)) == "by ") {
        rest.remove_prefix(3);
    }
    const std::string_view holder = strip_trailing_noise(rest);
    const std::string clean_holder = strip_placeholders(holder);

    if (!has_word && !has_sign && !tagged && years.empty()) {
        return std::nullopt;  // lone "(c)" enumerations like "(c) You must retain ..."
    }
    if (years.empty()) {
        if (!at_line_start || clean_holder.empty()) {
            return std::nullopt;
        }
        if (is_stop_word(first_word_lower(clean_holder))) {
            return std::nullopt;
        }
        const auto lead = static_cast<unsigned char>(clean_holder.front());
        if (lead < 0x80 && !std::isupper(lead) && !std::isdigit(lead)) {
            return std::nullopt;
        }
    }

    CopyrightNotice notice;
    const std::size_t holder_end = static_cast<std::size_t>(holder.data() + holder.size() - line.data());
    const std::size_t raw_end = holder.empty() ? pos : holder_end;
    notice.raw_text = std::string(trim(line.substr(*statement_start, raw_end - *statement_start)));
    if (notice.raw_text.size() > kMaxStatementBytes) {
        notice.raw_text.resize(kMaxStatementBytes);
    }
    notice.holder = std::string(holder);
    notice.years = std::move(years);
    return notice;
}

}  // namespace detail

/// Line-oriented copyright statement extraction. A statement is a marker run
/// ("copyright", "(c)", U+00A9 in any adjacent order), an optional year or
/// year-range list, and a holder that runs to end of line.
inline std::vector<CopyrightNotice> extract_copyrights(std::string_view text)
{
    std::vector<CopyrightNotice> notices;
    for (auto line : split_lines(text)) {
        if (auto notice = detail::parse_line(line)) {
            notices.push_back(std::move(*notice));
        }
    }
    return notices;
}

inline std::vector<CopyrightNotice> extract_copyrights(const retrieval::RetrievedFile& file)
{
    auto notices = extract_copyrights(file.content);
    for (auto& n : notices) {
        n.file_path = file.path;
        n.location_class = file.file_class;
    }
    return notices;
}

inline bool contains_copyright_marker(std::string_view text)
{
    const std::string lower = to_lower_ascii(text);
    return lower.find("copyright") != std::string::npos || lower.find("(c)") != std::string::npos ||
           lower.find(detail::kCopyrightSign) != std::string::npos;
}

}  // namespace chainaudit::license

#endif  // CHAINAUDIT_LICENSE_COPYRIGHT_HPP
