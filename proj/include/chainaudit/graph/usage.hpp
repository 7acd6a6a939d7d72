#pragma once
#ifndef CHAINAUDIT_GRAPH_USAGE_HPP
#define CHAINAUDIT_GRAPH_USAGE_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainaudit/common.hpp"

namespace chainaudit::graph {

struct UsageSignature {
    std::string callee_name;             // dotted suffix, e.g. "PeftModel.from_pretrained"
    std::optional<std::size_t> position; // zero-based positional index
    std::optional<std::string> keyword;

    friend bool operator==(const UsageSignature&, const UsageSignature&) = default;
};

/// Rows of `<callee> <position|-> <keyword|->`; '#' starts a comment.
inline std::vector<UsageSignature> parse_signatures(std::string_view text, const std::string& source = "<signatures>")
{
    std::vector<UsageSignature> out;
    std::size_t line_no = 0;
    for (auto raw : split_lines(text)) {
        ++line_no;
        auto line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
            if (j > i) cols.emplace_back(line.substr(i, j - i));
            i = j;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        if (cols.size() != 3) {
            throw ConfigError(where + ": expected 3 columns");
        }
        UsageSignature sig{cols[0], std::nullopt, std::nullopt};
        if (cols[1] != "-") {
            if (!std::all_of(cols[1].begin(), cols[1].end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
                throw ConfigError(where + ": position must be an integer or '-'");
            }
            sig.position = std::stoul(cols[1]);
        }
        if (cols[2] != "-") {
            sig.keyword = cols[2];
        }
        if (!sig.position && !sig.keyword) {
            throw ConfigError(where + ": signature needs a position or a keyword");
        }
        out.push_back(std::move(sig));
    }
    return out;
}

inline std::vector<UsageSignature> load_signatures(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) {
        throw ConfigError("signature file not found: " + path.string());
    }
    auto sigs = parse_signatures(read_file(path), path.string());
    if (sigs.empty()) {
        throw ConfigError("signature file is empty: " + path.string());
    }
    return sigs;
}

inline std::vector<UsageSignature> default_signatures()
{
    return load_signatures(default_data_dir() / "signatures.txt");
}

namespace pylex {

enum class Tok { name, string, number, op };

struct Token {
    Tok kind = Tok::op;
    std::string text;      // string value for Tok::string
    bool literal = true;   // false for f-strings and bytes
};

struct LexError : Error {
    using Error::Error;
};

inline bool is_ident_start(unsigned char c)
{
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

inline bool is_ident_char(unsigned char c)
{
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

inline bool is_string_prefix(std::string_view p)
{
    static constexpr std::array<std::string_view, 8> prefixes{"r", "u", "b", "f", "br", "rb", "fr", "rf"};
    const std::string lower = to_lower_ascii(p);
    return std::find(prefixes.begin(), prefixes.end(), lower) != prefixes.end();
}

inline std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    std::vector<char> brackets;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto read_string = [&](std::string_view prefix) {
        const std::string lower = to_lower_ascii(prefix);
        const bool raw = lower.find('r') != std::string::npos;
        const bool literal = lower.find('f') == std::string::npos && lower.find('b') == std::string::npos;
        const char q = src[i];
        const bool triple = i + 2 < n && src[i + 1] == q && src[i + 2] == q;
        i += triple ? 3 : 1;
        std::string value;
        for (;;) {
            if (i >= n) {
                throw LexError("unterminated string literal");
            }
            const char c = src[i];
            if (c == '\\' && i + 1 < n) {
                if (raw) {
                    value += c;
                    value += src[i + 1];
                } else if (src[i + 1] == '\n') {
                    // line continuation inside the literal
                } else {
                    const char e = src[i + 1];
                    value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                }
                i += 2;
                continue;
            }
            if (c == q) {
                if (!triple) {
                    ++i;
                    break;
                }
                if (i + 2 < n && src[i + 1] == q && src[i + 2] == q) {
                    i += 3;
                    break;
                }
            }
            if (c == '\n' && !triple) {
                throw LexError("newline in string literal");
            }
            value += c;
            ++i;
        }
        out.push_back({Tok::string, std::move(value), literal});
    };

    while (i < n) {
        const auto c = static_cast<unsigned char>(src[i]);
        if (c == '#') {
            while (i < n && src[i] != '\n') ++i;
            continue;
        }
        if (std::isspace(c) || c == '\\') {
            ++i;
            continue;
        }
        if (c == '"' || c == '\'') {
            read_string({});
            continue;
        }
        if (is_ident_start(c)) {
            const std::size_t start = i;
            while (i < n && is_ident_char(static_cast<unsigned char>(src[i]))) ++i;
            const std::string_view word = src.substr(start, i - start);
            if (i < n && (src[i] == '"' || src[i] == '\'') && is_string_prefix(word)) {
                read_string(word);
                continue;
            }
            out.push_back({Tok::name, std::string(word), true});
            continue;
        }
        if (std::isdigit(c)) {
            const std::size_t start = i;
            while (i < n && (is_ident_char(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
            out.push_back({Tok::number, std::string(src.substr(start, i - start)), true});
            continue;
        }
        if (c == '(' || c == '[' || c == '{') {
            brackets.push_back(static_cast<char>(c));
        } else if (c == ')' || c == ']' || c == '}') {
            const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (brackets.empty() || brackets.back() != open) {
                throw LexError("unbalanced bracket");
            }
            brackets.pop_back();
        }
        static constexpr std::array<std::string_view, 9> two{"==", "!=", "<=", ">=", ":=", "**", "->", "//", "<<"};
        if (i + 1 < n) {
            const std::string_view pair = src.substr(i, 2);
            if (std::find(two.begin(), two.end(), pair) != two.end()) {
                out.push_back({Tok::op, std::string(pair), true});
                i += 2;
                continue;
            }
        }
        out.push_back({Tok::op, std::string(1, static_cast<char>(c)), true});
        ++i;
    }
    if (!brackets.empty()) {
        throw LexError("unclosed bracket");
    }
    return out;
}

inline bool is_keyword(std::string_view w)
{
    static constexpr std::array<std::string_view, 35> kw{
        "False", "None",   "True",    "and",   "as",     "assert", "async", "await",  "break",
        "class", "continue", "def",   "del",   "elif",   "else",   "except", "finally", "for",
        "from",  "global", "if",      "import", "in",    "is",     "lambda", "nonlocal", "not",
        "or",    "pass",   "raise",   "return", "try",   "while",  "with",  "yield"};
    return std::find(kw.begin(), kw.end(), w) != kw.end();
}

}  // namespace pylex

/// One syntactic call `a.b.c(...)` with literal string arguments resolved.
/// Non-literal arguments are kept as nullopt so positions stay aligned.
struct CallSite {
    std::vector<std::string> callee;
    std::vector<std::optional<std::string>> positional;
    std::map<std::string, std::optional<std::string>> keywords;
};

namespace detail {

inline std::optional<std::string> literal_value(const std::vector<pylex::Token>& toks, std::size_t b, std::size_t e)
{
    if (b >= e) {
        return std::nullopt;
    }
    std::string value;
    for (std::size_t k = b; k < e; ++k) {
        if (toks[k].kind != pylex::Tok::string || !toks[k].literal) {
            return std::nullopt;
        }
        value += toks[k].text;
    }
    return value;
}

inline std::vector<std::string> split_dotted(std::string_view s)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        auto dot = s.find('.', start);
        parts.emplace_back(s.substr(start, dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return parts;
}

}  // namespace detail

/// Returns nullopt when the source does not lex (unterminated literal,
/// unbalanced brackets).
inline std::optional<std::vector<CallSite>> find_call_sites(std::string_view source)
{
    std::vector<pylex::Token> toks;
    try {
        toks = pylex::tokenize(source);
    } catch (const pylex::LexError&) {
        return std::nullopt;
    }
    using pylex::Tok;
    auto is_op = [&](std::size_t k, std::string_view op) { return toks[k].kind == Tok::op && toks[k].text == op; };

    std::vector<CallSite> calls;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        if (!is_op(i, "(") || toks[i - 1].kind != Tok::name) {
            continue;
        }
        std::size_t first = i - 1;
        while (first >= 2 && is_op(first - 1, ".") && toks[first - 2].kind == Tok::name) {
            first -= 2;
        }
        if (pylex::is_keyword(toks[first].text)) {
            continue;
        }
        if (first > 0 && toks[first - 1].kind == Tok::name &&
            (toks[first - 1].text == "def" || toks[first - 1].text == "class")) {
            continue;
        }
        CallSite call;
        for (std::size_t k = first; k < i; k += 2) {
            call.callee.push_back(toks[k].text);
        }

        // Split arguments at top-level commas up to the matching ')'.
        std::size_t depth = 0;
        std::size_t arg_begin = i + 1;
        bool positional_reliable = true;
        auto finish_arg = [&](std::size_t b, std::size_t e) {
            if (b >= e) {
                return;
            }
            if (e - b >= 2 && toks[b].kind == Tok::name && is_op(b + 1, "=")) {
                call.keywords[toks[b].text] = detail::literal_value(toks, b + 2, e);
                return;
            }
            if (is_op(b, "*") || is_op(b, "**")) {
                positional_reliable = false;  // unpacked arguments shift positions
                return;
            }
            call.positional.push_back(positional_reliable ? detail::literal_value(toks, b, e) : std::nullopt);
        };
        for (std::size_t k = i + 1; k < toks.size(); ++k) {
            const auto& t = toks[k];
            if (t.kind == Tok::op && (t.text == "(" || t.text == "[" || t.text == "{")) {
                ++depth;
            } else if (t.kind == Tok::op && (t.text == ")" || t.text == "]" || t.text == "}")) {
                if (depth == 0) {
                    finish_arg(arg_begin, k);
                    break;
                }
                --depth;
            } else if (depth == 0 && is_op(k, ",")) {
                finish_arg(arg_begin, k);
                arg_begin = k + 1;
            }
        }
        calls.push_back(std::move(call));
    }
    return calls;
}

inline bool callee_matches(const std::vector<std::string>& callee, const std::vector<std::string>& suffix)
{
    if (suffix.empty() || suffix.size() > callee.size()) {
        return false;
    }
    return std::equal(suffix.rbegin(), suffix.rend(), callee.rbegin());
}

inline bool call_matches(const CallSite& call, std::string_view model_id, const UsageSignature& sig)
{
    if (!callee_matches(call.callee, detail::split_dotted(sig.callee_name))) {
        return false;
    }
    if (sig.position && *sig.position < call.positional.size()) {
        const auto& v = call.positional[*sig.position];
        if (v && *v == model_id) {
            return true;
        }
    }
    if (sig.keyword) {
        auto it = call.keywords.find(*sig.keyword);
        if (it != call.keywords.end() && it->second && *it->second == model_id) {
            return true;
        }
    }
    return false;
}

namespace detail {

/// Drops a trailing '#' comment, tracking single-line quote state.
inline std::string_view strip_line_comment(std::string_view line)
{
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == '\\') {
                ++i;
            } else if (c == quote) {
                quote = 0;
            }
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

inline bool line_has_call(std::string_view line, std::string_view name)
{
    for (auto pos = line.find(name); pos != std::string_view::npos; pos = line.find(name, pos + 1)) {
        if (pos > 0 && pylex::is_ident_char(static_cast<unsigned char>(line[pos - 1]))) {
            continue;
        }
        std::size_t k = pos + name.size();
        while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
        if (k < line.size() && line[k] == '(') {
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Fallback for sources that fail to lex: a line counts when, after comment
/// removal, it holds a signature callee followed by '(' and the quoted id.
inline bool line_scan_usage(std::string_view source, std::string_view model_id,
                            const std::vector<UsageSignature>& signatures)
{
    const std::string dq = "\"" + std::string(model_id) + "\"";
    const std::string sq = "'" + std::string(model_id) + "'";
    for (auto raw : split_lines(source)) {
        const auto line = detail::strip_line_comment(raw);
        if (line.find(dq) == std::string_view::npos && line.find(sq) == std::string_view::npos) {
            continue;
        }
        for (const auto& sig : signatures) {
            const auto parts = detail::split_dotted(sig.callee_name);
            if (detail::line_has_call(line, parts.back())) {
                return true;
            }
        }
    }
    return false;
}

inline bool detect_model_usage(std::string_view source, std::string_view model_id,
                               const std::vector<UsageSignature>& signatures)
{
    if (source.empty() || model_id.empty() || signatures.empty()) {
        return false;
    }
    if (source.find(model_id) == std::string_view::npos) {
        return false;
    }
    auto calls = find_call_sites(source);
    if (!calls) {
        return line_scan_usage(source, model_id, signatures);
    }
    for (const auto& call : *calls) {
        for (const auto& sig : signatures) {
            if (call_matches(call, model_id, sig)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace chainaudit::graph

#endif  // CHAINAUDIT_GRAPH_USAGE_HPP
