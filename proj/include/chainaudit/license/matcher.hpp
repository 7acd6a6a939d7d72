#pragma once
#ifndef CHAINAUDIT_LICENSE_MATCHER_HPP
#define CHAINAUDIT_LICENSE_MATCHER_HPP

#include <bit>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chainaudit/common.hpp"
#include "chainaudit/license/tokenize.hpp"

namespace chainaudit::license {

/// Length of the longest common subsequence between a document token stream
/// and a fixed pattern, computed with the bit-vector recurrence
///   V' = (V + (V & M)) | (V & ~M)
/// over ceil(|pattern| / 64) machine words per document token.
class LcsMatcher {
public:
    LcsMatcher() = default;

    explicit LcsMatcher(const TokenSequence& pattern) : length_(pattern.size())
    {
        words_ = (length_ + 63) / 64;
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            auto [it, inserted] = masks_.try_emplace(pattern[i], std::vector<std::uint64_t>(words_, 0));
            it->second[i / 64] |= std::uint64_t{1} << (i % 64);
        }
    }

    [[nodiscard]] std::size_t pattern_length() const { return length_; }

    [[nodiscard]] std::size_t lcs_length(const TokenSequence& document) const
    {
        if (length_ == 0 || document.empty()) {
            return 0;
        }
        std::vector<std::uint64_t> v(words_, ~std::uint64_t{0});
        for (const auto& token : document) {
            auto it = masks_.find(token);
            if (it == masks_.end()) {
                continue;
            }
            const auto& m = it->second;
            std::uint64_t carry = 0;
            for (std::size_t w = 0; w < words_; ++w) {
                const std::uint64_t u = v[w] & m[w];
                const std::uint64_t partial = v[w] + carry;
                const std::uint64_t carry1 = partial < carry ? 1 : 0;
                const std::uint64_t sum = partial + u;
                const std::uint64_t carry2 = sum < u ? 1 : 0;
                carry = carry1 | carry2;
                v[w] = sum | (v[w] & ~m[w]);
            }
        }
        std::size_t zeros = 0;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t word = ~v[w];
            const std::size_t bits = (w + 1 == words_ && length_ % 64 != 0) ? length_ % 64 : 64;
            if (bits < 64) {
                word &= (std::uint64_t{1} << bits) - 1;
            }
            zeros += static_cast<std::size_t>(std::popcount(word));
        }
        return zeros;
    }

private:
    std::size_t length_ = 0;
    std::size_t words_ = 0;
    std::unordered_map<std::string, std::vector<std::uint64_t>> masks_;
};

struct LicenseTemplate {
    std::string spdx_id;
    std::string canonical_text;
    TokenSequence tokens;
    std::shared_ptr<const LcsMatcher> matcher;
};

/// Drops the "How to apply" appendix and angle-bracket placeholders such as
/// <year> or <copyright holders> before tokenizing.
inline TokenSequence template_tokens(std::string_view canonical_text)
{
    std::string_view body = canonical_text;
    for (std::string_view marker : {"APPENDIX: How to apply the Apache License",
                                    "APPENDIX: How to apply the Apache License to your work"}) {
        if (auto pos = body.find(marker); pos != std::string_view::npos) {
            body = body.substr(0, pos);
        }
    }
    std::string stripped;
    stripped.reserve(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '<') {
            auto close = body.find('>', i);
            auto newline = body.find('\n', i);
            if (close != std::string_view::npos && (newline == std::string_view::npos || close < newline)) {
                stripped += ' ';
                i = close;
                continue;
            }
        }
        stripped += body[i];
    }
    return tokenize(stripped);
}

inline LicenseTemplate make_template(std::string spdx_id, std::string canonical_text)
{
    LicenseTemplate t;
    t.spdx_id = std::move(spdx_id);
    t.canonical_text = std::move(canonical_text);
    t.tokens = template_tokens(t.canonical_text);
    if (t.tokens.empty()) {
        throw FormatError("license template '" + t.spdx_id + "' has no tokens");
    }
    t.matcher = std::make_shared<const LcsMatcher>(t.tokens);
    return t;
}

/// Coverage = |LCS(document, template)| / |template tokens|; 0 for an empty document.
inline double match_license(const TokenSequence& doc_tokens, const LicenseTemplate& tmpl)
{
    if (doc_tokens.empty() || tmpl.tokens.empty()) {
        return 0.0;
    }
    const auto total = static_cast<double>(tmpl.tokens.size());
    if (tmpl.matcher) {
        return static_cast<double>(tmpl.matcher->lcs_length(doc_tokens)) / total;
    }
    return static_cast<double>(LcsMatcher(tmpl.tokens).lcs_length(doc_tokens)) / total;
}

using TemplateCorpus = std::vector<LicenseTemplate>;

/// Loads every `<spdx_id>.txt` in a directory, sorted by id.
inline TemplateCorpus load_template_corpus(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw ConfigError("template directory not found: " + dir.string());
    }
    std::map<std::string, fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.emplace(entry.path().stem().string(), entry.path());
        }
    }
    if (files.empty()) {
        throw ConfigError("template directory has no .txt templates: " + dir.string());
    }
    TemplateCorpus corpus;
    for (const auto& [id, path] : files) {
        corpus.push_back(make_template(id, read_file(path)));
    }
    return corpus;
}

inline const LicenseTemplate* find_template(const TemplateCorpus& corpus, std::string_view spdx_id)
{
    for (const auto& t : corpus) {
        if (iequals(t.spdx_id, spdx_id)) {
            return &t;
        }
    }
    return nullptr;
}

}  // namespace chainaudit::license

#endif  // CHAINAUDIT_LICENSE_MATCHER_HPP
