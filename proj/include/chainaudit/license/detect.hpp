#pragma once
#ifndef CHAINAUDIT_LICENSE_DETECT_HPP
#define CHAINAUDIT_LICENSE_DETECT_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "chainaudit/license/matcher.hpp"
#include "chainaudit/license/tokenize.hpp"
#include "chainaudit/retrieval/types.hpp"

namespace chainaudit::license {

inline constexpr double kPresentCoverage = 0.90;
inline constexpr double kNoiseFloor = 0.05;

struct LicenseDetection {
    std::string spdx_id;
    double coverage = 0.0;
    std::string file_path;
    retrieval::FileClass location_class = retrieval::FileClass::none;

    [[nodiscard]] bool present(double threshold = kPresentCoverage) const { return coverage >= threshold; }

    friend bool operator==(const LicenseDetection&, const LicenseDetection&) = default;
};

/// A license named by identifier in a file that also talks about licensing,
/// e.g. a model card's "license: apache-2.0" front matter.
struct LicenseReference {
    std::string spdx_id;
    std::string file_path;
    retrieval::FileClass location_class = retrieval::FileClass::none;

    friend bool operator==(const LicenseReference&, const LicenseReference&) = default;
};

/// Emits one detection per (file, template) pair whose coverage exceeds the
/// noise floor. Output order follows the input file order, then template order.
inline std::vector<LicenseDetection> detect_licenses(const std::vector<retrieval::RetrievedFile>& files,
                                                     const TemplateCorpus& corpus,
                                                     double noise_floor = kNoiseFloor)
{
    if (corpus.empty()) {
        throw ConfigError("license template corpus is empty");
    }
    std::vector<LicenseDetection> detections;
    for (const auto& file : files) {
        const TokenSequence doc = tokenize(file.content);
        if (doc.empty()) {
            continue;
        }
        for (const auto& tmpl : corpus) {
            const double coverage = match_license(doc, tmpl);
            if (coverage > noise_floor) {
                detections.push_back({tmpl.spdx_id, coverage, file.path, file.file_class});
            }
        }
    }
    return detections;
}

/// Maximum coverage per spdx id across a set of detections.
inline std::map<std::string, double> max_coverage_by_license(const std::vector<LicenseDetection>& detections)
{
    std::map<std::string, double> best;
    for (const auto& d : detections) {
        auto& slot = best[d.spdx_id];
        slot = std::max(slot, d.coverage);
    }
    return best;
}

namespace detail {

inline bool contains_run(const TokenSequence& haystack, const TokenSequence& needle)
{
    if (needle.empty() || needle.size() > haystack.size()) {
        return false;
    }
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

// "Apache-2.0" is also written "Apache License 2.0" or "Apache License, Version 2.0".
inline std::vector<TokenSequence> reference_phrases(std::string_view spdx_id)
{
    const TokenSequence id = tokenize(spdx_id);
    std::vector<TokenSequence> phrases{id};
    auto is_number = [](const std::string& t) {
        return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    auto first_number = std::find_if(id.begin(), id.end(), is_number);
    if (first_number != id.begin() && first_number != id.end() && std::all_of(first_number, id.end(), is_number)) {
        TokenSequence name(id.begin(), first_number);
        TokenSequence version(first_number, id.end());
        for (const TokenSequence& infix : {TokenSequence{"license"}, TokenSequence{"license", "version"}}) {
            TokenSequence phrase = name;
            phrase.insert(phrase.end(), infix.begin(), infix.end());
            phrase.insert(phrase.end(), version.begin(), version.end());
            phrases.push_back(std::move(phrase));
        }
    }
    return phrases;
}

}  // namespace detail

inline std::vector<LicenseReference> find_license_references(const std::vector<retrieval::RetrievedFile>& files,
                                                             const TemplateCorpus& corpus)
{
    std::vector<LicenseReference> refs;
    for (const auto& file : files) {
        const TokenSequence doc = tokenize(file.content);
        const bool mentions_licensing = std::any_of(doc.begin(), doc.end(), [](const std::string& t) {
            return t == "license" || t == "licence" || t == "licensed" || t == "licenses";
        });
        if (!mentions_licensing) {
            continue;
        }
        for (const auto& tmpl : corpus) {
            const auto phrases = detail::reference_phrases(tmpl.spdx_id);
            if (std::any_of(phrases.begin(), phrases.end(),
                            [&](const TokenSequence& p) { return detail::contains_run(doc, p); })) {
                refs.push_back({tmpl.spdx_id, file.path, file.file_class});
            }
        }
    }
    return refs;
}

}  // namespace chainaudit::license

#endif  // CHAINAUDIT_LICENSE_DETECT_HPP
