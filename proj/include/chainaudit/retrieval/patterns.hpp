#pragma once
#ifndef CHAINAUDIT_RETRIEVAL_PATTERNS_HPP
#define CHAINAUDIT_RETRIEVAL_PATTERNS_HPP

#include <cstdint>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "chainaudit/common.hpp"
#include "chainaudit/retrieval/types.hpp"

namespace chainaudit::retrieval {

inline const std::vector<std::string>& default_license_keywords()
{
    static const std::vector<std::string> keywords = {
        "license",     "licence",      "copying",         "unlicense", "patents",    "notice",
        "copyright",   "disclaimer",   "authors",         "legal",     "terms",      "attribution",
        "citation",    "model_license", "data_license",   "dataset_license", "modelcard", "model_card",
        "datasheet"};
    return keywords;
}

inline const std::vector<std::string>& default_license_directories()
{
    static const std::vector<std::string> dirs = {"legal",     "license", "licenses",   "licensing",
                                                  "copyright", "terms",   "attribution"};
    return dirs;
}

inline const std::vector<std::string>& default_readme_patterns()
{
    static const std::vector<std::string> patterns = {"readme", "read_me", "read-me"};
    return patterns;
}

inline std::string join_alternation(const std::vector<std::string>& items)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += '|';
        }
        out += items[i];
    }
    return out;
}

/// r"^(.*\/)?([a-z0-9._-]+\.)?(" + "|".join(KEYWORDS) + r")(\.[a-z0-9\._-]+)?$"
inline std::string license_regex_source(const std::vector<std::string>& keywords)
{
    return R"(^(.*\/)?([a-z0-9._-]+\.)?()" + join_alternation(keywords) + R"()(\.[a-z0-9\._-]+)?$)";
}

/// r"^(.*\/)?(" + "|".join(README_PATTERNS) + r")(\..*)?$"
inline std::string readme_regex_source(const std::vector<std::string>& patterns)
{
    return R"(^(.*\/)?()" + join_alternation(patterns) + R"()(\..*)?$)";
}

/// Case-insensitive filename patterns for compliance-relevant files.
/// Immutable after construction; safe to share across threads.
class PatternSet {
public:
    PatternSet() : PatternSet(default_license_keywords(), default_license_directories(), default_readme_patterns())
    {
    }

    PatternSet(std::vector<std::string> keywords, std::vector<std::string> directories,
               std::vector<std::string> readme_patterns)
        : keywords_(std::move(keywords)),
          directories_(std::move(directories)),
          readme_patterns_(std::move(readme_patterns)),
          license_source_(retrieval::license_regex_source(keywords_)),
          readme_source_(retrieval::readme_regex_source(readme_patterns_)),
          license_regex_(license_source_, std::regex::ECMAScript | std::regex::icase | std::regex::optimize),
          readme_regex_(readme_source_, std::regex::ECMAScript | std::regex::icase | std::regex::optimize)
    {
        for (auto& d : directories_) {
            d = to_lower_ascii(d);
        }
    }

    [[nodiscard]] const std::string& license_regex_source() const { return license_source_; }
    [[nodiscard]] const std::string& readme_regex_source() const { return readme_source_; }
    [[nodiscard]] const std::vector<std::string>& keywords() const { return keywords_; }
    [[nodiscard]] const std::vector<std::string>& directories() const { return directories_; }
    [[nodiscard]] const std::vector<std::string>& readme_patterns() const { return readme_patterns_; }

    [[nodiscard]] bool matches_license(std::string_view path) const
    {
        return std::regex_match(path.begin(), path.end(), license_regex_);
    }

    [[nodiscard]] bool matches_readme(std::string_view path) const
    {
        return std::regex_match(path.begin(), path.end(), readme_regex_);
    }

    [[nodiscard]] bool under_license_directory(std::string_view path) const
    {
        std::size_t start = 0;
        while (true) {
            const auto slash = path.find('/', start);
            if (slash == std::string_view::npos) {
                return false;
            }
            const std::string component = to_lower_ascii(path.substr(start, slash - start));
            for (const auto& d : directories_) {
                if (component == d) {
                    return true;
                }
            }
            start = slash + 1;
        }
    }

    /// License classes take precedence over readme.
    [[nodiscard]] FileClass classify(std::string_view path) const
    {
        const bool at_root = path.find('/') == std::string_view::npos;
        const bool keyword = matches_license(path);
        if (keyword && at_root) {
            return FileClass::root_license;
        }
        if (under_license_directory(path)) {
            return FileClass::directory_license;
        }
        if (keyword) {
            return FileClass::scattered_license;
        }
        if (matches_readme(path)) {
            return FileClass::readme;
        }
        return FileClass::none;
    }

private:
    std::vector<std::string> keywords_;
    std::vector<std::string> directories_;
    std::vector<std::string> readme_patterns_;
    std::string license_source_;
    std::string readme_source_;
    std::regex license_regex_;
    std::regex readme_regex_;
};

inline const PatternSet& default_patterns()
{
    static const PatternSet patterns;
    return patterns;
}

inline FileClass classify_path(std::string_view path)
{
    return default_patterns().classify(path);
}

struct TreeEntry {
    std::string path;
    std::uint64_t size_bytes = 0;

    friend bool operator==(const TreeEntry&, const TreeEntry&) = default;
};

struct PlannedFile {
    std::string path;
    FileClass file_class = FileClass::none;
    std::uint64_t size_bytes = 0;

    friend bool operator==(const PlannedFile&, const PlannedFile&) = default;
};

struct SkippedFile {
    std::string path;
    std::uint64_t size_bytes = 0;
    std::string reason;

    friend bool operator==(const SkippedFile&, const SkippedFile&) = default;
};

struct RetrievalPlan {
    std::vector<PlannedFile> files;
    std::vector<SkippedFile> skipped;
};

/// Keeps classified paths within the size cap, in tree order; oversize
/// matches go to the skip report.
inline RetrievalPlan select_files(const std::vector<TreeEntry>& tree, const PatternSet& patterns = default_patterns(),
                                  std::uint64_t max_file_bytes = kDefaultMaxFileBytes)
{
    RetrievalPlan plan;
    for (const auto& entry : tree) {
        const FileClass cls = patterns.classify(entry.path);
        if (cls == FileClass::none) {
            continue;
        }
        if (entry.size_bytes > max_file_bytes) {
            plan.skipped.push_back({entry.path, entry.size_bytes, "oversize"});
            continue;
        }
        plan.files.push_back({entry.path, cls, entry.size_bytes});
    }
    return plan;
}

}  // namespace chainaudit::retrieval

#endif  // CHAINAUDIT_RETRIEVAL_PATTERNS_HPP
