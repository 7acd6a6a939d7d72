#pragma once
#ifndef CHAINAUDIT_LICENSE_LABELS_HPP
#define CHAINAUDIT_LICENSE_LABELS_HPP

#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chainaudit/common.hpp"

namespace chainaudit::license {

enum class LicenseCategory { cc_restrictive, copyleft, ml_license, share_alike, permissive, public_domain, unknown };

inline std::string_view to_string(LicenseCategory c)
{
    switch (c) {
        case LicenseCategory::cc_restrictive: return "cc_restrictive";
        case LicenseCategory::copyleft: return "copyleft";
        case LicenseCategory::ml_license: return "ml_license";
        case LicenseCategory::share_alike: return "share_alike";
        case LicenseCategory::permissive: return "permissive";
        case LicenseCategory::public_domain: return "public_domain";
        case LicenseCategory::unknown: return "unknown";
    }
    return "unknown";
}

inline LicenseCategory category_from_string(std::string_view s)
{
    for (auto c : {LicenseCategory::cc_restrictive, LicenseCategory::copyleft, LicenseCategory::ml_license,
                   LicenseCategory::share_alike, LicenseCategory::permissive, LicenseCategory::public_domain,
                   LicenseCategory::unknown}) {
        if (to_string(c) == s) {
            return c;
        }
    }
    throw FormatError("unknown license category '" + std::string(s) + "'");
}

/// Lowercase, trim, map spaces and underscores to '-', collapse '-' runs.
inline std::string normalize_label_text(std::string_view label)
{
    std::string out;
    for (char c : trim(label)) {
        char mapped = (c == ' ' || c == '_' || c == '\t') ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (mapped == '-' && !out.empty() && out.back() == '-') {
            continue;
        }
        out += mapped;
    }
    return out;
}

/// '*' matches any (possibly empty) run; everything else is literal.
inline bool glob_match(std::string_view pattern, std::string_view text)
{
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (p < pattern.size() && pattern[p] == text[t]) {
            ++p;
            ++t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') {
        ++p;
    }
    return p == pattern.size();
}

/// Reads whitespace-separated rows, skipping blank lines and '#' comments.
inline std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path, std::size_t columns)
{
    std::vector<std::vector<std::string>> rows;
    const std::string text = read_file(path);
    std::size_t line_no = 0;
    for (auto line : split_lines(text)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::istringstream in{std::string(line)};
        std::vector<std::string> row;
        std::string field;
        while (in >> field) {
            row.push_back(field);
        }
        if (row.size() != columns) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(columns) + " columns");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Alias and category tables plus the permissive label set used by the audits.
class LabelTables {
public:
    LabelTables() = default;

    LabelTables(std::map<std::string, std::string> aliases,
                std::vector<std::pair<std::string, LicenseCategory>> categories,
                std::set<std::string> permissive_labels = {"mit", "apache-2.0", "bsd-3-clause"})
        : aliases_(std::move(aliases)), categories_(std::move(categories)), permissive_(std::move(permissive_labels))
    {
    }

    static LabelTables load(const std::filesystem::path& alias_file, const std::filesystem::path& category_file)
    {
        std::map<std::string, std::string> aliases;
        for (auto& row : read_table(alias_file, 2)) {
            aliases[normalize_label_text(row[0])] = normalize_label_text(row[1]);
        }
        std::vector<std::pair<std::string, LicenseCategory>> categories;
        for (auto& row : read_table(category_file, 2)) {
            categories.emplace_back(normalize_label_text(row[0]), category_from_string(row[1]));
        }
        return LabelTables(std::move(aliases), std::move(categories));
    }

    static LabelTables load_defaults(const std::filesystem::path& data_dir = default_data_dir())
    {
        return load(data_dir / "aliases.txt", data_dir / "categories.txt");
    }

    void set_permissive_labels(const std::vector<std::string>& labels)
    {
        permissive_.clear();
        for (const auto& l : labels) {
            permissive_.insert(normalize(l));
        }
    }

    [[nodiscard]] const std::set<std::string>& permissive_labels() const { return permissive_; }

    /// Canonical form: normalized text, then one alias hop.
    [[nodiscard]] std::string normalize(std::string_view label) const
    {
        std::string norm = normalize_label_text(label);
        if (auto it = aliases_.find(norm); it != aliases_.end()) {
            return it->second;
        }
        return norm;
    }

    [[nodiscard]] bool is_permissive_label(std::string_view label) const
    {
        return permissive_.count(normalize(label)) > 0;
    }

    [[nodiscard]] LicenseCategory categorize(std::string_view label) const
    {
        const std::string norm = normalize(label);
        if (permissive_.count(norm) > 0) {
            return LicenseCategory::permissive;
        }
        for (const auto& [pattern, category] : categories_) {
            if (glob_match(pattern, norm)) {
                return category;
            }
        }
        return LicenseCategory::unknown;
    }

private:
    std::map<std::string, std::string> aliases_;
    std::vector<std::pair<std::string, LicenseCategory>> categories_;
    std::set<std::string> permissive_{"mit", "apache-2.0", "bsd-3-clause"};
};

}  // namespace chainaudit::license

#endif  // CHAINAUDIT_LICENSE_LABELS_HPP
