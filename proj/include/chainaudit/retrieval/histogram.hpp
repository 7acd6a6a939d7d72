#pragma once
#ifndef CHAINAUDIT_RETRIEVAL_HISTOGRAM_HPP
#define CHAINAUDIT_RETRIEVAL_HISTOGRAM_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chainaudit/common.hpp"

namespace chainaudit::retrieval {

inline constexpr std::string_view kNoExtension = "No Extension";

struct ExtensionCount {
    std::string extension;
    std::uint64_t count = 0;
    double percent = 0.0;
};

/// Lowercased extension including the dot, following splitext rules:
/// leading dots of the basename do not start an extension.
inline std::string file_extension(std::string_view path)
{
    auto slash = path.find_last_of("/\\");
    std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
    std::size_t lead = 0;
    while (lead < base.size() && base[lead] == '.') {
        ++lead;
    }
    auto dot = base.rfind('.');
    if (dot == std::string_view::npos || dot < lead) {
        return std::string(kNoExtension);
    }
    return to_lower_ascii(base.substr(dot));
}

/// Sorted by count descending, ties by extension ascending.
inline std::vector<ExtensionCount> file_extension_histogram(const std::vector<std::string>& paths)
{
    std::map<std::string, std::uint64_t> counts;
    for (const auto& p : paths) {
        ++counts[file_extension(p)];
    }
    std::vector<ExtensionCount> table;
    for (const auto& [ext, n] : counts) {
        table.push_back({ext, n, 100.0 * ratio(n, paths.size())});
    }
    std::stable_sort(table.begin(), table.end(),
                     [](const ExtensionCount& a, const ExtensionCount& b) { return a.count > b.count; });
    return table;
}

/// Top-n rows with shares of all paths and relative to the .py count.
inline std::string file_extension_csv(const std::vector<std::string>& paths, std::size_t top_n = 15)
{
    const auto table = file_extension_histogram(paths);
    std::uint64_t py = 0;
    for (const auto& row : table) {
        if (row.extension == ".py") {
            py = row.count;
        }
    }
    std::string out = csv_row({"extension", "count", "percent", "percent_of_py"});
    for (std::size_t i = 0; i < table.size() && i < top_n; ++i) {
        const auto& row = table[i];
        out += csv_row({row.extension, std::to_string(row.count), format_percent(row.count, paths.size(), 2),
                        format_percent(row.count, py, 2)});
    }
    return out;
}

}  // namespace chainaudit::retrieval

#endif  // CHAINAUDIT_RETRIEVAL_HISTOGRAM_HPP
