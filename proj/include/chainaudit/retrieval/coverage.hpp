#pragma once
#ifndef CHAINAUDIT_RETRIEVAL_COVERAGE_HPP
#define CHAINAUDIT_RETRIEVAL_COVERAGE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chainaudit/common.hpp"

namespace chainaudit::retrieval {

enum class CoverageCategory { perfect_match, partial_match, complete_miss };

inline std::string_view to_string(CoverageCategory c)
{
    switch (c) {
        case CoverageCategory::perfect_match: return "perfect_match";
        case CoverageCategory::partial_match: return "partial_match";
        case CoverageCategory::complete_miss: return "complete_miss";
    }
    return "complete_miss";
}

struct CoverageVerdict {
    CoverageCategory category = CoverageCategory::perfect_match;
    std::set<std::string> pattern_licenses;
    std::set<std::string> full_scan_licenses;
};

/// perfect: every full-scan license was also found by pattern retrieval
/// (including the empty case); miss: nothing in common while the full scan
/// found something; partial otherwise.
inline CoverageVerdict validate_retrieval_coverage(const std::set<std::string>& pattern_detections,
                                                   const std::set<std::string>& full_scan_detections)
{
    CoverageVerdict verdict{CoverageCategory::perfect_match, pattern_detections, full_scan_detections};
    const bool subset = std::includes(pattern_detections.begin(), pattern_detections.end(),
                                      full_scan_detections.begin(), full_scan_detections.end());
    if (subset) {
        return verdict;
    }
    std::vector<std::string> common;
    std::set_intersection(pattern_detections.begin(), pattern_detections.end(), full_scan_detections.begin(),
                          full_scan_detections.end(), std::back_inserter(common));
    verdict.category = common.empty() ? CoverageCategory::complete_miss : CoverageCategory::partial_match;
    return verdict;
}

struct CoverageTally {
    std::uint64_t total = 0;
    std::uint64_t perfect = 0;
    std::uint64_t partial = 0;
    std::uint64_t miss = 0;

    [[nodiscard]] std::uint64_t any_match() const { return perfect + partial; }

    void add(CoverageCategory c)
    {
        ++total;
        switch (c) {
            case CoverageCategory::perfect_match: ++perfect; break;
            case CoverageCategory::partial_match: ++partial; break;
            case CoverageCategory::complete_miss: ++miss; break;
        }
    }

    CoverageTally& operator+=(const CoverageTally& o)
    {
        total += o.total;
        perfect += o.perfect;
        partial += o.partial;
        miss += o.miss;
        return *this;
    }
};

/// Column-per-group table: Total Repos, Perfect, Partial, Any Match, Complete Miss,
/// plus a Combined column.
inline std::string coverage_table_csv(const std::map<std::string, CoverageTally>& by_group)
{
    CoverageTally combined;
    for (const auto& [_, t] : by_group) {
        combined += t;
    }
    std::vector<std::pair<std::string, CoverageTally>> columns(by_group.begin(), by_group.end());
    columns.emplace_back("combined", combined);

    std::vector<std::string> header{"metric"};
    for (const auto& [name, _] : columns) {
        header.push_back(name);
    }
    std::string out = csv_row(header);
    auto row = [&](std::string_view metric, auto getter) {
        std::vector<std::string> fields{std::string(metric)};
        for (const auto& [_, t] : columns) {
            const std::uint64_t v = getter(t);
            fields.push_back(metric == "total_repos" ? std::to_string(v)
                                                     : std::to_string(v) + " (" + format_percent(v, t.total, 1) + "%)");
        }
        out += csv_row(fields);
    };
    row("total_repos", [](const CoverageTally& t) { return t.total; });
    row("perfect_match", [](const CoverageTally& t) { return t.perfect; });
    row("partial_match", [](const CoverageTally& t) { return t.partial; });
    row("any_match", [](const CoverageTally& t) { return t.any_match(); });
    row("complete_miss", [](const CoverageTally& t) { return t.miss; });
    return out;
}

}  // namespace chainaudit::retrieval

#endif  // CHAINAUDIT_RETRIEVAL_COVERAGE_HPP
