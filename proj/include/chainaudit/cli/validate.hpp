#pragma once
#ifndef CHAINAUDIT_CLI_VALIDATE_HPP
#define CHAINAUDIT_CLI_VALIDATE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "chainaudit/cli/sources.hpp"
#include "chainaudit/license/detect.hpp"
#include "chainaudit/retrieval/coverage.hpp"
#include "chainaudit/retrieval/fetch.hpp"

namespace chainaudit::cli {

struct ValidationRow {
    graph::NodeKey key;
    retrieval::CoverageVerdict verdict;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    std::vector<graph::NodeKey> unreachable;
    std::map<std::string, retrieval::CoverageTally> by_kind;
};

/// Licenses found at present level in the given files.
inline std::set<std::string> present_licenses(const std::vector<retrieval::RetrievedFile>& files,
                                              const license::TemplateCorpus& corpus, double threshold)
{
    std::set<std::string> out;
    for (const auto& [id, cov] : license::max_coverage_by_license(license::detect_licenses(files, corpus))) {
        if (cov >= threshold) out.insert(id);
    }
    return out;
}

/// Pattern-based retrieval against a scan of every file in the tree, for an
/// explicit list of artifacts.
inline ValidationReport validate_artifacts(const std::vector<graph::NodeKey>& keys, RepositorySource& source,
                                           const license::TemplateCorpus& corpus,
                                           std::uint64_t max_file_bytes = retrieval::kDefaultMaxFileBytes,
                                           double threshold = license::kPresentCoverage)
{
    ValidationReport report;
    for (const auto& key : keys) {
        auto tree = source.tree(key);
        if (!tree) {
            report.unreachable.push_back(key);
            continue;
        }
        const auto client = source.client(key);
        const auto plan = retrieval::select_files(*tree, retrieval::default_patterns(), max_file_bytes);
        retrieval::RetrievalPlan full;
        for (const auto& e : *tree) {
            if (e.size_bytes <= max_file_bytes) {
                full.files.push_back({e.path, retrieval::classify_path(e.path), e.size_bytes});
            }
        }
        const auto pattern_files = retrieval::fetch_files(key.id, plan, client, nullptr, max_file_bytes).files;
        const auto all_files = retrieval::fetch_files(key.id, full, client, nullptr, max_file_bytes).files;
        ValidationRow row{key, retrieval::validate_retrieval_coverage(present_licenses(pattern_files, corpus, threshold),
                                                                      present_licenses(all_files, corpus, threshold))};
        report.by_kind[std::string(graph::to_string(key.kind))].add(row.verdict.category);
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline std::string validation_rows_csv(const ValidationReport& r)
{
    auto join = [](const std::set<std::string>& s) {
        std::string out;
        for (const auto& x : s) out += (out.empty() ? "" : ";") + x;
        return out;
    };
    std::string out = csv_row({"kind", "id", "category", "pattern_licenses", "full_scan_licenses"});
    for (const auto& row : r.rows) {
        out += csv_row({std::string(graph::to_string(row.key.kind)), row.key.id,
                        std::string(retrieval::to_string(row.verdict.category)), join(row.verdict.pattern_licenses),
                        join(row.verdict.full_scan_licenses)});
    }
    for (const auto& key : r.unreachable) {
        out += csv_row({std::string(graph::to_string(key.kind)), key.id, "unreachable", "", ""});
    }
    return out;
}

}  // namespace chainaudit::cli

#endif  // CHAINAUDIT_CLI_VALIDATE_HPP
