#pragma once
#ifndef CHAINAUDIT_GRAPH_SNAPSHOT_HPP
#define CHAINAUDIT_GRAPH_SNAPSHOT_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainaudit/graph/types.hpp"

namespace chainaudit::graph {

struct EmptySnapshotError : Error {
    using Error::Error;
};

struct SnapshotIssue {
    std::size_t line = 0;
    std::string message;
};

struct SnapshotLoad {
    std::vector<ArtifactRecord> records;
    std::size_t malformed_lines = 0;
    std::size_t duplicate_ids = 0;
    std::vector<SnapshotIssue> issues;
};

/// Lenient reader for line-delimited snapshot records. Malformed lines and
/// repeated (platform, kind, id) triples are counted and dropped. Among
/// duplicates the record with the smallest serialization is kept, so the
/// result does not depend on line order. Output is sorted by (kind, platform, id).
inline SnapshotLoad parse_snapshot(std::string_view text, const std::string& source = "<snapshot>")
{
    SnapshotLoad load;
    std::map<std::tuple<Platform, ArtifactKind, std::string>, std::size_t> seen;
    std::size_t line_no = 0;
    for (auto line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        try {
            ArtifactRecord r = record_from_json(nlohmann::json::parse(line));
            auto key = std::make_tuple(r.platform, r.kind, r.id);
            if (auto it = seen.find(key); it != seen.end()) {
                ++load.duplicate_ids;
                load.issues.push_back({line_no, "duplicate id " + r.id});
                auto& kept = load.records[it->second];
                if (to_json(r).dump() < to_json(kept).dump()) {
                    kept = std::move(r);
                }
                continue;
            }
            seen.emplace(std::move(key), load.records.size());
            load.records.push_back(std::move(r));
        } catch (const std::exception& e) {
            ++load.malformed_lines;
            load.issues.push_back({line_no, source + ": " + e.what()});
        }
    }
    std::sort(load.records.begin(), load.records.end(), [](const ArtifactRecord& a, const ArtifactRecord& b) {
        return std::tie(a.kind, a.platform, a.id) < std::tie(b.kind, b.platform, b.id);
    });
    return load;
}

inline SnapshotLoad load_snapshot(const std::filesystem::path& path)
{
    const std::string text = read_file(path);
    SnapshotLoad load = parse_snapshot(text, path.string());
    if (load.records.empty()) {
        throw EmptySnapshotError("snapshot has no well-formed records: " + path.string());
    }
    return load;
}

/// Merges several loads; duplicates across files are counted like in-file duplicates.
inline SnapshotLoad merge_snapshots(std::vector<SnapshotLoad> loads)
{
    SnapshotLoad merged;
    std::map<std::tuple<Platform, ArtifactKind, std::string>, std::size_t> seen;
    for (auto& load : loads) {
        merged.malformed_lines += load.malformed_lines;
        merged.duplicate_ids += load.duplicate_ids;
        merged.issues.insert(merged.issues.end(), load.issues.begin(), load.issues.end());
        for (auto& r : load.records) {
            auto key = std::make_tuple(r.platform, r.kind, r.id);
            if (auto it = seen.find(key); it != seen.end()) {
                ++merged.duplicate_ids;
                auto& kept = merged.records[it->second];
                if (to_json(r).dump() < to_json(kept).dump()) {
                    kept = std::move(r);
                }
                continue;
            }
            seen.emplace(std::move(key), merged.records.size());
            merged.records.push_back(std::move(r));
        }
    }
    std::sort(merged.records.begin(), merged.records.end(), [](const ArtifactRecord& a, const ArtifactRecord& b) {
        return std::tie(a.kind, a.platform, a.id) < std::tie(b.kind, b.platform, b.id);
    });
    return merged;
}

inline std::string write_snapshot_lines(const std::vector<ArtifactRecord>& records)
{
    std::string out;
    for (const auto& r : records) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

/// Stable filter on engagement (likes on the hub, stars on the forge).
inline std::vector<ArtifactRecord> filter_by_engagement(const std::vector<ArtifactRecord>& artifacts,
                                                        std::uint64_t min_engagement)
{
    std::vector<ArtifactRecord> kept;
    std::copy_if(artifacts.begin(), artifacts.end(), std::back_inserter(kept),
                 [&](const ArtifactRecord& r) { return r.engagement >= min_engagement; });
    return kept;
}

inline std::vector<ArtifactRecord> of_kind(const std::vector<ArtifactRecord>& records, ArtifactKind kind)
{
    std::vector<ArtifactRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&](const ArtifactRecord& r) { return r.kind == kind; });
    return out;
}

}  // namespace chainaudit::graph

#endif  // CHAINAUDIT_GRAPH_SNAPSHOT_HPP
