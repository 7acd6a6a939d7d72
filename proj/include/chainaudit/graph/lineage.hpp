#pragma once
#ifndef CHAINAUDIT_GRAPH_LINEAGE_HPP
#define CHAINAUDIT_GRAPH_LINEAGE_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chainaudit/graph/types.hpp"

namespace chainaudit::graph {

using ModelResolver = std::function<std::optional<ArtifactRecord>(std::string_view id)>;
using DatasetRefResolver = std::function<std::optional<std::string>(std::string_view raw_ref)>;

/// On-disk key -> value store backed by an append-only JSONL file. A null
/// value records a negative lookup. Later lines override earlier ones.
class ResolverCache {
public:
    ResolverCache() = default;

    explicit ResolverCache(std::filesystem::path file) : file_(std::move(file))
    {
        if (!file_.empty() && std::filesystem::exists(file_)) {
            const std::string text = read_file(file_);
            for (auto line : split_lines(text)) {
                if (trim(line).empty()) {
                    continue;
                }
                auto j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_discarded() || !j.contains("key") || !j["key"].is_string()) {
                    continue;  // a torn final line from an interrupted run
                }
                entries_[j["key"].get<std::string>()] =
                    j.contains("value") && j["value"].is_string() ? std::optional(j["value"].get<std::string>())
                                                                  : std::nullopt;
            }
        }
    }

    [[nodiscard]] bool contains(const std::string& key) const
    {
        std::lock_guard lock(mutex_);
        return entries_.count(key) > 0;
    }

    /// nullopt: key unknown. optional(nullopt): known negative.
    [[nodiscard]] std::optional<std::optional<std::string>> get(const std::string& key) const
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    void put(const std::string& key, const std::optional<std::string>& value)
    {
        std::lock_guard lock(mutex_);
        entries_[key] = value;
        if (file_.empty()) {
            return;
        }
        if (file_.has_parent_path()) {
            std::filesystem::create_directories(file_.parent_path());
        }
        std::ofstream out(file_, std::ios::app | std::ios::binary);
        if (!out) {
            throw IoError("cannot append to resolver cache " + file_.string());
        }
        nlohmann::ordered_json j;
        j["key"] = key;
        j["value"] = value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json();
        out << j.dump() << '\n';
        out.flush();
    }

    [[nodiscard]] std::size_t size() const
    {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    std::filesystem::path file_;
    mutable std::mutex mutex_;
    std::map<std::string, std::optional<std::string>> entries_;
};

struct LineageWarnings {
    std::vector<std::string> dangling;  // "child -> missing-base"
    std::vector<std::string> cycles;    // ids on a detected base_model cycle

    void merge(const LineageWarnings& o)
    {
        dangling.insert(dangling.end(), o.dangling.begin(), o.dangling.end());
        cycles.insert(cycles.end(), o.cycles.begin(), o.cycles.end());
    }
};

struct LineageResult {
    std::vector<ArtifactRecord> models;  // sorted by id, each once
    LineageWarnings warnings;
};

/// Adds every transitively reachable base_model ancestor regardless of its
/// engagement. Cycles are cut at the first revisited node and reported.
inline LineageResult resolve_base_lineage(const std::vector<ArtifactRecord>& models, const ModelResolver& resolver)
{
    std::map<std::string, ArtifactRecord> out;
    std::set<std::string> reported_dangling;
    std::set<std::string> cycle_members;
    for (const auto& m : models) {
        out.emplace(m.id, m);
    }
    for (const auto& start : models) {
        std::vector<std::string> path{start.id};
        std::set<std::string> on_path{start.id};
        const ArtifactRecord* current = &out.at(start.id);
        while (current->base_model_ref) {
            const std::string base = *current->base_model_ref;
            if (on_path.count(base) > 0) {
                auto first = std::find(path.begin(), path.end(), base);
                cycle_members.insert(first, path.end());
                break;
            }
            auto it = out.find(base);
            if (it == out.end()) {
                auto resolved = resolver(base);
                if (!resolved || resolved->kind != ArtifactKind::model) {
                    const std::string note = current->id + " -> " + base;
                    reported_dangling.insert(note);
                    break;
                }
                resolved->id = base;
                it = out.emplace(base, std::move(*resolved)).first;
            }
            path.push_back(base);
            on_path.insert(base);
            current = &it->second;
        }
    }
    LineageResult result;
    for (auto& [_, r] : out) {
        result.models.push_back(std::move(r));
    }
    result.warnings.dangling.assign(reported_dangling.begin(), reported_dangling.end());
    result.warnings.cycles.assign(cycle_members.begin(), cycle_members.end());
    return result;
}

struct DatasetResolution {
    std::vector<std::string> resolved;    // fully-qualified ids, sorted, unique
    std::vector<std::string> unresolved;  // raw refs as written

    friend bool operator==(const DatasetResolution&, const DatasetResolution&) = default;
};

/// Trims each raw ref and resolves it verbatim; on failure, retries once with
/// the organization segment lowercased.
inline DatasetResolution resolve_dataset_refs(const ArtifactRecord& model, const DatasetRefResolver& resolver)
{
    std::set<std::string> resolved;
    std::set<std::string> unresolved;
    for (const auto& raw : model.dataset_refs) {
        const std::string ref(trim(raw));
        if (ref.empty()) {
            continue;
        }
        auto hit = resolver(ref);
        if (!hit) {
            if (auto slash = ref.find('/'); slash != std::string::npos) {
                const std::string lowered = to_lower_ascii(ref.substr(0, slash)) + ref.substr(slash);
                if (lowered != ref) {
                    hit = resolver(lowered);
                }
            }
        }
        if (hit) {
            resolved.insert(*hit);
        } else {
            unresolved.insert(raw);
        }
    }
    return {{resolved.begin(), resolved.end()}, {unresolved.begin(), unresolved.end()}};
}

/// Offline dataset resolution over known dataset ids plus a resolver cache
/// populated by earlier live lookups. Order: cache, exact id, unique name match.
class SnapshotDatasetResolver {
public:
    SnapshotDatasetResolver(const std::vector<ArtifactRecord>& datasets, const ResolverCache* cache = nullptr)
        : cache_(cache)
    {
        for (const auto& d : datasets) {
            if (d.kind != ArtifactKind::dataset) {
                continue;
            }
            known_.insert(d.id);
            const auto slash = d.id.rfind('/');
            by_name_[slash == std::string::npos ? d.id : d.id.substr(slash + 1)].insert(d.id);
        }
    }

    std::optional<std::string> operator()(std::string_view raw) const
    {
        const std::string ref(raw);
        if (cache_) {
            if (auto cached = cache_->get(ref)) {
                return *cached;
            }
        }
        if (known_.count(ref) > 0) {
            return ref;
        }
        if (ref.find('/') == std::string::npos) {
            auto it = by_name_.find(ref);
            if (it != by_name_.end() && it->second.size() == 1) {
                return *it->second.begin();
            }
        }
        return std::nullopt;
    }

private:
    const ResolverCache* cache_ = nullptr;
    std::set<std::string> known_;
    std::map<std::string, std::set<std::string>> by_name_;
};

}  // namespace chainaudit::graph

#endif  // CHAINAUDIT_GRAPH_LINEAGE_HPP
