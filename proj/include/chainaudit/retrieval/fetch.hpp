#pragma once
#ifndef CHAINAUDIT_RETRIEVAL_FETCH_HPP
#define CHAINAUDIT_RETRIEVAL_FETCH_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "chainaudit/common.hpp"
#include "chainaudit/parallel.hpp"
#include "chainaudit/retrieval/patterns.hpp"
#include "chainaudit/retrieval/types.hpp"
#include "chainaudit/unicode.hpp"

namespace chainaudit::retrieval {

/// Returns the raw bytes at a repository-relative path, or nullopt when the
/// path does not resolve (404). Transport errors may throw.
using FileClient = std::function<std::optional<std::string>(std::string_view path)>;

struct FetchFailure {
    std::string path;
    std::string reason;

    friend bool operator==(const FetchFailure&, const FetchFailure&) = default;
};

struct FetchResult {
    std::vector<RetrievedFile> files;
    std::vector<FetchFailure> failures;

    /// False only when something was planned and nothing arrived.
    [[nodiscard]] bool retrievable(std::size_t planned) const { return planned == 0 || !files.empty(); }
};

/// Content-addressed store: objects/<hash[0:2]>/<hash> plus an in-memory
/// (artifact, path) -> hash index. Safe for concurrent use.
class ContentCache {
public:
    explicit ContentCache(std::filesystem::path root) : root_(std::move(root))
    {
        std::filesystem::create_directories(root_ / "objects");
        const auto index = index_path();
        if (std::filesystem::exists(index)) {
            const std::string text = read_file(index);
            for (auto line : split_lines(text)) {
                auto j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_object() && j.contains("artifact") && j.contains("path") && j.contains("hash")) {
                    index_[{j["artifact"].get<std::string>(), j["path"].get<std::string>()}] =
                        j["hash"].get<std::string>();
                }
            }
        }
    }

    [[nodiscard]] std::filesystem::path index_path() const { return root_ / "index.jsonl"; }

    /// Rewrites index.jsonl, sorted by (artifact, path).
    void save_index() const
    {
        std::string out;
        {
            std::lock_guard lock(mutex_);
            for (const auto& [key, hash] : index_) {
                nlohmann::ordered_json j;
                j["artifact"] = key.first;
                j["path"] = key.second;
                j["hash"] = hash;
                out += j.dump();
                out += '\n';
            }
        }
        write_file_atomic(index_path(), out);
    }

    [[nodiscard]] const std::filesystem::path& root() const { return root_; }

    [[nodiscard]] std::filesystem::path object_path(const std::string& hash) const
    {
        return root_ / "objects" / hash.substr(0, 2) / hash;
    }

    std::string put(const std::string& artifact_key, const std::string& path, std::string_view bytes)
    {
        const std::string hash = sha256_hex(bytes);
        const auto object = object_path(hash);
        if (!std::filesystem::exists(object)) {
            write_file_atomic(object, bytes);
        }
        std::lock_guard lock(mutex_);
        index_[{artifact_key, path}] = hash;
        return hash;
    }

    [[nodiscard]] std::optional<std::string> lookup(const std::string& artifact_key, const std::string& path) const
    {
        std::lock_guard lock(mutex_);
        auto it = index_.find({artifact_key, path});
        if (it == index_.end() || !std::filesystem::exists(object_path(it->second))) {
            return std::nullopt;
        }
        return it->second;
    }

    [[nodiscard]] std::string read_object(const std::string& hash) const { return read_file(object_path(hash)); }

    void remember(const std::string& artifact_key, const std::string& path, const std::string& hash)
    {
        std::lock_guard lock(mutex_);
        index_[{artifact_key, path}] = hash;
    }

private:
    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, std::string> index_;
};

/// Fetches each planned path, decodes lossily as UTF-8, and caches the raw
/// bytes. Per-path failures are recorded and do not abort the artifact.
inline FetchResult fetch_files(const std::string& artifact_id, const RetrievalPlan& plan, const FileClient& client,
                               ContentCache* cache = nullptr, std::uint64_t max_file_bytes = kDefaultMaxFileBytes,
                               const std::string& cache_key = {})
{
    FetchResult result;
    const std::string& key = cache_key.empty() ? artifact_id : cache_key;
    for (const auto& planned : plan.files) {
        std::optional<std::string> bytes;
        std::string hash;
        if (cache) {
            if (auto cached = cache->lookup(key, planned.path)) {
                bytes = cache->read_object(*cached);
                hash = *cached;
            }
        }
        if (!bytes) {
            try {
                bytes = client(planned.path);
            } catch (const std::exception& e) {
                result.failures.push_back({planned.path, std::string("error: ") + e.what()});
                continue;
            }
            if (!bytes) {
                result.failures.push_back({planned.path, "not found"});
                continue;
            }
        }
        if (bytes->size() > max_file_bytes) {
            result.failures.push_back({planned.path, "oversize"});
            continue;
        }
        if (hash.empty()) {
            hash = cache ? cache->put(key, planned.path, *bytes) : sha256_hex(*bytes);
        }
        RetrievedFile file;
        file.artifact_id = artifact_id;
        file.path = planned.path;
        file.file_class = planned.file_class;
        file.size_bytes = bytes->size();
        file.content = unicode::decode_utf8_lossy(*bytes);
        file.content_hash = std::move(hash);
        result.files.push_back(std::move(file));
    }
    return result;
}

}  // namespace chainaudit::retrieval

#endif  // CHAINAUDIT_RETRIEVAL_FETCH_HPP
