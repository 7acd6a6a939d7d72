#pragma once
#ifndef CHAINAUDIT_CLI_SOURCES_HPP
#define CHAINAUDIT_CLI_SOURCES_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainaudit/graph/types.hpp"
#include "chainaudit/retrieval/fetch.hpp"
#include "chainaudit/retrieval/patterns.hpp"

namespace chainaudit::cli {

/// Where repository trees and file bytes come from.
class RepositorySource {
public:
    virtual ~RepositorySource() = default;
    /// nullopt when the repository itself cannot be reached.
    virtual std::optional<std::vector<retrieval::TreeEntry>> tree(const graph::NodeKey& artifact) = 0;
    virtual retrieval::FileClient client(const graph::NodeKey& artifact) = 0;
};

/// Local mirror laid out as <root>/<kind>/<id>/<path>. An optional tree
/// listing overrides the on-disk listing (used to model very large files).
/// An empty root means no mirror.
class LocalRepositorySource : public RepositorySource {
public:
    explicit LocalRepositorySource(std::filesystem::path root,
                                   std::map<std::string, std::vector<retrieval::TreeEntry>> listing = {})
        : root_(std::move(root)), listing_(std::move(listing))
    {
    }

    [[nodiscard]] std::filesystem::path repo_dir(const graph::NodeKey& a) const
    {
        return root_ / std::string(graph::to_string(a.kind)) / a.id;
    }

    std::optional<std::vector<retrieval::TreeEntry>> tree(const graph::NodeKey& a) override
    {
        namespace fs = std::filesystem;
        if (auto it = listing_.find(a.id); it != listing_.end()) {
            return it->second;
        }
        const auto dir = repo_dir(a);
        if (root_.empty() || !fs::is_directory(dir)) {
            return std::nullopt;
        }
        std::vector<retrieval::TreeEntry> entries;
        for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator(); ++it) {
            if (it->is_directory() && it->path().filename() == ".git") {
                it.disable_recursion_pending();
                continue;
            }
            if (it->is_regular_file()) {
                entries.push_back({fs::relative(it->path(), dir).generic_string(), it->file_size()});
            }
        }
        std::sort(entries.begin(), entries.end(),
                  [](const retrieval::TreeEntry& x, const retrieval::TreeEntry& y) { return x.path < y.path; });
        return entries;
    }

    retrieval::FileClient client(const graph::NodeKey& a) override
    {
        return [dir = repo_dir(a), mirrored = !root_.empty()](std::string_view path) -> std::optional<std::string> {
            const auto file = dir / std::string(path);
            if (!mirrored || !std::filesystem::is_regular_file(file)) {
                return std::nullopt;
            }
            return read_file(file);
        };
    }

private:
    std::filesystem::path root_;
    std::map<std::string, std::vector<retrieval::TreeEntry>> listing_;
};

/// Tree listing JSONL: {"artifact_id", "path", "size_bytes"} per line.
inline std::map<std::string, std::vector<retrieval::TreeEntry>> load_tree_listing(const std::filesystem::path& path)
{
    std::map<std::string, std::vector<retrieval::TreeEntry>> out;
    std::size_t line_no = 0;
    const std::string text = read_file(path);
    for (auto line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        try {
            auto j = nlohmann::json::parse(line);
            out[j.at("artifact_id").get<std::string>()].push_back(
                {j.at("path").get<std::string>(), j.at("size_bytes").get<std::uint64_t>()});
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (auto& [_, entries] : out) {
        std::sort(entries.begin(), entries.end(),
                  [](const retrieval::TreeEntry& x, const retrieval::TreeEntry& y) { return x.path < y.path; });
    }
    return out;
}

}  // namespace chainaudit::cli

#endif  // CHAINAUDIT_CLI_SOURCES_HPP
