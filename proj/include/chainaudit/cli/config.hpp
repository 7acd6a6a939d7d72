#pragma once
#ifndef CHAINAUDIT_CLI_CONFIG_HPP
#define CHAINAUDIT_CLI_CONFIG_HPP

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainaudit/common.hpp"
#include "chainaudit/license/detect.hpp"
#include "chainaudit/retrieval/types.hpp"

namespace chainaudit::cli {

namespace fs = std::filesystem;

inline constexpr const char* kHubTokenEnv = "CHAINAUDIT_HUB_TOKEN";
inline constexpr const char* kForgeTokenEnv = "CHAINAUDIT_FORGE_TOKEN";
inline constexpr const char* kCacheDirEnv = "CHAINAUDIT_CACHE_DIR";

inline std::optional<std::string> env_value(const char* name)
{
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') {
        return std::nullopt;
    }
    return std::string(v);
}

struct Endpoints {
    std::string hub = "https://huggingface.co";
    std::string forge = "https://api.github.com";
};

struct PipelineConfig {
    std::vector<fs::path> snapshots;
    std::optional<fs::path> code_hits;
    std::optional<fs::path> repos;         // local repository mirror: <repos>/<kind>/<id>/...
    std::optional<fs::path> tree_listing;  // optional JSONL of (artifact_id, path, size_bytes)
    fs::path templates = default_data_dir() / "templates";
    fs::path signatures = default_data_dir() / "signatures.txt";
    fs::path aliases = default_data_dir() / "aliases.txt";
    fs::path categories = default_data_dir() / "categories.txt";
    std::optional<fs::path> resolver_cache;
    std::optional<fs::path> cache_dir;
    fs::path out_dir = "chainaudit-out";

    std::uint64_t min_likes = 1;
    std::uint64_t min_stars = 1;
    double coverage_threshold = license::kPresentCoverage;
    std::uint64_t max_file_mb = retrieval::kDefaultMaxFileBytes >> 20;
    std::vector<std::string> permissive_labels{"mit", "apache-2.0", "bsd-3-clause"};
    std::size_t top_orgs = 15;
    std::size_t workers = 4;

    bool live = false;
    Endpoints endpoints;
    std::optional<std::string> hub_token;    // environment only
    std::optional<std::string> forge_token;  // environment only

    [[nodiscard]] std::uint64_t max_file_bytes() const { return max_file_mb << 20; }

    [[nodiscard]] fs::path effective_cache_dir() const
    {
        if (cache_dir) return *cache_dir;
        if (auto env = env_value(kCacheDirEnv)) return *env;
        return out_dir / "cache";
    }

    /// Parameters that shape outputs. Paths that only locate outputs or
    /// caches are left out so equal inputs give equal manifests.
    [[nodiscard]] nlohmann::ordered_json parameters_json() const
    {
        nlohmann::ordered_json j;
        j["min_likes"] = min_likes;
        j["min_stars"] = min_stars;
        j["coverage_threshold"] = coverage_threshold;
        j["max_file_mb"] = max_file_mb;
        j["permissive_labels"] = permissive_labels;
        j["top_orgs"] = top_orgs;
        j["live"] = live;
        if (live) {
            j["endpoints"] = {{"hub", endpoints.hub}, {"forge", endpoints.forge}};
        }
        return j;
    }
};

namespace detail {

inline fs::path resolve_against(const fs::path& base, const std::string& p)
{
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace detail

/// Reads a JSON config. Relative paths are taken relative to the config
/// file's directory. Credentials are refused: they come from the environment.
inline PipelineConfig parse_config(const nlohmann::json& j, const fs::path& base_dir = {})
{
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const std::vector<std::string> known{
        "snapshots", "code_hits", "repos", "tree_listing", "templates", "signatures", "aliases", "categories",
        "resolver_cache", "cache_dir", "out_dir", "min_likes", "min_stars", "coverage_threshold", "max_file_mb",
        "permissive_labels", "top_orgs", "workers", "live", "endpoints"};
    for (const auto& [key, _] : j.items()) {
        const std::string lower = to_lower_ascii(key);
        if (lower.find("token") != std::string::npos || lower.find("password") != std::string::npos ||
            lower.find("secret") != std::string::npos) {
            throw ConfigError("config key '" + key + "': credentials are read from " + kHubTokenEnv + " and " +
                              kForgeTokenEnv + " only");
        }
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    PipelineConfig c;
    auto path_of = [&](const char* key) { return detail::resolve_against(base_dir, j.at(key).get<std::string>()); };
    try {
        if (j.contains("snapshots")) {
            const auto& s = j["snapshots"];
            if (s.is_string()) {
                c.snapshots.push_back(path_of("snapshots"));
            } else {
                for (const auto& p : s) c.snapshots.push_back(detail::resolve_against(base_dir, p.get<std::string>()));
            }
        }
        if (j.contains("code_hits")) c.code_hits = path_of("code_hits");
        if (j.contains("repos")) c.repos = path_of("repos");
        if (j.contains("tree_listing")) c.tree_listing = path_of("tree_listing");
        if (j.contains("templates")) c.templates = path_of("templates");
        if (j.contains("signatures")) c.signatures = path_of("signatures");
        if (j.contains("aliases")) c.aliases = path_of("aliases");
        if (j.contains("categories")) c.categories = path_of("categories");
        if (j.contains("resolver_cache")) c.resolver_cache = path_of("resolver_cache");
        if (j.contains("cache_dir")) c.cache_dir = path_of("cache_dir");
        if (j.contains("out_dir")) c.out_dir = path_of("out_dir");
        c.min_likes = j.value("min_likes", c.min_likes);
        c.min_stars = j.value("min_stars", c.min_stars);
        c.coverage_threshold = j.value("coverage_threshold", c.coverage_threshold);
        c.max_file_mb = j.value("max_file_mb", c.max_file_mb);
        if (j.contains("permissive_labels")) c.permissive_labels = j["permissive_labels"].get<std::vector<std::string>>();
        c.top_orgs = j.value("top_orgs", c.top_orgs);
        c.workers = j.value("workers", c.workers);
        c.live = j.value("live", c.live);
        if (j.contains("endpoints")) {
            c.endpoints.hub = j["endpoints"].value("hub", c.endpoints.hub);
            c.endpoints.forge = j["endpoints"].value("forge", c.endpoints.forge);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.hub_token = env_value(kHubTokenEnv);
    c.forge_token = env_value(kForgeTokenEnv);
    return c;
}

inline PipelineConfig load_config(const fs::path& path)
{
    if (!fs::exists(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    auto j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("config is not valid JSON: " + path.string());
    }
    return parse_config(j, path.parent_path());
}

/// Startup checks; every failure names the offending value or path.
inline void validate_config(const PipelineConfig& c)
{
    if (!(c.coverage_threshold > 0.0 && c.coverage_threshold <= 1.0)) {
        throw ConfigError("coverage_threshold must be in (0, 1]");
    }
    if (c.max_file_mb == 0) {
        throw ConfigError("max_file_mb must be positive");
    }
    if (c.permissive_labels.empty()) {
        throw ConfigError("permissive_labels must not be empty");
    }
    if (c.workers == 0) {
        throw ConfigError("workers must be positive");
    }
    if (!fs::is_directory(c.templates)) {
        throw ConfigError("template directory not found: " + c.templates.string());
    }
    for (const auto& [what, path] : std::vector<std::pair<std::string, fs::path>>{
             {"signature file", c.signatures}, {"alias table", c.aliases}, {"category table", c.categories}}) {
        if (!fs::exists(path)) {
            throw ConfigError(what + " not found: " + path.string());
        }
    }
    for (const auto& s : c.snapshots) {
        if (!fs::exists(s)) {
            throw ConfigError("snapshot not found: " + s.string());
        }
    }
    if (c.code_hits && !fs::exists(*c.code_hits)) {
        throw ConfigError("code hits file not found: " + c.code_hits->string());
    }
    if (c.repos && !fs::is_directory(*c.repos)) {
        throw ConfigError("repository directory not found: " + c.repos->string());
    }
    if (c.tree_listing && !fs::exists(*c.tree_listing)) {
        throw ConfigError("tree listing not found: " + c.tree_listing->string());
    }
}

}  // namespace chainaudit::cli

#endif  // CHAINAUDIT_CLI_CONFIG_HPP
