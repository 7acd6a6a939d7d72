#pragma once
#ifndef CHAINAUDIT_CLI_LIVE_HPP
#define CHAINAUDIT_CLI_LIVE_HPP

#include <algorithm>
#include <cctype>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "chainaudit/cli/config.hpp"
#include "chainaudit/cli/sources.hpp"
#include "chainaudit/common.hpp"
#include "chainaudit/graph/lineage.hpp"
#include "chainaudit/graph/types.hpp"
#include "chainaudit/retrieval/patterns.hpp"

namespace chainaudit::cli {

/// Retriable: rerunning after the condition clears resumes from the cache.
struct RetriableError : Error {
    using Error::Error;
};

struct AuthError : RetriableError {
    using RetriableError::RetriableError;
};

struct QuotaExhaustedError : RetriableError {
    using RetriableError::RetriableError;
};

struct HttpRequest {
    std::string base_url;
    std::string path;  // includes the query string
    std::map<std::string, std::string> headers;
};

struct HttpResponse {
    int status = 0;  // 0: transport failure
    std::string body;
    std::map<std::string, std::string> headers;  // lowercased names
};

using HttpTransport = std::function<HttpResponse(const HttpRequest&)>;

inline HttpTransport httplib_transport(std::chrono::seconds timeout = std::chrono::seconds(60))
{
    return [timeout](const HttpRequest& req) {
        httplib::Client client(req.base_url);
        client.set_follow_location(true);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        httplib::Headers headers(req.headers.begin(), req.headers.end());
        HttpResponse out;
        auto res = client.Get(req.path, headers);
        if (!res) {
            out.body = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        out.body = res->body;
        for (const auto& [k, v] : res->headers) {
            out.headers[to_lower_ascii(k)] = v;
        }
        return out;
    };
}

using Clock = std::function<std::chrono::milliseconds()>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline Clock steady_clock_ms()
{
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now().time_since_epoch());
    };
}

inline Sleeper thread_sleeper()
{
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

/// Spaces requests at least `interval` apart. Thread-safe.
class RateLimiter {
public:
    explicit RateLimiter(std::chrono::milliseconds interval, Clock clock = steady_clock_ms(),
                         Sleeper sleeper = thread_sleeper())
        : interval_(interval), clock_(std::move(clock)), sleeper_(std::move(sleeper))
    {
    }

    static RateLimiter per_second(double requests, Clock clock = steady_clock_ms(), Sleeper sleeper = thread_sleeper())
    {
        const auto ms = requests > 0 ? static_cast<std::int64_t>(1000.0 / requests) : 0;
        return RateLimiter(std::chrono::milliseconds(ms), std::move(clock), std::move(sleeper));
    }

    void acquire()
    {
        std::lock_guard lock(mutex_);
        const auto now = clock_();
        if (started_ && now < next_) {
            sleeper_(next_ - now);
            next_ += interval_;
        } else {
            next_ = now + interval_;
        }
        started_ = true;
    }

private:
    std::chrono::milliseconds interval_;
    Clock clock_;
    Sleeper sleeper_;
    std::mutex mutex_;
    bool started_ = false;
    std::chrono::milliseconds next_{0};
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::milliseconds max_backoff{60000};
};

inline std::string url_encode_path(std::string_view path)
{
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : path) {
        if (std::isalnum(c) || c == '/' || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

/// GET with rate limiting and backoff. 404 is a normal miss; 401/403 fail
/// authentication; 429 (or 403 with an exhausted rate-limit header) backs
/// off and finally raises QuotaExhaustedError.
class ApiClient {
public:
    ApiClient(std::string base_url, std::optional<std::string> token, HttpTransport transport,
              std::shared_ptr<RateLimiter> limiter, RetryPolicy retry = {}, Sleeper sleeper = thread_sleeper())
        : base_(std::move(base_url)),
          token_(std::move(token)),
          transport_(std::move(transport)),
          limiter_(std::move(limiter)),
          retry_(retry),
          sleeper_(std::move(sleeper))
    {
        while (!base_.empty() && base_.back() == '/') {
            base_.pop_back();
        }
    }

    [[nodiscard]] bool authenticated() const { return token_.has_value(); }
    [[nodiscard]] const std::string& base_url() const { return base_; }

    std::optional<HttpResponse> get(const std::string& path, std::map<std::string, std::string> headers = {})
    {
        if (token_) {
            headers["Authorization"] = "Bearer " + *token_;
        }
        headers.emplace("User-Agent", std::string(kToolName) + "/" + std::string(kToolVersion));
        auto backoff = retry_.initial_backoff;
        HttpResponse res;
        for (int attempt = 1;; ++attempt) {
            if (limiter_) {
                limiter_->acquire();
            }
            res = transport_({base_, path, headers});
            const bool quota = res.status == 429 || (res.status == 403 && header(res, "x-ratelimit-remaining") == "0");
            if (res.status >= 200 && res.status < 300) {
                return res;
            }
            if (res.status == 404 || res.status == 410) {
                return std::nullopt;
            }
            if (!quota && (res.status == 401 || res.status == 403)) {
                throw AuthError(base_ + path + ": HTTP " + std::to_string(res.status));
            }
            const bool transient = quota || res.status == 0 || res.status >= 500;
            if (!transient) {
                throw IoError(base_ + path + ": HTTP " + std::to_string(res.status));
            }
            if (attempt >= retry_.max_attempts) {
                if (quota) {
                    throw QuotaExhaustedError(base_ + ": request quota exhausted");
                }
                throw IoError(base_ + path + ": " + (res.status == 0 ? res.body : "HTTP " + std::to_string(res.status)));
            }
            auto wait = backoff;
            if (auto after = header(res, "retry-after"); !after.empty()) {
                try {
                    wait = std::chrono::seconds(std::stoll(after));
                } catch (const std::exception&) {
                }
            }
            sleeper_(std::min(wait, retry_.max_backoff));
            backoff = std::min(backoff * 2, retry_.max_backoff);
        }
    }

    std::optional<nlohmann::json> get_json(const std::string& path)
    {
        auto res = get(path, {{"Accept", "application/json"}});
        if (!res) {
            return std::nullopt;
        }
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded()) {
            throw FormatError(base_ + path + ": response is not JSON");
        }
        return j;
    }

private:
    static std::string header(const HttpResponse& r, const std::string& name)
    {
        auto it = r.headers.find(name);
        return it == r.headers.end() ? std::string() : it->second;
    }

    std::string base_;
    std::optional<std::string> token_;
    HttpTransport transport_;
    std::shared_ptr<RateLimiter> limiter_;
    RetryPolicy retry_;
    Sleeper sleeper_;
};

/// Metadata, tree and file access for one platform.
class PlatformClient {
public:
    virtual ~PlatformClient() = default;
    [[nodiscard]] virtual graph::Platform platform() const = 0;
    [[nodiscard]] virtual bool authenticated() const = 0;
    virtual std::optional<graph::ArtifactRecord> record(graph::ArtifactKind kind, const std::string& id) = 0;
    virtual std::optional<std::vector<retrieval::TreeEntry>> tree(graph::ArtifactKind kind, const std::string& id) = 0;
    virtual std::optional<std::string> file(graph::ArtifactKind kind, const std::string& id, const std::string& path) = 0;
};

namespace detail {

inline std::vector<std::string> string_or_list(const nlohmann::json& j, const char* field)
{
    std::vector<std::string> out;
    if (!j.is_object() || !j.contains(field)) {
        return out;
    }
    const auto& v = j[field];
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
    } else if (v.is_array()) {
        for (const auto& e : v) {
            if (e.is_string()) out.push_back(e.get<std::string>());
        }
    }
    return out;
}

inline std::vector<std::string> tag_values(const nlohmann::json& j, std::string_view prefix)
{
    std::vector<std::string> out;
    if (!j.contains("tags") || !j["tags"].is_array()) {
        return out;
    }
    for (const auto& t : j["tags"]) {
        if (!t.is_string()) continue;
        const auto s = t.get<std::string>();
        if (s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0) {
            out.push_back(s.substr(prefix.size()));
        }
    }
    return out;
}

inline std::uint64_t count_field(const nlohmann::json& j, const char* field)
{
    return j.contains(field) && j[field].is_number_integer() ? j[field].get<std::uint64_t>() : 0;
}

}  // namespace detail

/// Record from a hub metadata response. Card data wins over tags.
inline graph::ArtifactRecord hub_record_from_api(graph::ArtifactKind kind, const nlohmann::json& j,
                                                 std::optional<std::uint64_t> followers = std::nullopt)
{
    graph::ArtifactRecord r;
    r.kind = kind;
    r.platform = graph::Platform::hub;
    r.id = j.value("id", j.value("modelId", std::string()));
    if (r.id.empty()) {
        throw FormatError("hub response has no id");
    }
    r.engagement = detail::count_field(j, "likes");
    if (j.contains("author") && j["author"].is_string()) {
        r.organization = j["author"].get<std::string>();
    }
    r.follower_count = followers;
    const nlohmann::json card = j.contains("cardData") && j["cardData"].is_object() ? j["cardData"] : nlohmann::json::object();
    auto licenses = detail::string_or_list(card, "license");
    if (licenses.empty()) licenses = detail::tag_values(j, "license:");
    if (!licenses.empty()) r.declared_license = licenses.front();
    if (kind == graph::ArtifactKind::model) {
        r.dataset_refs = detail::string_or_list(card, "datasets");
        if (r.dataset_refs.empty()) r.dataset_refs = detail::tag_values(j, "dataset:");
        auto bases = detail::string_or_list(card, "base_model");
        if (bases.empty()) {
            for (auto& b : detail::tag_values(j, "base_model:")) {
                // relation-qualified tags look like "finetune:org/name"
                auto colon = b.find(':');
                bases.push_back(colon == std::string::npos ? b : b.substr(colon + 1));
            }
        }
        if (!bases.empty()) r.base_model_ref = bases.front();
    }
    return r;
}

/// Record from a forge repository response.
inline graph::ArtifactRecord forge_record_from_api(const nlohmann::json& j,
                                                   std::optional<std::uint64_t> followers = std::nullopt)
{
    graph::ArtifactRecord r;
    r.kind = graph::ArtifactKind::application;
    r.platform = graph::Platform::forge;
    r.id = j.value("full_name", std::string());
    if (r.id.empty()) {
        throw FormatError("forge response has no full_name");
    }
    r.engagement = detail::count_field(j, "stargazers_count");
    if (j.contains("license") && j["license"].is_object()) {
        const auto spdx = j["license"].value("spdx_id", std::string());
        if (!spdx.empty() && spdx != "NOASSERTION") r.declared_license = spdx;
    }
    if (j.contains("owner") && j["owner"].is_object() && j["owner"].contains("login")) {
        r.organization = j["owner"]["login"].get<std::string>();
    }
    r.follower_count = followers;
    return r;
}

class HubClient : public PlatformClient {
public:
    explicit HubClient(std::shared_ptr<ApiClient> api) : api_(std::move(api)) {}

    [[nodiscard]] graph::Platform platform() const override { return graph::Platform::hub; }
    [[nodiscard]] bool authenticated() const override { return api_->authenticated(); }

    std::optional<graph::ArtifactRecord> record(graph::ArtifactKind kind, const std::string& id) override
    {
        auto j = api_->get_json("/api/" + collection(kind) + "/" + url_encode_path(id));
        if (!j) {
            return std::nullopt;
        }
        auto r = hub_record_from_api(kind, *j);
        if (r.organization) {
            r.follower_count = followers(*r.organization);
        }
        return r;
    }

    std::optional<std::vector<retrieval::TreeEntry>> tree(graph::ArtifactKind kind, const std::string& id) override
    {
        auto j = api_->get_json("/api/" + collection(kind) + "/" + url_encode_path(id) + "/tree/main?recursive=true");
        if (!j || !j->is_array()) {
            return std::nullopt;
        }
        std::vector<retrieval::TreeEntry> out;
        for (const auto& e : *j) {
            if (e.value("type", std::string()) != "file") continue;
            std::uint64_t size = detail::count_field(e, "size");
            if (e.contains("lfs") && e["lfs"].is_object()) size = detail::count_field(e["lfs"], "size");
            out.push_back({e.value("path", std::string()), size});
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
        return out;
    }

    std::optional<std::string> file(graph::ArtifactKind kind, const std::string& id, const std::string& path) override
    {
        const std::string prefix = kind == graph::ArtifactKind::dataset ? "/datasets/" : "/";
        auto res = api_->get(prefix + url_encode_path(id) + "/resolve/main/" + url_encode_path(path));
        if (!res) {
            return std::nullopt;
        }
        return res->body;
    }

    /// Org follower count, falling back to the user endpoint.
    std::optional<std::uint64_t> followers(const std::string& owner)
    {
        {
            std::lock_guard lock(mutex_);
            if (auto it = followers_.find(owner); it != followers_.end()) return it->second;
        }
        std::optional<std::uint64_t> n;
        for (const char* scope : {"/api/organizations/", "/api/users/"}) {
            if (auto j = api_->get_json(scope + url_encode_path(owner) + "/overview")) {
                if (j->contains("numFollowers")) n = detail::count_field(*j, "numFollowers");
                break;
            }
        }
        std::lock_guard lock(mutex_);
        followers_[owner] = n;
        return n;
    }

    std::optional<std::string> dataset_exists(const std::string& ref)
    {
        auto j = api_->get_json("/api/datasets/" + url_encode_path(ref));
        if (!j) return std::nullopt;
        return j->value("id", ref);
    }

private:
    static std::string collection(graph::ArtifactKind kind)
    {
        return kind == graph::ArtifactKind::dataset ? "datasets" : "models";
    }

    std::shared_ptr<ApiClient> api_;
    std::mutex mutex_;
    std::map<std::string, std::optional<std::uint64_t>> followers_;
};

class ForgeClient : public PlatformClient {
public:
    explicit ForgeClient(std::shared_ptr<ApiClient> api) : api_(std::move(api)) {}

    [[nodiscard]] graph::Platform platform() const override { return graph::Platform::forge; }
    [[nodiscard]] bool authenticated() const override { return api_->authenticated(); }

    std::optional<graph::ArtifactRecord> record(graph::ArtifactKind, const std::string& id) override
    {
        auto j = repo(id);
        if (!j) {
            return std::nullopt;
        }
        std::optional<std::uint64_t> followers;
        if (j->contains("owner") && (*j)["owner"].contains("login")) {
            if (auto u = api_->get_json("/users/" + url_encode_path((*j)["owner"]["login"].get<std::string>()))) {
                followers = detail::count_field(*u, "followers");
            }
        }
        return forge_record_from_api(*j, followers);
    }

    std::optional<std::vector<retrieval::TreeEntry>> tree(graph::ArtifactKind, const std::string& id) override
    {
        auto branch = default_branch(id);
        if (!branch) {
            return std::nullopt;
        }
        auto j = api_->get_json("/repos/" + url_encode_path(id) + "/git/trees/" + url_encode_path(*branch) +
                                "?recursive=1");
        if (!j || !j->contains("tree")) {
            return std::nullopt;
        }
        std::vector<retrieval::TreeEntry> out;
        for (const auto& e : (*j)["tree"]) {
            if (e.value("type", std::string()) != "blob") continue;
            out.push_back({e.value("path", std::string()), detail::count_field(e, "size")});
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
        return out;
    }

    std::optional<std::string> file(graph::ArtifactKind, const std::string& id, const std::string& path) override
    {
        auto branch = default_branch(id);
        if (!branch) {
            return std::nullopt;
        }
        auto res = api_->get("/repos/" + url_encode_path(id) + "/contents/" + url_encode_path(path) + "?ref=" +
                                 url_encode_path(*branch),
                             {{"Accept", "application/vnd.github.raw"}});
        if (!res) {
            return std::nullopt;
        }
        return res->body;
    }

private:
    std::optional<nlohmann::json> repo(const std::string& id)
    {
        {
            std::lock_guard lock(mutex_);
            if (auto it = repos_.find(id); it != repos_.end()) return it->second;
        }
        auto j = api_->get_json("/repos/" + url_encode_path(id));
        std::lock_guard lock(mutex_);
        repos_[id] = j;
        return j;
    }

    std::optional<std::string> default_branch(const std::string& id)
    {
        auto j = repo(id);
        if (!j) return std::nullopt;
        return j->value("default_branch", std::string("main"));
    }

    std::shared_ptr<ApiClient> api_;
    std::mutex mutex_;
    std::map<std::string, std::optional<nlohmann::json>> repos_;
};

inline graph::Platform platform_of(graph::ArtifactKind kind)
{
    return kind == graph::ArtifactKind::application ? graph::Platform::forge : graph::Platform::hub;
}

struct LiveFetchResult {
    std::vector<graph::ArtifactRecord> records;  // in input order
    std::vector<std::string> unresolved;
    std::size_t network_lookups = 0;
};

inline std::string live_cache_key(graph::Platform p, graph::ArtifactKind kind, const std::string& id)
{
    return "live:" + std::string(graph::to_string(p)) + ":" + std::string(graph::to_string(kind)) + ":" + id;
}

/// Fetches metadata records for `ids`. Each answer, including a miss, is
/// persisted to `progress` before the next request, so a run interrupted by
/// an auth or quota error resumes with only the remaining ids.
inline LiveFetchResult fetch_live(PlatformClient& client, graph::ArtifactKind kind, const std::vector<std::string>& ids,
                                  graph::ResolverCache& progress)
{
    if (!client.authenticated()) {
        throw AuthError(std::string("no credentials for ") + std::string(graph::to_string(client.platform())) +
                        "; set " + (client.platform() == graph::Platform::hub ? kHubTokenEnv : kForgeTokenEnv));
    }
    LiveFetchResult out;
    for (const auto& raw : ids) {
        const std::string id(trim(raw));
        if (id.empty()) continue;
        const auto key = live_cache_key(client.platform(), kind, id);
        std::optional<std::string> value;
        if (auto cached = progress.get(key)) {
            value = *cached;
        } else {
            ++out.network_lookups;
            auto rec = client.record(kind, id);
            value = rec ? std::optional(graph::to_json(*rec).dump()) : std::nullopt;
            progress.put(key, value);
        }
        if (value) {
            out.records.push_back(graph::record_from_json(nlohmann::json::parse(*value)));
        } else {
            out.unresolved.push_back(id);
        }
    }
    return out;
}

/// Repository access through the live platform clients.
class LiveRepositorySource : public RepositorySource {
public:
    LiveRepositorySource(std::shared_ptr<PlatformClient> hub, std::shared_ptr<PlatformClient> forge)
        : hub_(std::move(hub)), forge_(std::move(forge))
    {
    }

    std::optional<std::vector<retrieval::TreeEntry>> tree(const graph::NodeKey& a) override
    {
        return client_for(a.kind).tree(a.kind, a.id);
    }

    retrieval::FileClient client(const graph::NodeKey& a) override
    {
        return [this, a](std::string_view path) { return client_for(a.kind).file(a.kind, a.id, std::string(path)); };
    }

private:
    PlatformClient& client_for(graph::ArtifactKind kind)
    {
        auto& c = platform_of(kind) == graph::Platform::hub ? hub_ : forge_;
        if (!c) throw ConfigError("no live client for " + std::string(graph::to_string(platform_of(kind))));
        return *c;
    }

    std::shared_ptr<PlatformClient> hub_;
    std::shared_ptr<PlatformClient> forge_;
};

/// Dataset-ref resolution against the hub, remembered in the resolver cache.
class LiveDatasetResolver {
public:
    LiveDatasetResolver(std::shared_ptr<HubClient> hub, graph::ResolverCache* cache)
        : hub_(std::move(hub)), cache_(cache)
    {
    }

    std::optional<std::string> operator()(std::string_view raw) const
    {
        const std::string ref(raw);
        if (cache_) {
            if (auto cached = cache_->get(ref)) return *cached;
        }
        auto hit = hub_->dataset_exists(ref);
        if (cache_) cache_->put(ref, hit);
        return hit;
    }

private:
    std::shared_ptr<HubClient> hub_;
    graph::ResolverCache* cache_;
};

}  // namespace chainaudit::cli

#endif  // CHAINAUDIT_CLI_LIVE_HPP
