#pragma once
#ifndef CHAINAUDIT_CLI_PIPELINE_HPP
#define CHAINAUDIT_CLI_PIPELINE_HPP

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainaudit/audit/report.hpp"
#include "chainaudit/audit/scan.hpp"
#include "chainaudit/cli/config.hpp"
#include "chainaudit/cli/live.hpp"
#include "chainaudit/cli/sources.hpp"
#include "chainaudit/graph/disclosure.hpp"
#include "chainaudit/graph/ingest.hpp"
#include "chainaudit/graph/snapshot.hpp"
#include "chainaudit/license/labels.hpp"
#include "chainaudit/license/matcher.hpp"
#include "chainaudit/parallel.hpp"
#include "chainaudit/retrieval/fetch.hpp"
#include "chainaudit/retrieval/histogram.hpp"

namespace chainaudit::cli {

enum class Stage { ingest, fetch, scan, audit };

inline constexpr Stage kAllStages[] = {Stage::ingest, Stage::fetch, Stage::scan, Stage::audit};

inline std::string_view to_string(Stage s)
{
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::fetch: return "fetch";
        case Stage::scan: return "scan";
        case Stage::audit: return "audit";
    }
    return "ingest";
}

inline Stage stage_from_string(std::string_view s)
{
    for (auto st : kAllStages) {
        if (to_string(st) == s) return st;
    }
    throw ConfigError("unknown stage '" + std::string(s) + "'");
}

struct StageError : Error {
    StageError(Stage s, const std::string& what)
        : Error("stage " + std::string(to_string(s)) + " failed: " + what), stage(s)
    {
    }
    Stage stage = Stage::ingest;
};

struct StageDependencyError : Error {
    using Error::Error;
};

struct LockError : Error {
    using Error::Error;
};

// Output directory layout.
inline constexpr const char* kLockFile = ".chainaudit.lock";
inline constexpr const char* kGraphFile = "graph.jsonl";
inline constexpr const char* kIngestReportFile = "ingest_report.json";
inline constexpr const char* kRetrievalFile = "retrieval.jsonl";
inline constexpr const char* kScansFile = "scans.jsonl";
inline constexpr const char* kReportsDir = "reports";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kRunLogFile = "run_log.json";

/// Exclusive advisory lock on <dir>/.chainaudit.lock, released on destruction
/// or process exit.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir)
    {
        std::filesystem::create_directories(dir);
        path_ = dir / kLockFile;
        fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) {
            throw LockError("cannot open lock file " + path_.string());
        }
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            throw LockError("output directory is in use by another run: " + path_.string());
        }
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;
    ~OutputLock()
    {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

// retrieval.jsonl records

struct RetrievalRecord {
    graph::NodeKey key;
    bool reachable = false;
    std::vector<retrieval::PlannedFile> planned;
    std::vector<retrieval::SkippedFile> skipped;
    std::vector<audit::ScannedFile> files;
    std::vector<retrieval::FetchFailure> failures;
};

inline nlohmann::ordered_json to_json(const RetrievalRecord& r)
{
    nlohmann::ordered_json j;
    j["kind"] = graph::to_string(r.key.kind);
    j["id"] = r.key.id;
    j["reachable"] = r.reachable;
    j["planned"] = nlohmann::ordered_json::array();
    for (const auto& p : r.planned) {
        j["planned"].push_back({{"path", p.path}, {"class", retrieval::to_string(p.file_class)}, {"size_bytes", p.size_bytes}});
    }
    j["skipped"] = nlohmann::ordered_json::array();
    for (const auto& s : r.skipped) {
        j["skipped"].push_back({{"path", s.path}, {"size_bytes", s.size_bytes}, {"reason", s.reason}});
    }
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : r.files) {
        j["files"].push_back({{"path", f.path},
                              {"class", retrieval::to_string(f.file_class)},
                              {"size_bytes", f.size_bytes},
                              {"hash", f.hash}});
    }
    j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : r.failures) {
        j["failures"].push_back({{"path", f.path}, {"reason", f.reason}});
    }
    return j;
}

inline RetrievalRecord retrieval_record_from_json(const nlohmann::json& j)
{
    RetrievalRecord r;
    r.key = {graph::kind_from_string(j.at("kind").get<std::string>()), j.at("id").get<std::string>()};
    r.reachable = j.at("reachable").get<bool>();
    for (const auto& p : j.at("planned")) {
        r.planned.push_back({p.at("path").get<std::string>(),
                             retrieval::file_class_from_string(p.at("class").get<std::string>()),
                             p.at("size_bytes").get<std::uint64_t>()});
    }
    for (const auto& s : j.at("skipped")) {
        r.skipped.push_back(
            {s.at("path").get<std::string>(), s.at("size_bytes").get<std::uint64_t>(), s.at("reason").get<std::string>()});
    }
    for (const auto& f : j.at("files")) {
        r.files.push_back({f.at("path").get<std::string>(),
                           retrieval::file_class_from_string(f.at("class").get<std::string>()),
                           f.at("size_bytes").get<std::uint64_t>(), f.at("hash").get<std::string>()});
    }
    for (const auto& f : j.at("failures")) {
        r.failures.push_back({f.at("path").get<std::string>(), f.at("reason").get<std::string>()});
    }
    return r;
}

inline std::vector<RetrievalRecord> load_retrieval(const std::filesystem::path& path)
{
    std::vector<RetrievalRecord> out;
    std::size_t line_no = 0;
    const std::string text = read_file(path);
    for (auto line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(retrieval_record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

/// Plans and fetches compliance files for one artifact. An unreachable
/// repository yields an empty, unreachable record.
inline RetrievalRecord retrieve_artifact(const graph::NodeKey& key, RepositorySource& source,
                                         retrieval::ContentCache& cache, std::uint64_t max_file_bytes)
{
    RetrievalRecord rec;
    rec.key = key;
    auto tree = source.tree(key);
    if (!tree) {
        rec.failures.push_back({"", "repository unavailable"});
        return rec;
    }
    rec.reachable = true;
    auto plan = retrieval::select_files(*tree, retrieval::default_patterns(), max_file_bytes);
    auto fetched =
        retrieval::fetch_files(key.id, plan, source.client(key), &cache, max_file_bytes, graph::key_string(key));
    rec.planned = plan.files;
    rec.skipped = plan.skipped;
    for (const auto& f : fetched.files) {
        rec.files.push_back({f.path, f.file_class, f.size_bytes, f.content_hash});
    }
    rec.failures = fetched.failures;
    return rec;
}

/// Rebuilds the scan for one retrieval record from cached bytes.
inline audit::ArtifactScan scan_record(const RetrievalRecord& rec, const retrieval::ContentCache& cache,
                                       const license::TemplateCorpus& corpus)
{
    std::vector<retrieval::RetrievedFile> files;
    auto failures = rec.failures;
    for (const auto& f : rec.files) {
        const auto object = cache.object_path(f.hash);
        if (!std::filesystem::exists(object)) {
            failures.push_back({f.path, "missing from cache"});
            continue;
        }
        retrieval::RetrievedFile file;
        file.artifact_id = rec.key.id;
        file.path = f.path;
        file.file_class = f.file_class;
        file.size_bytes = f.size_bytes;
        file.content = unicode::decode_utf8_lossy(cache.read_object(f.hash));
        file.content_hash = f.hash;
        files.push_back(std::move(file));
    }
    auto scan = audit::scan_artifact(rec.key.kind, rec.key.id, std::move(files), std::move(failures),
                                     rec.planned.size(), corpus);
    scan.retrievable = scan.retrievable && rec.reachable;
    return scan;
}

/// Digest of a file, or of a directory as sorted (relative path, digest) pairs.
inline std::string path_digest(const std::filesystem::path& p)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(p)) {
        return sha256_file(p);
    }
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file()) {
            entries.emplace_back(fs::relative(e.path(), p).generic_string(), sha256_file(e.path()));
        }
    }
    std::sort(entries.begin(), entries.end());
    std::string joined;
    for (const auto& [rel, h] : entries) {
        joined += rel + '\0' + h + '\n';
    }
    return sha256_hex(joined);
}

struct StageTiming {
    Stage stage = Stage::ingest;
    double seconds = 0.0;
    bool ok = false;
    std::string error;
};

struct PipelineResult {
    std::vector<StageTiming> timings;
    std::optional<audit::AuditBundle> bundle;
    std::filesystem::path out_dir;
};

/// Hooks for tests and live runs; null members use the config defaults.
struct PipelineServices {
    std::shared_ptr<RepositorySource> repositories;
    std::shared_ptr<HubClient> hub;
    std::shared_ptr<ForgeClient> forge;
};

struct IngestOutputs {
    graph::SupplyGraph graph;
    nlohmann::ordered_json report;
    std::string disclosure_csv;
    std::string extensions_csv;
};

/// Snapshots and code hits to the pruned supply graph, plus the snapshot-level
/// disclosure and code-hit extension reports.
inline IngestOutputs run_ingest(const PipelineConfig& cfg, const PipelineServices& services = {})
{
    if (cfg.snapshots.empty()) {
        throw ConfigError("no snapshot configured");
    }
    std::vector<graph::SnapshotLoad> loads;
    for (const auto& p : cfg.snapshots) loads.push_back(graph::load_snapshot(p));
    auto snapshot = graph::merge_snapshots(std::move(loads));
    std::vector<graph::CodeHit> hits;
    if (cfg.code_hits) hits = graph::load_code_hits(*cfg.code_hits);
    const auto signatures = graph::load_signatures(cfg.signatures);

    std::optional<graph::ResolverCache> cache;
    if (cfg.resolver_cache) cache.emplace(*cfg.resolver_cache);
    graph::SnapshotDatasetResolver offline(graph::of_kind(snapshot.records, graph::ArtifactKind::dataset),
                                           cache ? &*cache : nullptr);
    graph::DatasetRefResolver resolver = offline;
    if (cfg.live && services.hub) {
        LiveDatasetResolver live(services.hub, cache ? &*cache : nullptr);
        resolver = [offline, live](std::string_view ref) {
            auto hit = offline(ref);
            return hit ? hit : live(ref);
        };
    }
    graph::IngestOptions opts{cfg.min_likes, cfg.min_stars, cfg.workers};
    auto result = graph::build_supply_graph(snapshot.records, hits, signatures, opts, resolver);

    IngestOutputs out;
    out.report = result.report.to_json();
    out.report["snapshot_records"] = snapshot.records.size();
    out.report["malformed_lines"] = snapshot.malformed_lines;
    out.report["duplicate_ids"] = snapshot.duplicate_ids;
    out.graph = std::move(result.graph);
    out.disclosure_csv = graph::disclosure_csv(graph::lineage_disclosure_stats(snapshot.records));
    std::vector<std::string> paths;
    for (const auto& h : hits) paths.push_back(h.path);
    out.extensions_csv = retrieval::file_extension_csv(paths);
    return out;
}

inline std::shared_ptr<RepositorySource> make_repository_source(const PipelineConfig& cfg,
                                                                const PipelineServices& services = {})
{
    if (services.repositories) return services.repositories;
    if (cfg.live) {
        return std::make_shared<LiveRepositorySource>(services.hub, services.forge);
    }
    std::map<std::string, std::vector<retrieval::TreeEntry>> listing;
    if (cfg.tree_listing) listing = load_tree_listing(*cfg.tree_listing);
    // Without a mirror every repository is unreachable.
    return std::make_shared<LocalRepositorySource>(cfg.repos.value_or(std::filesystem::path()), std::move(listing));
}

/// One retrieval record per graph node, ordered by (kind, id).
inline std::vector<RetrievalRecord> run_fetch(const graph::SupplyGraph& g, RepositorySource& source,
                                              retrieval::ContentCache& cache, std::uint64_t max_file_bytes,
                                              std::size_t workers)
{
    std::vector<graph::NodeKey> keys;
    for (auto kind : graph::kAllKinds) {
        for (const auto& id : g.ids(kind)) keys.push_back({kind, id});
    }
    std::vector<RetrievalRecord> records(keys.size());
    parallel_for(keys.size(), workers,
                 [&](std::size_t i) { records[i] = retrieve_artifact(keys[i], source, cache, max_file_bytes); });
    cache.save_index();
    return records;
}

inline std::string write_retrieval(const std::vector<RetrievalRecord>& records)
{
    std::string lines;
    for (const auto& r : records) lines += to_json(r).dump() + "\n";
    return lines;
}

inline audit::ScanTable run_scan(const std::vector<RetrievalRecord>& records, const retrieval::ContentCache& cache,
                                 const license::TemplateCorpus& corpus, std::size_t workers)
{
    std::vector<audit::ArtifactScan> scans(records.size());
    parallel_for(records.size(), workers, [&](std::size_t i) { scans[i] = scan_record(records[i], cache, corpus); });
    audit::ScanTable table;
    for (auto& s : scans) {
        auto key = s.key();
        table.emplace(std::move(key), std::move(s));
    }
    return table;
}

inline audit::AuditBundle run_audit_stage(const graph::SupplyGraph& g, const audit::ScanTable& scans,
                                          const PipelineConfig& cfg)
{
    auto tables = license::LabelTables::load(cfg.aliases, cfg.categories);
    tables.set_permissive_labels(cfg.permissive_labels);
    return audit::run_audit(g, scans, tables, {cfg.top_orgs, cfg.coverage_threshold});
}

class Pipeline {
public:
    explicit Pipeline(PipelineConfig config, PipelineServices services = {})
        : cfg_(std::move(config)), services_(std::move(services))
    {
        validate_config(cfg_);
    }

    [[nodiscard]] const PipelineConfig& config() const { return cfg_; }
    [[nodiscard]] std::filesystem::path out(const char* name) const { return cfg_.out_dir / name; }

    /// Runs `stages` in order under the output lock, then refreshes the
    /// manifest. A failing stage stops the run; earlier outputs stay.
    PipelineResult run(const std::vector<Stage>& stages)
    {
        OutputLock lock(cfg_.out_dir);
        PipelineResult result;
        result.out_dir = cfg_.out_dir;
        std::optional<StageError> failure;
        for (auto s : stages) {
            const auto t0 = std::chrono::steady_clock::now();
            StageTiming timing;
            timing.stage = s;
            try {
                run_stage(s, result);
                timing.ok = true;
            } catch (const StageDependencyError&) {
                throw;
            } catch (const std::exception& e) {
                timing.error = e.what();
                failure.emplace(s, e.what());
            }
            timing.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.timings.push_back(timing);
            if (failure) break;
        }
        write_file_atomic(out(kManifestFile), manifest_json().dump(2) + "\n");
        write_file_atomic(out(kRunLogFile), run_log_json(result).dump(2) + "\n");
        if (failure) throw *failure;
        return result;
    }

    PipelineResult run_all() { return run({std::begin(kAllStages), std::end(kAllStages)}); }

    /// Inputs (by file name and digest), parameters and outputs. No paths
    /// or clock values, so equal inputs give an identical manifest.
    [[nodiscard]] nlohmann::ordered_json manifest_json() const
    {
        namespace fs = std::filesystem;
        nlohmann::ordered_json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["parameters"] = cfg_.parameters_json();
        auto& inputs = j["inputs"] = nlohmann::ordered_json::array();
        auto add_input = [&](const std::string& role, const fs::path& p) {
            if (fs::exists(p)) {
                inputs.push_back({{"role", role}, {"name", p.filename().string()}, {"sha256", path_digest(p)}});
            }
        };
        for (const auto& s : cfg_.snapshots) add_input("snapshot", s);
        if (cfg_.code_hits) add_input("code_hits", *cfg_.code_hits);
        add_input("signatures", cfg_.signatures);
        add_input("templates", cfg_.templates);
        add_input("aliases", cfg_.aliases);
        add_input("categories", cfg_.categories);
        if (cfg_.repos) add_input("repos", *cfg_.repos);
        if (cfg_.tree_listing) add_input("tree_listing", *cfg_.tree_listing);
        auto& outputs = j["outputs"] = nlohmann::ordered_json::array();
        std::vector<fs::path> files;
        for (const char* name : {kGraphFile, kIngestReportFile, kRetrievalFile, kScansFile}) {
            if (fs::exists(out(name))) files.push_back(name);
        }
        if (fs::is_directory(out(kReportsDir))) {
            std::vector<fs::path> reports;
            for (const auto& e : fs::directory_iterator(out(kReportsDir))) {
                if (e.is_regular_file()) reports.push_back(fs::path(kReportsDir) / e.path().filename());
            }
            std::sort(reports.begin(), reports.end());
            files.insert(files.end(), reports.begin(), reports.end());
        }
        for (const auto& f : files) {
            outputs.push_back({{"name", f.generic_string()}, {"sha256", sha256_file(cfg_.out_dir / f)}});
        }
        return j;
    }

private:
    void require(const char* name, Stage s) const
    {
        if (!std::filesystem::exists(out(name))) {
            throw StageDependencyError("stage " + std::string(to_string(s)) + " needs " + out(name).string() +
                                       "; run the earlier stages first");
        }
    }

    void run_stage(Stage s, PipelineResult& result)
    {
        switch (s) {
            case Stage::ingest: return ingest();
            case Stage::fetch: require(kGraphFile, s); return fetch();
            case Stage::scan: require(kRetrievalFile, s); return scan();
            case Stage::audit:
                require(kGraphFile, s);
                require(kScansFile, s);
                result.bundle = audit();
                return;
        }
    }

    [[nodiscard]] std::filesystem::path reports_dir() const { return out(kReportsDir); }

    void ingest()
    {
        auto outputs = run_ingest(cfg_, services_);
        write_file_atomic(out(kGraphFile), graph::write_graph(outputs.graph));
        write_file_atomic(out(kIngestReportFile), outputs.report.dump(2) + "\n");
        std::filesystem::create_directories(reports_dir());
        write_file_atomic(reports_dir() / "lineage_disclosure.csv", outputs.disclosure_csv);
        write_file_atomic(reports_dir() / "file_extensions.csv", outputs.extensions_csv);
    }

    void fetch()
    {
        const auto g = graph::load_graph(out(kGraphFile));
        auto source = make_repository_source(cfg_, services_);
        retrieval::ContentCache cache(cfg_.effective_cache_dir());
        const auto records = run_fetch(g, *source, cache, cfg_.max_file_bytes(), cfg_.workers);
        write_file_atomic(out(kRetrievalFile), write_retrieval(records));
    }

    void scan()
    {
        const auto records = load_retrieval(out(kRetrievalFile));
        const auto corpus = license::load_template_corpus(cfg_.templates);
        retrieval::ContentCache cache(cfg_.effective_cache_dir());
        write_file_atomic(out(kScansFile), audit::write_scans(run_scan(records, cache, corpus, cfg_.workers)));
    }

    audit::AuditBundle audit()
    {
        const auto g = graph::load_graph(out(kGraphFile));
        const auto scans = audit::load_scans(out(kScansFile));
        auto bundle = run_audit_stage(g, scans, cfg_);
        audit::write_reports(bundle, reports_dir());
        return bundle;
    }

    [[nodiscard]] nlohmann::ordered_json run_log_json(const PipelineResult& r) const
    {
        nlohmann::ordered_json j;
        j["stages"] = nlohmann::ordered_json::array();
        for (const auto& t : r.timings) {
            nlohmann::ordered_json s{{"stage", to_string(t.stage)}, {"ok", t.ok}, {"seconds", t.seconds}};
            if (!t.ok) s["error"] = t.error;
            j["stages"].push_back(std::move(s));
        }
        return j;
    }

    PipelineConfig cfg_;
    PipelineServices services_;
};

/// Live platform clients built from the config endpoints and env tokens.
inline PipelineServices live_services(const PipelineConfig& cfg, HttpTransport transport = httplib_transport())
{
    PipelineServices s;
    auto hub_api = std::make_shared<ApiClient>(cfg.endpoints.hub, cfg.hub_token, transport,
                                               std::make_shared<RateLimiter>(std::chrono::milliseconds(100)));
    auto forge_api = std::make_shared<ApiClient>(cfg.endpoints.forge, cfg.forge_token, transport,
                                                 std::make_shared<RateLimiter>(std::chrono::milliseconds(750)));
    s.hub = std::make_shared<HubClient>(hub_api);
    s.forge = std::make_shared<ForgeClient>(forge_api);
    return s;
}

}  // namespace chainaudit::cli

#endif  // CHAINAUDIT_CLI_PIPELINE_HPP
