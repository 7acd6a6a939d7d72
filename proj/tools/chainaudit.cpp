#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainaudit/cli/pipeline.hpp"
#include "chainaudit/cli/validate.hpp"

namespace ca = chainaudit;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kStage = 3, kDependency = 4, kRetriable = 5, kLocked = 6 };

struct Common {
    std::string config;
    std::optional<std::size_t> workers;
};

ca::cli::PipelineConfig base_config(const Common& c)
{
    return c.config.empty() ? ca::cli::parse_config(nlohmann::json::object()) : ca::cli::load_config(c.config);
}

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config, "JSON config file; flags override its values");
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
}

template <typename T, typename U>
void override(std::optional<T>& flag, U& field)
{
    if (flag) field = *flag;
}

void emit(const std::optional<std::string>& out, const std::string& body)
{
    if (out && *out != "-") {
        ca::write_file_atomic(*out, body);
    } else {
        std::cout << body;
    }
}

std::vector<std::string> read_id_lines(const std::string& path)
{
    std::vector<std::string> ids;
    const std::string text = ca::read_file(path);
    for (auto line : ca::split_lines(text)) {
        auto t = ca::trim(line);
        if (!t.empty() && t.front() != '#') ids.emplace_back(t);
    }
    return ids;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"License compliance auditing for dataset -> model -> application supply chains"};
    app.set_version_flag("--version", std::string(ca::kToolVersion));
    app.require_subcommand(1);

    // ingest
    Common ingest_c;
    std::vector<std::string> ingest_snapshots;
    std::optional<std::string> ingest_hits, ingest_sigs, ingest_resolver, ingest_report;
    std::optional<std::uint64_t> min_likes, min_stars;
    std::string ingest_out = "graph.jsonl";
    bool ingest_live = false;
    auto* ingest = app.add_subcommand("ingest", "Build the pruned supply graph from snapshots and code hits");
    add_common(ingest, ingest_c);
    ingest->add_option("--snapshot", ingest_snapshots, "Snapshot JSONL (repeatable)");
    ingest->add_option("--code-hits", ingest_hits, "Code search hits JSONL");
    ingest->add_option("--signatures", ingest_sigs, "Model-loading signature file");
    ingest->add_option("--min-likes", min_likes, "Minimum model likes");
    ingest->add_option("--min-stars", min_stars, "Minimum application stars");
    ingest->add_option("--resolver-cache", ingest_resolver, "Dataset resolver cache (JSONL)");
    ingest->add_option("--out", ingest_out, "Output graph JSONL");
    ingest->add_option("--report", ingest_report, "Ingest report JSON (default: beside --out)");
    ingest->add_flag("--live", ingest_live, "Resolve dataset refs against the hub API");

    // fetch
    Common fetch_c;
    std::string fetch_graph;
    std::optional<std::string> fetch_cache, fetch_repos, fetch_listing, fetch_out;
    std::optional<std::uint64_t> max_file_mb;
    bool fetch_live_flag = false;
    auto* fetch = app.add_subcommand("fetch", "Retrieve license and README files for every graph node");
    add_common(fetch, fetch_c);
    fetch->add_option("--graph", fetch_graph, "Graph JSONL")->required();
    fetch->add_option("--cache-dir", fetch_cache, "Content cache directory");
    fetch->add_option("--repos", fetch_repos, "Local repository mirror <dir>/<kind>/<id>/");
    fetch->add_option("--tree-listing", fetch_listing, "Tree listing JSONL (artifact_id, path, size_bytes)");
    fetch->add_option("--max-file-mb", max_file_mb, "Per-file size cap in MiB")->check(CLI::PositiveNumber);
    fetch->add_option("--out", fetch_out, "Retrieval JSONL (default: retrieval.jsonl beside --graph)");
    fetch->add_flag("--live", fetch_live_flag, "Fetch from the platform APIs");

    // scan
    Common scan_c;
    std::string scan_retrieval;
    std::optional<std::string> scan_cache, scan_templates, scan_out;
    auto* scan = app.add_subcommand("scan", "Detect license texts, references and copyright notices");
    add_common(scan, scan_c);
    scan->add_option("--retrieval", scan_retrieval, "Retrieval JSONL")->required();
    scan->add_option("--cache-dir", scan_cache, "Content cache directory");
    scan->add_option("--templates", scan_templates, "License template directory");
    scan->add_option("--out", scan_out, "Scans JSONL (default: scans.jsonl beside --retrieval)");

    // audit
    Common audit_c;
    std::string audit_graph, audit_scans, audit_out = "reports";
    std::optional<std::size_t> top_orgs;
    std::optional<double> threshold;
    std::vector<std::string> permissive;
    std::optional<std::string> audit_aliases, audit_categories;
    auto* audit_cmd = app.add_subcommand("audit", "Integrity and attribution audits");
    add_common(audit_cmd, audit_c);
    audit_cmd->add_option("--graph", audit_graph, "Graph JSONL")->required();
    audit_cmd->add_option("--scans", audit_scans, "Scans JSONL")->required();
    audit_cmd->add_option("--out-dir", audit_out, "Report directory");
    audit_cmd->add_option("--top-orgs", top_orgs, "Organizations in the stratified table");
    audit_cmd->add_option("--coverage-threshold", threshold, "Present-level coverage")->check(CLI::Range(0.0, 1.0));
    audit_cmd->add_option("--permissive", permissive, "Permissive labels (repeatable)");
    audit_cmd->add_option("--aliases", audit_aliases, "License alias table");
    audit_cmd->add_option("--categories", audit_categories, "License category table");

    // report
    Common report_c;
    std::vector<std::string> report_snapshots;
    std::optional<std::string> report_out;
    auto* report = app.add_subcommand("report", "Lineage disclosure statistics of a snapshot");
    add_common(report, report_c);
    report->add_option("--snapshot", report_snapshots, "Snapshot JSONL (repeatable)")->required();
    report->add_option("--out", report_out, "CSV output (default: stdout)");

    // validate
    Common validate_c;
    std::string validate_ids, validate_repos;
    std::optional<std::string> validate_listing, validate_templates, validate_out, validate_rows;
    auto* validate = app.add_subcommand("validate", "Pattern retrieval against full-tree scans for listed artifacts");
    add_common(validate, validate_c);
    validate->add_option("--ids", validate_ids, "File of '<kind> <id>' lines")->required();
    validate->add_option("--repos", validate_repos, "Local repository mirror")->required();
    validate->add_option("--tree-listing", validate_listing, "Tree listing JSONL");
    validate->add_option("--templates", validate_templates, "License template directory");
    validate->add_option("--out", validate_out, "Coverage table CSV (default: stdout)");
    validate->add_option("--rows", validate_rows, "Per-artifact verdict CSV");

    // histogram
    std::optional<std::string> hist_hits, hist_paths, hist_out;
    std::size_t hist_top = 15;
    auto* histogram = app.add_subcommand("histogram", "File-extension distribution of code search hits");
    auto* hits_opt = histogram->add_option("--code-hits", hist_hits, "Code search hits JSONL");
    histogram->add_option("--paths", hist_paths, "Plain list of paths, one per line")->excludes(hits_opt);
    histogram->add_option("--top", hist_top, "Rows to keep");
    histogram->add_option("--out", hist_out, "CSV output (default: stdout)");

    // run
    Common run_c;
    std::vector<std::string> run_stages;
    std::optional<std::string> run_out_dir;
    bool run_live = false;
    auto* run = app.add_subcommand("run", "Run pipeline stages into the configured output directory");
    add_common(run, run_c);
    run->get_option("--config")->required();
    run->add_option("--stage", run_stages, "Stage to run (repeatable; default: all)")
        ->check(CLI::IsMember({"ingest", "fetch", "scan", "audit"}));
    run->add_option("--out-dir", run_out_dir, "Override the output directory");
    run->add_flag("--live", run_live, "Use the platform APIs");

    // crawl
    Common crawl_c;
    std::string crawl_kind = "model", crawl_ids, crawl_out;
    std::optional<std::string> crawl_progress, crawl_endpoint;
    auto* crawl = app.add_subcommand("crawl", "Fetch snapshot records for listed ids from a platform API");
    add_common(crawl, crawl_c);
    crawl->add_option("--kind", crawl_kind, "dataset, model or application")
        ->check(CLI::IsMember({"dataset", "model", "application"}));
    crawl->add_option("--ids", crawl_ids, "File of ids, one per line")->required();
    crawl->add_option("--out", crawl_out, "Snapshot fragment JSONL")->required();
    crawl->add_option("--progress", crawl_progress, "Progress cache (default: <out>.progress.jsonl)");
    crawl->add_option("--endpoint", crawl_endpoint, "API base URL");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            auto cfg = base_config(ingest_c);
            if (!ingest_snapshots.empty()) cfg.snapshots.assign(ingest_snapshots.begin(), ingest_snapshots.end());
            if (ingest_hits) cfg.code_hits = fs::path(*ingest_hits);
            if (ingest_sigs) cfg.signatures = *ingest_sigs;
            if (ingest_resolver) cfg.resolver_cache = fs::path(*ingest_resolver);
            override(min_likes, cfg.min_likes);
            override(min_stars, cfg.min_stars);
            override(ingest_c.workers, cfg.workers);
            cfg.live = cfg.live || ingest_live;
            ca::cli::validate_config(cfg);
            auto services = cfg.live ? ca::cli::live_services(cfg) : ca::cli::PipelineServices{};
            auto outputs = ca::cli::run_ingest(cfg, services);
            const fs::path out(ingest_out);
            ca::write_file_atomic(out, ca::graph::write_graph(outputs.graph));
            const fs::path rep = ingest_report ? fs::path(*ingest_report) : out.parent_path() / "ingest_report.json";
            ca::write_file_atomic(rep, outputs.report.dump(2) + "\n");
            std::cerr << "graph: " << outputs.report["after_prune"].dump() << ", " << outputs.report["chains"]
                      << " chains\n";
        } else if (*fetch) {
            auto cfg = base_config(fetch_c);
            if (fetch_cache) cfg.cache_dir = fs::path(*fetch_cache);
            if (fetch_repos) cfg.repos = fs::path(*fetch_repos);
            if (fetch_listing) cfg.tree_listing = fs::path(*fetch_listing);
            override(max_file_mb, cfg.max_file_mb);
            override(fetch_c.workers, cfg.workers);
            cfg.live = cfg.live || fetch_live_flag;
            const fs::path graph_path(fetch_graph);
            if (!cfg.cache_dir && !ca::cli::env_value(ca::cli::kCacheDirEnv)) cfg.cache_dir = graph_path.parent_path() / "cache";
            ca::cli::validate_config(cfg);
            auto services = cfg.live ? ca::cli::live_services(cfg) : ca::cli::PipelineServices{};
            const auto g = ca::graph::load_graph(graph_path);
            auto source = ca::cli::make_repository_source(cfg, services);
            ca::retrieval::ContentCache cache(cfg.effective_cache_dir());
            const auto records = ca::cli::run_fetch(g, *source, cache, cfg.max_file_bytes(), cfg.workers);
            const fs::path out = fetch_out ? fs::path(*fetch_out) : graph_path.parent_path() / "retrieval.jsonl";
            ca::write_file_atomic(out, ca::cli::write_retrieval(records));
            std::cerr << records.size() << " artifacts fetched into " << out << "\n";
        } else if (*scan) {
            auto cfg = base_config(scan_c);
            const fs::path in(scan_retrieval);
            if (scan_cache) cfg.cache_dir = fs::path(*scan_cache);
            if (!cfg.cache_dir && !ca::cli::env_value(ca::cli::kCacheDirEnv)) cfg.cache_dir = in.parent_path() / "cache";
            if (scan_templates) cfg.templates = *scan_templates;
            override(scan_c.workers, cfg.workers);
            ca::cli::validate_config(cfg);
            const auto records = ca::cli::load_retrieval(in);
            const auto corpus = ca::license::load_template_corpus(cfg.templates);
            ca::retrieval::ContentCache cache(cfg.effective_cache_dir());
            const auto table = ca::cli::run_scan(records, cache, corpus, cfg.workers);
            const fs::path out = scan_out ? fs::path(*scan_out) : in.parent_path() / "scans.jsonl";
            ca::write_file_atomic(out, ca::audit::write_scans(table));
            std::cerr << table.size() << " artifacts scanned into " << out << "\n";
        } else if (*audit_cmd) {
            auto cfg = base_config(audit_c);
            override(top_orgs, cfg.top_orgs);
            override(threshold, cfg.coverage_threshold);
            if (!permissive.empty()) cfg.permissive_labels = permissive;
            if (audit_aliases) cfg.aliases = *audit_aliases;
            if (audit_categories) cfg.categories = *audit_categories;
            ca::cli::validate_config(cfg);
            const auto g = ca::graph::load_graph(audit_graph);
            const auto scans = ca::audit::load_scans(audit_scans);
            const auto bundle = ca::cli::run_audit_stage(g, scans, cfg);
            ca::audit::write_reports(bundle, audit_out);
            std::cout << ca::audit::summary_markdown(bundle);
        } else if (*report) {
            std::vector<ca::graph::SnapshotLoad> loads;
            for (const auto& s : report_snapshots) loads.push_back(ca::graph::load_snapshot(s));
            const auto merged = ca::graph::merge_snapshots(std::move(loads));
            emit(report_out, ca::graph::disclosure_csv(ca::graph::lineage_disclosure_stats(merged.records)));
        } else if (*validate) {
            auto cfg = base_config(validate_c);
            if (validate_templates) cfg.templates = *validate_templates;
            std::vector<ca::graph::NodeKey> keys;
            for (const auto& line : read_id_lines(validate_ids)) {
                const auto sp = line.find_first_of(" \t");
                if (sp == std::string::npos) throw ca::FormatError("expected '<kind> <id>': " + line);
                keys.push_back({ca::graph::kind_from_string(line.substr(0, sp)), std::string(ca::trim(line.substr(sp)))});
            }
            std::map<std::string, std::vector<ca::retrieval::TreeEntry>> listing;
            if (validate_listing) listing = ca::cli::load_tree_listing(*validate_listing);
            ca::cli::LocalRepositorySource source(validate_repos, std::move(listing));
            const auto corpus = ca::license::load_template_corpus(cfg.templates);
            const auto result =
                ca::cli::validate_artifacts(keys, source, corpus, cfg.max_file_bytes(), cfg.coverage_threshold);
            if (validate_rows) ca::write_file_atomic(*validate_rows, ca::cli::validation_rows_csv(result));
            emit(validate_out, ca::retrieval::coverage_table_csv(result.by_kind));
        } else if (*histogram) {
            std::vector<std::string> paths;
            if (hist_hits) {
                for (const auto& h : ca::graph::load_code_hits(*hist_hits)) paths.push_back(h.path);
            } else if (hist_paths) {
                paths = read_id_lines(*hist_paths);
            } else {
                throw ca::ConfigError("histogram needs --code-hits or --paths");
            }
            emit(hist_out, ca::retrieval::file_extension_csv(paths, hist_top));
        } else if (*run) {
            auto cfg = base_config(run_c);
            if (run_out_dir) cfg.out_dir = *run_out_dir;
            override(run_c.workers, cfg.workers);
            cfg.live = cfg.live || run_live;
            std::vector<ca::cli::Stage> stages;
            for (const auto& s : run_stages) stages.push_back(ca::cli::stage_from_string(s));
            if (stages.empty()) stages.assign(std::begin(ca::cli::kAllStages), std::end(ca::cli::kAllStages));
            auto services = cfg.live ? ca::cli::live_services(cfg) : ca::cli::PipelineServices{};
            ca::cli::Pipeline pipeline(cfg, services);
            const auto result = pipeline.run(stages);
            for (const auto& t : result.timings) {
                std::fprintf(stderr, "%-7s ok  %.2fs\n", std::string(ca::cli::to_string(t.stage)).c_str(), t.seconds);
            }
            if (result.bundle) std::cout << ca::audit::summary_markdown(*result.bundle);
        } else if (*crawl) {
            auto cfg = base_config(crawl_c);
            const auto kind = ca::graph::kind_from_string(crawl_kind);
            const bool hub = ca::cli::platform_of(kind) == ca::graph::Platform::hub;
            if (crawl_endpoint) (hub ? cfg.endpoints.hub : cfg.endpoints.forge) = *crawl_endpoint;
            auto services = ca::cli::live_services(cfg);
            std::shared_ptr<ca::cli::PlatformClient> client =
                hub ? std::static_pointer_cast<ca::cli::PlatformClient>(services.hub)
                    : std::static_pointer_cast<ca::cli::PlatformClient>(services.forge);
            ca::graph::ResolverCache progress(crawl_progress ? fs::path(*crawl_progress)
                                                             : fs::path(crawl_out + ".progress.jsonl"));
            const auto result = ca::cli::fetch_live(*client, kind, read_id_lines(crawl_ids), progress);
            ca::write_file_atomic(crawl_out, ca::graph::write_snapshot_lines(result.records));
            for (const auto& id : result.unresolved) std::cerr << "unresolved: " << id << "\n";
            std::cerr << result.records.size() << " records, " << result.unresolved.size() << " unresolved, "
                      << result.network_lookups << " lookups\n";
        }
    } catch (const ca::cli::StageDependencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDependency;
    } catch (const ca::cli::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kStage;
    } catch (const ca::cli::LockError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kLocked;
    } catch (const ca::cli::RetriableError& e) {
        std::cerr << "error (retriable, progress saved): " << e.what() << "\n";
        return kRetriable;
    } catch (const ca::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
