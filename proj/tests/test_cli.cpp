#include <gtest/gtest.h>

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "chainaudit/cli/pipeline.hpp"
#include "support/pipeline_fixture.hpp"

namespace ca = chainaudit;
namespace cli = chainaudit::cli;
namespace oracle = chainaudit::oracle;
namespace fs = std::filesystem;
using ca::graph::ArtifactKind;
using nlohmann::json;

namespace {

void write(const fs::path& p, const std::string& body)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << body;
}

/// Sets or clears an environment variable for the scope.
class ScopedEnv {
public:
    ScopedEnv(const char* name, const char* value) : name_(name)
    {
        if (const char* old = std::getenv(name)) old_ = old;
        value ? ::setenv(name, value, 1) : ::unsetenv(name);
    }
    ~ScopedEnv() { old_ ? ::setenv(name_, old_->c_str(), 1) : ::unsetenv(name_); }

private:
    const char* name_;
    std::optional<std::string> old_;
};

int run_cli(const std::string& args, const fs::path& log)
{
    const std::string cmd = std::string("'") + CHAINAUDIT_CLI_PATH + "' " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// Configuration

TEST(Config, RelativePathsResolveAgainstConfigDir)
{
    const auto cfg = cli::load_config(oracle::fixtures_dir() / "corpus" / "config.json");
    ASSERT_EQ(cfg.snapshots.size(), 1u);
    EXPECT_EQ(cfg.snapshots[0], oracle::fixtures_dir() / "corpus" / "snapshot.jsonl");
    EXPECT_EQ(*cfg.repos, oracle::fixtures_dir() / "corpus" / "repos");
    EXPECT_EQ(cfg.min_likes, 1u);
    EXPECT_EQ(cfg.workers, 4u);
    EXPECT_NO_THROW(cli::validate_config(cfg));
}

TEST(Config, RefusesSecretsAndUnknownKeys)
{
    EXPECT_THROW(cli::parse_config(json{{"hub_token", "x"}}), ca::ConfigError);
    EXPECT_THROW(cli::parse_config(json{{"Forge_Password", "x"}}), ca::ConfigError);
    EXPECT_THROW(cli::parse_config(json{{"apiSecret", "x"}}), ca::ConfigError);
    EXPECT_THROW(cli::parse_config(json{{"min_like", 3}}), ca::ConfigError);
    EXPECT_THROW(cli::parse_config(json::array()), ca::ConfigError);
    EXPECT_THROW(cli::parse_config(json{{"min_likes", "many"}}), ca::ConfigError);
    try {
        cli::parse_config(json{{"hub_token", "x"}});
    } catch (const ca::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(cli::kHubTokenEnv), std::string::npos);
    }
}

TEST(Config, TokensComeFromEnvironment)
{
    ScopedEnv hub(cli::kHubTokenEnv, "hub-secret");
    ScopedEnv forge(cli::kForgeTokenEnv, nullptr);
    const auto cfg = cli::parse_config(json::object());
    EXPECT_EQ(cfg.hub_token, std::optional<std::string>("hub-secret"));
    EXPECT_FALSE(cfg.forge_token);
    EXPECT_EQ(cfg.parameters_json().dump().find("hub-secret"), std::string::npos);
}

TEST(Config, ValidationNamesTheMissingPath)
{
    auto cfg = cli::parse_config(json{{"templates", "/nonexistent/templates"}});
    try {
        cli::validate_config(cfg);
        FAIL() << "expected ConfigError";
    } catch (const ca::ConfigError& e) {
        EXPECT_EQ(std::string(e.what()), "template directory not found: /nonexistent/templates");
    }
    cfg = cli::parse_config(json{{"coverage_threshold", 1.5}});
    EXPECT_THROW(cli::validate_config(cfg), ca::ConfigError);
    cfg = cli::parse_config(json{{"snapshots", {"/nope.jsonl"}}});
    EXPECT_THROW(cli::validate_config(cfg), ca::ConfigError);
}

TEST(Config, MissingOrMalformedFile)
{
    oracle::TempDir tmp("config");
    EXPECT_THROW(cli::load_config(tmp / "absent.json"), ca::ConfigError);
    write(tmp / "bad.json", "{not json");
    EXPECT_THROW(cli::load_config(tmp / "bad.json"), ca::ConfigError);
}

// Repository sources

TEST(Sources, LocalMirrorAndTreeListing)
{
    oracle::TempDir tmp("sources");
    write(tmp / "repos/model/o/m/LICENSE", "MIT text");
    write(tmp / "repos/model/o/m/sub/README.md", "# hi");
    write(tmp / "repos/model/o/m/.git/config", "x");
    cli::LocalRepositorySource plain(tmp / "repos");
    const auto tree = plain.tree({ArtifactKind::model, "o/m"});
    ASSERT_TRUE(tree);
    ASSERT_EQ(tree->size(), 2u);
    EXPECT_EQ((*tree)[0].path, "LICENSE");
    EXPECT_EQ((*tree)[1].path, "sub/README.md");
    EXPECT_EQ(plain.client({ArtifactKind::model, "o/m"})("LICENSE"), std::optional<std::string>("MIT text"));
    EXPECT_FALSE(plain.client({ArtifactKind::model, "o/m"})("nope"));
    EXPECT_FALSE(plain.tree({ArtifactKind::model, "o/absent"}));
    EXPECT_FALSE(cli::LocalRepositorySource("").tree({ArtifactKind::model, "o/m"}));

    write(tmp / "listing.jsonl", R"({"artifact_id":"o/m","path":"NOTICE","size_bytes":419430400})"
                                 "\n"
                                 R"({"artifact_id":"o/m","path":"LICENSE","size_bytes":8})"
                                 "\n");
    cli::LocalRepositorySource listed(tmp / "repos", cli::load_tree_listing(tmp / "listing.jsonl"));
    ca::retrieval::ContentCache cache(tmp / "cache");
    const auto rec = cli::retrieve_artifact({ArtifactKind::model, "o/m"}, listed, cache, 300ull << 20);
    EXPECT_TRUE(rec.reachable);
    ASSERT_EQ(rec.skipped.size(), 1u);
    EXPECT_EQ(rec.skipped[0].path, "NOTICE");
    EXPECT_EQ(rec.skipped[0].reason, "oversize");
    ASSERT_EQ(rec.files.size(), 1u);
    EXPECT_EQ(rec.files[0].path, "LICENSE");

    write(tmp / "torn.jsonl", "{\"artifact_id\":\"o/m\"}\n");
    EXPECT_THROW(cli::load_tree_listing(tmp / "torn.jsonl"), ca::FormatError);
}

// Platform API clients over a stub transport

namespace {

struct StubServer {
    std::vector<std::string> log;
    std::map<std::string, cli::HttpResponse> routes;
    int quota_after = -1;  // answer 429 once this many requests succeeded
    int served = 0;

    cli::HttpTransport transport()
    {
        return [this](const cli::HttpRequest& req) {
            log.push_back(req.path);
            if (quota_after >= 0 && served >= quota_after) {
                return cli::HttpResponse{429, "slow down", {{"retry-after", "1"}}};
            }
            ++served;
            auto it = routes.find(req.path);
            if (it == routes.end()) return cli::HttpResponse{404, "", {}};
            return it->second;
        };
    }

    void model(const std::string& id, const std::string& license)
    {
        routes["/api/models/" + id] = {
            200, json{{"id", id}, {"likes", 5}, {"cardData", {{"license", license}, {"datasets", {"org/data"}}}}}.dump(), {}};
    }
};

std::shared_ptr<cli::ApiClient> api(StubServer& s, std::optional<std::string> token,
                                    std::vector<std::chrono::milliseconds>* sleeps = nullptr)
{
    cli::RetryPolicy retry{3, std::chrono::milliseconds(10), std::chrono::milliseconds(40)};
    return std::make_shared<cli::ApiClient>("https://hub.example/", std::move(token), s.transport(), nullptr, retry,
                                            [sleeps](std::chrono::milliseconds d) {
                                                if (sleeps) sleeps->push_back(d);
                                            });
}

}  // namespace

TEST(ApiClient, RetriesTransientFailuresThenSucceeds)
{
    int calls = 0;
    std::vector<std::chrono::milliseconds> sleeps;
    cli::ApiClient client(
        "https://x", "t",
        [&](const cli::HttpRequest& req) {
            EXPECT_EQ(req.headers.at("Authorization"), "Bearer t");
            ++calls;
            return calls < 3 ? cli::HttpResponse{calls == 1 ? 0 : 503, "down", {}} : cli::HttpResponse{200, "ok", {}};
        },
        nullptr, cli::RetryPolicy{5, std::chrono::milliseconds(10), std::chrono::milliseconds(15)},
        [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    const auto res = client.get("/p");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->body, "ok");
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(10), std::chrono::milliseconds(15)}));
}

TEST(ApiClient, StatusHandling)
{
    StubServer s;
    s.routes["/forbidden"] = {403, "", {}};
    s.routes["/teapot"] = {418, "", {}};
    s.routes["/bad-json"] = {200, "<html>", {}};
    auto c = api(s, "t");
    EXPECT_FALSE(c->get("/missing"));
    EXPECT_THROW(c->get("/forbidden"), cli::AuthError);
    EXPECT_THROW(c->get("/teapot"), ca::IoError);
    EXPECT_THROW(c->get_json("/bad-json"), ca::FormatError);

    std::vector<std::chrono::milliseconds> sleeps;
    StubServer limited;
    limited.quota_after = 0;
    auto q = api(limited, "t", &sleeps);
    EXPECT_THROW(q->get("/anything"), cli::QuotaExhaustedError);
    EXPECT_EQ(limited.log.size(), 3u);
    // Retry-After (1 s) is capped by the policy maximum.
    EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(40), std::chrono::milliseconds(40)}));
}

TEST(ApiClient, RecordParsing)
{
    const auto hub = cli::hub_record_from_api(
        ArtifactKind::model, json::parse(R"({"id":"o/m","likes":7,"author":"o","tags":["license:apache-2.0",
        "dataset:o/d","base_model:finetune:o/base"]})"));
    EXPECT_EQ(hub.declared_license, std::optional<std::string>("apache-2.0"));
    EXPECT_EQ(hub.dataset_refs, (std::vector<std::string>{"o/d"}));
    EXPECT_EQ(hub.base_model_ref, std::optional<std::string>("o/base"));
    EXPECT_EQ(hub.engagement, 7u);
    EXPECT_EQ(hub.organization, std::optional<std::string>("o"));

    const auto forge = cli::forge_record_from_api(json::parse(
        R"({"full_name":"u/app","stargazers_count":3,"license":{"spdx_id":"NOASSERTION"},"owner":{"login":"u"}})"));
    EXPECT_EQ(forge.kind, ArtifactKind::application);
    EXPECT_FALSE(forge.declared_license);
    EXPECT_EQ(forge.engagement, 3u);
    EXPECT_THROW(cli::forge_record_from_api(json::object()), ca::FormatError);
}

TEST(FetchLive, ThreeIdsWithOneUnknown)
{
    oracle::TempDir tmp("live");
    StubServer s;
    s.model("o/a", "mit");
    s.model("o/b", "apache-2.0");
    cli::HubClient hub(api(s, "t"));
    ca::graph::ResolverCache progress(tmp / "progress.jsonl");
    const auto r = cli::fetch_live(hub, ArtifactKind::model, {"o/a", " o/b ", "o/unknown"}, progress);
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(r.records[0].id, "o/a");
    EXPECT_EQ(r.records[1].declared_license, std::optional<std::string>("apache-2.0"));
    EXPECT_EQ(r.records[1].dataset_refs, (std::vector<std::string>{"org/data"}));
    EXPECT_EQ(r.unresolved, (std::vector<std::string>{"o/unknown"}));
    EXPECT_EQ(r.network_lookups, 3u);

    // A second pass is served from the progress file.
    s.log.clear();
    ca::graph::ResolverCache reopened(tmp / "progress.jsonl");
    const auto again = cli::fetch_live(hub, ArtifactKind::model, {"o/a", "o/b", "o/unknown"}, reopened);
    EXPECT_EQ(again.network_lookups, 0u);
    EXPECT_TRUE(s.log.empty());
    EXPECT_EQ(again.unresolved, r.unresolved);
}

TEST(FetchLive, RequiresCredentials)
{
    StubServer s;
    cli::HubClient hub(api(s, std::nullopt));
    ca::graph::ResolverCache progress;
    try {
        cli::fetch_live(hub, ArtifactKind::model, {"o/a"}, progress);
        FAIL() << "expected AuthError";
    } catch (const cli::AuthError& e) {
        EXPECT_NE(std::string(e.what()).find(cli::kHubTokenEnv), std::string::npos);
    }
    EXPECT_TRUE(s.log.empty());
}

TEST(FetchLive, ResumesAfterQuotaExhaustion)
{
    oracle::TempDir tmp("quota");
    std::vector<std::string> ids;
    StubServer s;
    for (int i = 0; i < 10; ++i) {
        ids.push_back("o/m" + std::to_string(i));
        s.model(ids.back(), "mit");
    }
    s.quota_after = 4;
    {
        cli::HubClient hub(api(s, "t"));
        ca::graph::ResolverCache progress(tmp / "progress.jsonl");
        EXPECT_THROW(cli::fetch_live(hub, ArtifactKind::model, ids, progress), cli::QuotaExhaustedError);
    }
    s.quota_after = -1;
    s.log.clear();
    cli::HubClient hub(api(s, "t"));
    ca::graph::ResolverCache progress(tmp / "progress.jsonl");
    const auto r = cli::fetch_live(hub, ArtifactKind::model, ids, progress);
    EXPECT_EQ(r.records.size(), 10u);
    EXPECT_EQ(r.network_lookups, 6u);
    ASSERT_EQ(s.log.size(), 6u);
    EXPECT_EQ(s.log.front(), "/api/models/o/m4");
}

TEST(FetchLive, RealHttpServer)
{
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Get(R"(/api/models/o/m/tree/main)", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"([{"type":"file","path":"LICENSE","size":10},{"type":"directory","path":"d"},
                            {"type":"file","path":"w.bin","size":1,"lfs":{"size":999}}])",
                        "application/json");
    });
    server.Get(R"(/api/models/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        if (req.get_header_value("Authorization") != "Bearer live-token") {
            res.status = 401;
            return;
        }
        const std::string id = req.matches[1];
        if (id == "o/missing") {
            res.status = 404;
            return;
        }
        res.set_content(json{{"id", id}, {"likes", 2}, {"cardData", {{"license", "bsd-3-clause"}}}}.dump(),
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread worker([&] { server.listen_after_bind(); });
    struct Stop {
        httplib::Server& s;
        std::thread& t;
        ~Stop()
        {
            s.stop();
            t.join();
        }
    } stop{server, worker};
    server.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port);
    auto good = std::make_shared<cli::ApiClient>(base, "live-token", cli::httplib_transport(std::chrono::seconds(5)),
                                                 nullptr);
    cli::HubClient hub(good);
    ca::graph::ResolverCache progress;
    const auto r = cli::fetch_live(hub, ArtifactKind::model, {"o/m", "o/missing"}, progress);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].declared_license, std::optional<std::string>("bsd-3-clause"));
    EXPECT_EQ(r.unresolved, (std::vector<std::string>{"o/missing"}));
    const auto tree = hub.tree(ArtifactKind::model, "o/m");
    ASSERT_TRUE(tree);
    ASSERT_EQ(tree->size(), 2u);
    EXPECT_EQ((*tree)[1].size_bytes, 999u);

    auto bad = std::make_shared<cli::ApiClient>(base, "wrong", cli::httplib_transport(std::chrono::seconds(5)), nullptr);
    cli::HubClient unauthorized(bad);
    EXPECT_THROW(unauthorized.record(ArtifactKind::model, "o/m"), cli::AuthError);

    EXPECT_GE(hits.load(), 3);
}

// Pipeline

TEST(Pipeline, MatchesGoldenOutputs)
{
    oracle::TempDir tmp("golden");
    cli::Pipeline pipeline(oracle::fixture_config(tmp.path()));
    const auto result = pipeline.run_all();
    ASSERT_EQ(result.timings.size(), 4u);
    for (const auto& t : result.timings) EXPECT_TRUE(t.ok) << cli::to_string(t.stage);
    ASSERT_TRUE(result.bundle);
    EXPECT_EQ(oracle::compare_tree(oracle::fixtures_dir() / "golden", tmp / "out"), "");
    EXPECT_EQ(oracle::deterministic_outputs(tmp / "out"), oracle::tree_files(oracle::fixtures_dir() / "golden"));
    const auto log = json::parse(ca::read_file(tmp / "out" / cli::kRunLogFile));
    EXPECT_EQ(log["stages"].size(), 4u);
}

TEST(Pipeline, StagesRunSeparatelyGiveTheSameOutputs)
{
    oracle::TempDir tmp("stages");
    const auto cfg = oracle::fixture_config(tmp.path());
    for (auto s : cli::kAllStages) cli::Pipeline(cfg).run({s});
    EXPECT_EQ(oracle::compare_tree(oracle::fixtures_dir() / "golden", tmp / "out"), "");
}

TEST(Pipeline, AuditWithoutScansNamesTheMissingFile)
{
    oracle::TempDir tmp("dependency");
    cli::Pipeline pipeline(oracle::fixture_config(tmp.path()));
    try {
        pipeline.run({cli::Stage::audit});
        FAIL() << "expected StageDependencyError";
    } catch (const cli::StageDependencyError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("stage audit needs"), std::string::npos) << what;
        EXPECT_NE(what.find(cli::kGraphFile), std::string::npos) << what;
    }
    pipeline.run({cli::Stage::ingest});
    try {
        pipeline.run({cli::Stage::audit});
        FAIL() << "expected StageDependencyError";
    } catch (const cli::StageDependencyError& e) {
        EXPECT_NE(std::string(e.what()).find(cli::kScansFile), std::string::npos);
    }
}

TEST(Pipeline, MissingTemplateDirectoryFailsAtStartup)
{
    oracle::TempDir tmp("templates");
    auto cfg = oracle::fixture_config(tmp.path());
    cfg.templates = tmp / "no-templates";
    try {
        cli::Pipeline p(cfg);
        FAIL() << "expected ConfigError";
    } catch (const ca::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find((tmp / "no-templates").string()), std::string::npos);
    }
    EXPECT_FALSE(fs::exists(tmp / "out"));
}

TEST(Pipeline, FailingStageReportsAndKeepsEarlierOutputs)
{
    oracle::TempDir tmp("failing");
    auto cfg = oracle::fixture_config(tmp.path());
    write(tmp / "bad.jsonl", "{\"id\": \n");
    cfg.snapshots = {tmp / "bad.jsonl"};
    cli::Pipeline p(cfg);
    try {
        p.run_all();
        FAIL() << "expected StageError";
    } catch (const cli::StageError& e) {
        EXPECT_EQ(e.stage, cli::Stage::ingest);
    }
    const auto log = json::parse(ca::read_file(tmp / "out" / cli::kRunLogFile));
    ASSERT_EQ(log["stages"].size(), 1u);
    EXPECT_FALSE(log["stages"][0]["ok"].get<bool>());
}

TEST(Pipeline, LockRejectsConcurrentRuns)
{
    oracle::TempDir tmp("lock");
    const auto cfg = oracle::fixture_config(tmp.path());
    cli::OutputLock held(cfg.out_dir);
    EXPECT_THROW(cli::Pipeline(cfg).run({cli::Stage::ingest}), cli::LockError);
}

// Command line

TEST(Cli, ExitCodes)
{
    oracle::TempDir tmp("exit");
    const auto log = tmp / "log.txt";
    const auto cfg_path = (oracle::fixtures_dir() / "corpus" / "config.json").string();
    const auto out = (tmp / "out").string();

    EXPECT_NE(run_cli("", log), 0);
    EXPECT_EQ(run_cli("--version", log), 0);
    EXPECT_EQ(run_cli("run --config '" + (tmp / "absent.json").string() + "'", log), 2);
    EXPECT_EQ(run_cli("run --config '" + cfg_path + "' --out-dir '" + out + "' --stage audit", log), 4);
    EXPECT_NE(ca::read_file(log).find("run the earlier stages first"), std::string::npos);

    {
        cli::OutputLock held(out);
        EXPECT_EQ(run_cli("run --config '" + cfg_path + "' --out-dir '" + out + "'", log), 6);
    }

    ScopedEnv cache(cli::kCacheDirEnv, (tmp / "cache").c_str());
    EXPECT_EQ(run_cli("run --config '" + cfg_path + "' --out-dir '" + out + "'", log), 0);
    EXPECT_NE(ca::read_file(log).find("# License audit summary"), std::string::npos);
    EXPECT_EQ(oracle::compare_tree(oracle::fixtures_dir() / "golden", out), "");

    write(tmp / "bad.jsonl", "{\"id\": \n");
    write(tmp / "bad.json", json{{"snapshots", {(tmp / "bad.jsonl").string()}}, {"out_dir", (tmp / "o2").string()}}.dump());
    EXPECT_EQ(run_cli("run --config '" + (tmp / "bad.json").string() + "'", log), 3);

    write(tmp / "ids.txt", "o/a\n");
    {
        ScopedEnv no_token(cli::kHubTokenEnv, nullptr);
        EXPECT_EQ(run_cli("crawl --kind model --ids '" + (tmp / "ids.txt").string() + "' --out '" +
                              (tmp / "crawl.jsonl").string() + "' --endpoint http://127.0.0.1:9",
                          log),
                  5);
    }
}

TEST(Cli, SubcommandsOnFixtures)
{
    oracle::TempDir tmp("sub");
    const auto log = tmp / "log.txt";
    const auto corpus = oracle::fixtures_dir() / "corpus";
    EXPECT_EQ(run_cli("report --snapshot '" + (corpus / "snapshot.jsonl").string() + "' --out '" +
                          (tmp / "lineage.csv").string() + "'",
                      log),
              0);
    EXPECT_EQ(ca::read_file(tmp / "lineage.csv"),
              ca::read_file(oracle::fixtures_dir() / "golden" / "reports" / "lineage_disclosure.csv"));
    EXPECT_EQ(run_cli("histogram --code-hits '" + (corpus / "code_hits.jsonl").string() + "' --out '" +
                          (tmp / "ext.csv").string() + "'",
                      log),
              0);
    EXPECT_FALSE(ca::read_file(tmp / "ext.csv").empty());
    EXPECT_NE(run_cli("histogram", log), 0);

    // Stage-by-stage subcommands reproduce the pipeline outputs.
    const auto g = (tmp / "graph.jsonl").string();
    ASSERT_EQ(run_cli("ingest --config '" + (corpus / "config.json").string() + "' --out '" + g + "'", log), 0)
        << ca::read_file(log);
    ASSERT_EQ(run_cli("fetch --config '" + (corpus / "config.json").string() + "' --graph '" + g + "' --cache-dir '" +
                          (tmp / "cache").string() + "'",
                      log),
              0)
        << ca::read_file(log);
    ASSERT_EQ(run_cli("scan --retrieval '" + (tmp / "retrieval.jsonl").string() + "' --cache-dir '" +
                          (tmp / "cache").string() + "'",
                      log),
              0)
        << ca::read_file(log);
    ASSERT_EQ(run_cli("audit --graph '" + g + "' --scans '" + (tmp / "scans.jsonl").string() + "' --out-dir '" +
                          (tmp / "reports").string() + "'",
                      log),
              0)
        << ca::read_file(log);
    const auto golden = oracle::fixtures_dir() / "golden";
    for (auto f : {"graph.jsonl", "retrieval.jsonl", "scans.jsonl"}) {
        EXPECT_EQ(ca::read_file(tmp / f), ca::read_file(golden / f)) << f;
    }
    for (auto f : {"integrity.csv", "slices.csv", "org_compliance.csv", "payload_gap.csv", "summary.md"}) {
        EXPECT_EQ(ca::read_file(tmp / "reports" / f), ca::read_file(golden / "reports" / f)) << f;
    }
}
