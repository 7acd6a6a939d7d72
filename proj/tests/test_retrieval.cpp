#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "chainaudit/retrieval/coverage.hpp"
#include "chainaudit/retrieval/fetch.hpp"
#include "chainaudit/retrieval/histogram.hpp"
#include "chainaudit/retrieval/patterns.hpp"

using namespace chainaudit;
using namespace chainaudit::retrieval;

namespace {

std::filesystem::path temp_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("chainaudit_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

FileClient map_client(const std::map<std::string, std::string>& files)
{
    return [files](std::string_view path) -> std::optional<std::string> {
        auto it = files.find(std::string(path));
        if (it == files.end()) return std::nullopt;
        return it->second;
    };
}

}  // namespace

TEST(Patterns, RegexSourcesFollowTheAppendixConstruction)
{
    const auto& p = default_patterns();
    std::string alternation;
    for (const auto& k : default_license_keywords()) {
        alternation += (alternation.empty() ? "" : "|") + k;
    }
    EXPECT_EQ(p.license_regex_source(), "^(.*\\/)?([a-z0-9._-]+\\.)?(" + alternation + ")(\\.[a-z0-9\\._-]+)?$");
    EXPECT_EQ(p.readme_regex_source(), "^(.*\\/)?(readme|read_me|read-me)(\\..*)?$");
}

TEST(Patterns, AppendixWorkedExamples)
{
    EXPECT_EQ(classify_path("LICENSE"), FileClass::root_license);
    EXPECT_EQ(classify_path("LICENSE.md"), FileClass::root_license);
    EXPECT_EQ(classify_path("pkg.license.txt"), FileClass::root_license);
    EXPECT_EQ(classify_path("README.md"), FileClass::readme);
    EXPECT_EQ(classify_path("READ_ME.rst"), FileClass::readme);
    EXPECT_EQ(classify_path("docs/readme.txt"), FileClass::readme);
}

TEST(Patterns, LocationClasses)
{
    EXPECT_EQ(classify_path("src/third_party/LICENSE"), FileClass::scattered_license);
    EXPECT_EQ(classify_path("legal/attribution.txt"), FileClass::directory_license);
    EXPECT_EQ(classify_path("legal/readme.md"), FileClass::directory_license);  // license wins
    EXPECT_EQ(classify_path("Licenses/apache.txt"), FileClass::directory_license);
    EXPECT_EQ(classify_path("model.safetensors"), FileClass::none);
    EXPECT_EQ(classify_path("NOTICE"), FileClass::root_license);
    EXPECT_EQ(classify_path("COPYING"), FileClass::root_license);
    EXPECT_EQ(classify_path("docs/CITATION.cff"), FileClass::scattered_license);
    EXPECT_EQ(classify_path("licensed.py"), FileClass::none);
    EXPECT_EQ(classify_path("readmes/x.txt"), FileClass::none);
}

TEST(Patterns, ConfigurableKeywordLists)
{
    PatternSet custom({"eula"}, {"legalese"}, {"about"});
    EXPECT_EQ(custom.classify("EULA.txt"), FileClass::root_license);
    EXPECT_EQ(custom.classify("LICENSE"), FileClass::none);
    EXPECT_EQ(custom.classify("legalese/x.bin"), FileClass::directory_license);
    EXPECT_EQ(custom.classify("ABOUT.md"), FileClass::readme);
}

TEST(PatternProperties, CaseInsensitiveAndPlanSubsetOfInput)
{
    std::mt19937 rng(2024);
    const std::vector<std::string> parts = {"LICENSE", "readme", "src", "legal", "Notice", "model", "weights",
                                            "Read-Me", "docs", "copying", "data", "terms", "x", "third_party"};
    const std::vector<std::string> exts = {"", ".md", ".txt", ".bin", ".py", ".RST", ".json"};
    std::vector<TreeEntry> tree;
    for (int i = 0; i < 200; ++i) {
        std::string path;
        const int depth = 1 + static_cast<int>(rng() % 3);
        for (int d = 0; d < depth; ++d) {
            if (d > 0) path += '/';
            path += parts[rng() % parts.size()];
        }
        path += exts[rng() % exts.size()];
        for (auto& c : path) {
            if (rng() % 2) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        EXPECT_EQ(classify_path(path), classify_path(to_upper_ascii(path))) << path;
        EXPECT_EQ(classify_path(path), classify_path(to_lower_ascii(path))) << path;
        tree.push_back({path, rng() % 2 ? 100ULL : (400ULL << 20)});
    }
    const auto plan = select_files(tree);
    std::set<std::string> input;
    for (const auto& e : tree) input.insert(e.path);
    for (const auto& f : plan.files) {
        EXPECT_TRUE(input.count(f.path)) << f.path;
        EXPECT_NE(f.file_class, FileClass::none);
        EXPECT_EQ(f.file_class, classify_path(f.path));
        EXPECT_LE(f.size_bytes, kDefaultMaxFileBytes);
    }
    for (const auto& s : plan.skipped) {
        EXPECT_TRUE(input.count(s.path));
        EXPECT_EQ(s.reason, "oversize");
    }
}

TEST(SelectFiles, Examples)
{
    auto plan = select_files({{"LICENSE", 1024}, {"weights.bin", 4ULL << 30}, {"README.md", 2048}});
    ASSERT_EQ(plan.files.size(), 2U);
    EXPECT_EQ(plan.files[0].path, "LICENSE");
    EXPECT_EQ(plan.files[1].path, "README.md");
    EXPECT_TRUE(plan.skipped.empty());

    plan = select_files({{"NOTICE", 400ULL << 20}});
    EXPECT_TRUE(plan.files.empty());
    ASSERT_EQ(plan.skipped.size(), 1U);
    EXPECT_EQ(plan.skipped[0], (SkippedFile{"NOTICE", 400ULL << 20, "oversize"}));

    plan = select_files({});
    EXPECT_TRUE(plan.files.empty());
    EXPECT_TRUE(plan.skipped.empty());
}

TEST(FetchFiles, Examples)
{
    RetrievalPlan plan;
    plan.files = {{"LICENSE", FileClass::root_license, 3}, {"README.md", FileClass::readme, 2}};
    auto both = fetch_files("o/a", plan, map_client({{"LICENSE", "MIT"}, {"README.md", "hi"}}));
    EXPECT_EQ(both.files.size(), 2U);
    EXPECT_TRUE(both.failures.empty());

    auto one = fetch_files("o/a", plan, map_client({{"LICENSE", "MIT"}}));
    ASSERT_EQ(one.files.size(), 1U);
    ASSERT_EQ(one.failures.size(), 1U);
    EXPECT_EQ(one.failures[0], (FetchFailure{"README.md", "not found"}));
    EXPECT_TRUE(one.retrievable(2));

    auto none = fetch_files("o/a", plan, map_client({}));
    EXPECT_FALSE(none.retrievable(2));
    EXPECT_TRUE(none.retrievable(0));
}

TEST(FetchFiles, InvalidUtf8DecodedWithReplacement)
{
    RetrievalPlan plan;
    plan.files = {{"LICENSE", FileClass::root_license, 0}};
    const std::string raw = std::string("MIT \xC3\x28 License \xFF");
    auto r = fetch_files("o/a", plan, map_client({{"LICENSE", raw}}));
    ASSERT_EQ(r.files.size(), 1U);
    EXPECT_EQ(r.files[0].content, "MIT \xEF\xBF\xBD( License \xEF\xBF\xBD");
    EXPECT_EQ(r.files[0].size_bytes, raw.size());
    EXPECT_EQ(r.files[0].content_hash, sha256_hex(raw));
}

TEST(FetchFiles, ClientErrorsAndOversizeAreRecorded)
{
    RetrievalPlan plan;
    plan.files = {{"LICENSE", FileClass::root_license, 0}, {"NOTICE", FileClass::root_license, 0}};
    FileClient client = [](std::string_view path) -> std::optional<std::string> {
        if (path == "LICENSE") throw IoError("timeout");
        return std::string(64, 'x');
    };
    auto r = fetch_files("o/a", plan, client, nullptr, 10);
    EXPECT_TRUE(r.files.empty());
    ASSERT_EQ(r.failures.size(), 2U);
    EXPECT_EQ(r.failures[0].reason, "error: timeout");
    EXPECT_EQ(r.failures[1].reason, "oversize");
}

TEST(FetchFiles, DeterministicWithCache)
{
    const auto dir = temp_dir("cache");
    RetrievalPlan plan;
    plan.files = {{"LICENSE", FileClass::root_license, 0}, {"README.md", FileClass::readme, 0}};
    std::map<std::string, std::string> files{{"LICENSE", "MIT License"}, {"README.md", "# x"}};
    int calls = 0;
    FileClient counting = [&](std::string_view p) -> std::optional<std::string> {
        ++calls;
        return files.at(std::string(p));
    };
    std::vector<std::pair<std::string, std::string>> first;
    {
        ContentCache cache(dir);
        auto r = fetch_files("o/a", plan, counting, &cache, kDefaultMaxFileBytes, "model:o/a");
        for (const auto& f : r.files) first.emplace_back(f.path, f.content_hash);
        cache.save_index();
    }
    EXPECT_EQ(calls, 2);
    ContentCache reopened(dir);
    auto again = fetch_files("o/a", plan, counting, &reopened, kDefaultMaxFileBytes, "model:o/a");
    EXPECT_EQ(calls, 2);  // served from the cache
    std::vector<std::pair<std::string, std::string>> second;
    for (const auto& f : again.files) second.emplace_back(f.path, f.content_hash);
    EXPECT_EQ(first, second);
    EXPECT_EQ(again.files[0].content, "MIT License");
    EXPECT_EQ(reopened.lookup("model:o/a", "LICENSE"), sha256_hex("MIT License"));
    EXPECT_FALSE(reopened.lookup("model:o/b", "LICENSE"));
    std::filesystem::remove_all(dir);
}

TEST(Coverage, AppendixVerdicts)
{
    EXPECT_EQ(validate_retrieval_coverage({"MIT"}, {"MIT"}).category, CoverageCategory::perfect_match);
    EXPECT_EQ(validate_retrieval_coverage({"MIT"}, {"MIT", "Apache-2.0"}).category, CoverageCategory::partial_match);
    EXPECT_EQ(validate_retrieval_coverage({}, {"MIT"}).category, CoverageCategory::complete_miss);
    EXPECT_EQ(validate_retrieval_coverage({}, {}).category, CoverageCategory::perfect_match);
}

TEST(Coverage, Reflexive)
{
    std::mt19937 rng(11);
    const std::vector<std::string> ids = {"MIT", "Apache-2.0", "BSD-3-Clause", "GPL-3.0", "CC0-1.0"};
    for (int i = 0; i < 100; ++i) {
        std::set<std::string> x;
        for (const auto& id : ids) {
            if (rng() % 2) x.insert(id);
        }
        EXPECT_EQ(validate_retrieval_coverage(x, x).category, CoverageCategory::perfect_match);
    }
}

TEST(Coverage, TableCsv)
{
    CoverageTally datasets;
    datasets.add(CoverageCategory::perfect_match);
    datasets.add(CoverageCategory::partial_match);
    datasets.add(CoverageCategory::complete_miss);
    CoverageTally models;
    models.add(CoverageCategory::perfect_match);
    const auto csv = coverage_table_csv({{"dataset", datasets}, {"model", models}});
    EXPECT_EQ(csv,
              "metric,dataset,model,combined\n"
              "total_repos,3,1,4\n"
              "perfect_match,1 (33.3%),1 (100.0%),2 (50.0%)\n"
              "partial_match,1 (33.3%),0 (0.0%),1 (25.0%)\n"
              "any_match,2 (66.7%),1 (100.0%),3 (75.0%)\n"
              "complete_miss,1 (33.3%),0 (0.0%),1 (25.0%)\n");
}

TEST(Histogram, Examples)
{
    auto t = file_extension_histogram({"a.py", "b.py", "c.md"});
    ASSERT_EQ(t.size(), 2U);
    EXPECT_EQ(t[0].extension, ".py");
    EXPECT_EQ(t[0].count, 2U);
    EXPECT_NEAR(t[0].percent, 66.7, 0.05);
    EXPECT_EQ(t[1].extension, ".md");
    EXPECT_NEAR(t[1].percent, 33.3, 0.05);

    t = file_extension_histogram({"Makefile"});
    ASSERT_EQ(t.size(), 1U);
    EXPECT_EQ(t[0].extension, "No Extension");
    EXPECT_DOUBLE_EQ(t[0].percent, 100.0);

    EXPECT_TRUE(file_extension_histogram({}).empty());
}

TEST(Histogram, ExtensionRules)
{
    EXPECT_EQ(file_extension("src/Main.PY"), ".py");
    EXPECT_EQ(file_extension(".gitignore"), "No Extension");
    EXPECT_EQ(file_extension("dir.d/file"), "No Extension");
    EXPECT_EQ(file_extension("archive.tar.gz"), ".gz");
}

TEST(Histogram, CsvShares)
{
    std::vector<std::string> paths;
    for (int i = 0; i < 4; ++i) paths.push_back("f" + std::to_string(i) + ".py");
    for (int i = 0; i < 2; ++i) paths.push_back("g" + std::to_string(i) + ".md");
    paths.push_back("Makefile");
    paths.push_back("x.ipynb");
    EXPECT_EQ(file_extension_csv(paths, 3),
              "extension,count,percent,percent_of_py\n"
              ".py,4,50.00,100.00\n"
              ".md,2,25.00,50.00\n"
              ".ipynb,1,12.50,25.00\n");
    // Published shares: .md relative to .py.
    EXPECT_EQ(format_percent(713597, 1449523, 2), "49.23");
}
