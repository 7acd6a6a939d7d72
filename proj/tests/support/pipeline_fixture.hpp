#pragma once
#ifndef CHAINAUDIT_TESTS_PIPELINE_FIXTURE_HPP
#define CHAINAUDIT_TESTS_PIPELINE_FIXTURE_HPP

// Runs the bundled fixture corpus through the pipeline and compares output
// trees byte for byte.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "chainaudit/cli/pipeline.hpp"

namespace chainaudit::oracle {

namespace fs = std::filesystem;

inline fs::path fixtures_dir()
{
    return fs::path(CHAINAUDIT_FIXTURES_DIR);
}

/// Fresh empty directory under the system temp dir; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("chainaudit-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return path_; }
    [[nodiscard]] fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline cli::PipelineConfig fixture_config(const fs::path& work)
{
    auto cfg = cli::load_config(fixtures_dir() / "corpus" / "config.json");
    cfg.out_dir = work / "out";
    cfg.cache_dir = work / "cache";
    return cfg;
}

/// Relative paths of the regular files under `root`, sorted.
inline std::vector<std::string> tree_files(const fs::path& root)
{
    std::vector<std::string> out;
    if (!fs::is_directory(root)) return out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).generic_string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Compares every file of `expected` against the same path under `actual`.
/// Returns the first difference, or an empty string.
inline std::string compare_tree(const fs::path& expected, const fs::path& actual)
{
    const auto files = tree_files(expected);
    if (files.empty()) return "no files under " + expected.string();
    for (const auto& f : files) {
        if (!fs::exists(actual / f)) return "missing " + f;
        if (read_file(expected / f) != read_file(actual / f)) return "differs: " + f;
    }
    return {};
}

/// Output files that must be identical between runs: everything except the
/// timing log and the lock file.
inline std::vector<std::string> deterministic_outputs(const fs::path& out_dir)
{
    std::vector<std::string> out;
    for (const auto& f : tree_files(out_dir)) {
        if (f != cli::kRunLogFile && f != cli::kLockFile) out.push_back(f);
    }
    return out;
}

}  // namespace chainaudit::oracle

#endif  // CHAINAUDIT_TESTS_PIPELINE_FIXTURE_HPP
