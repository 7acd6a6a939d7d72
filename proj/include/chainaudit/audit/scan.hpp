#pragma once
#ifndef CHAINAUDIT_AUDIT_SCAN_HPP
#define CHAINAUDIT_AUDIT_SCAN_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainaudit/audit/notice.hpp"
#include "chainaudit/graph/types.hpp"
#include "chainaudit/license/copyright.hpp"
#include "chainaudit/license/detect.hpp"
#include "chainaudit/license/labels.hpp"
#include "chainaudit/retrieval/fetch.hpp"

namespace chainaudit::audit {

struct ScannedFile {
    std::string path;
    retrieval::FileClass file_class = retrieval::FileClass::none;
    std::uint64_t size_bytes = 0;
    std::string hash;

    friend bool operator==(const ScannedFile&, const ScannedFile&) = default;
};

/// Everything the audits need from one artifact's retrieved files.
struct ArtifactScan {
    graph::ArtifactKind kind = graph::ArtifactKind::model;
    std::string id;
    bool retrievable = true;
    std::vector<ScannedFile> files;
    std::vector<retrieval::FetchFailure> failures;
    std::vector<license::LicenseDetection> detections;
    std::vector<license::CopyrightNotice> notices;
    std::vector<license::LicenseReference> references;
    std::string text;  // normalized concatenation of all file contents, in path order

    [[nodiscard]] graph::NodeKey key() const { return {kind, id}; }

    [[nodiscard]] bool has_class(bool license_class) const
    {
        return std::any_of(files.begin(), files.end(), [&](const ScannedFile& f) {
            return license_class ? retrieval::is_license_class(f.file_class)
                                 : f.file_class == retrieval::FileClass::readme;
        });
    }

    [[nodiscard]] std::vector<std::string> normalized_notices() const
    {
        std::vector<std::string> out;
        for (const auto& n : notices) {
            out.push_back(normalize_notice(n.raw_text));
        }
        return out;
    }
};

using ScanTable = std::map<graph::NodeKey, ArtifactScan>;

inline ArtifactScan scan_artifact(graph::ArtifactKind kind, const std::string& id,
                                  std::vector<retrieval::RetrievedFile> files,
                                  std::vector<retrieval::FetchFailure> failures, std::size_t planned,
                                  const license::TemplateCorpus& corpus)
{
    std::sort(files.begin(), files.end(),
              [](const retrieval::RetrievedFile& a, const retrieval::RetrievedFile& b) { return a.path < b.path; });
    std::sort(failures.begin(), failures.end(),
              [](const retrieval::FetchFailure& a, const retrieval::FetchFailure& b) { return a.path < b.path; });
    ArtifactScan scan;
    scan.kind = kind;
    scan.id = id;
    scan.retrievable = planned == 0 || !files.empty();
    scan.failures = std::move(failures);
    scan.detections = license::detect_licenses(files, corpus);
    scan.references = license::find_license_references(files, corpus);
    for (const auto& f : files) {
        scan.files.push_back({f.path, f.file_class, f.size_bytes, f.content_hash});
        auto notices = license::extract_copyrights(f);
        scan.notices.insert(scan.notices.end(), notices.begin(), notices.end());
        scan.text += normalize_notice(f.content);
    }
    return scan;
}

/// Best present-level detection: highest coverage, ties by id. Partial
/// matches do not name a license.
inline std::optional<std::string> detected_label(const ArtifactScan& scan,
                                                 double threshold = license::kPresentCoverage)
{
    const auto best = license::max_coverage_by_license(scan.detections);
    std::optional<std::string> label;
    double top = -1.0;
    for (const auto& [id, cov] : best) {
        if (cov >= threshold && cov > top) {
            top = cov;
            label = id;
        }
    }
    return label;
}

/// Hub artifacts use their metadata label. Forge applications take the label
/// found in their files and fall back to any declared label.
inline std::optional<std::string> effective_label(const graph::ArtifactRecord& record, const ArtifactScan* scan,
                                                  const license::LabelTables& tables,
                                                  double threshold = license::kPresentCoverage)
{
    if (record.platform == graph::Platform::forge && scan) {
        if (auto detected = detected_label(*scan, threshold)) {
            return tables.normalize(*detected);
        }
    }
    if (record.declared_license) {
        return tables.normalize(*record.declared_license);
    }
    return std::nullopt;
}

// JSON

inline nlohmann::ordered_json to_json(const ArtifactScan& s)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["kind"] = graph::to_string(s.kind);
    j["id"] = s.id;
    j["retrievable"] = s.retrievable;
    j["files"] = ordered_json::array();
    for (const auto& f : s.files) {
        j["files"].push_back(
            {{"path", f.path}, {"file_class", retrieval::to_string(f.file_class)}, {"size", f.size_bytes}, {"hash", f.hash}});
    }
    j["failures"] = ordered_json::array();
    for (const auto& f : s.failures) {
        j["failures"].push_back({{"path", f.path}, {"reason", f.reason}});
    }
    j["detections"] = ordered_json::array();
    for (const auto& d : s.detections) {
        j["detections"].push_back({{"spdx_id", d.spdx_id},
                                   {"coverage", d.coverage},
                                   {"file_path", d.file_path},
                                   {"location_class", retrieval::to_string(d.location_class)}});
    }
    j["notices"] = ordered_json::array();
    for (const auto& n : s.notices) {
        j["notices"].push_back({{"raw_text", n.raw_text},
                                {"holder", n.holder},
                                {"years", n.years},
                                {"file_path", n.file_path},
                                {"location_class", retrieval::to_string(n.location_class)}});
    }
    j["references"] = ordered_json::array();
    for (const auto& r : s.references) {
        j["references"].push_back({{"spdx_id", r.spdx_id},
                                   {"file_path", r.file_path},
                                   {"location_class", retrieval::to_string(r.location_class)}});
    }
    j["text"] = s.text;
    return j;
}

inline ArtifactScan scan_from_json(const nlohmann::json& j)
{
    using retrieval::file_class_from_string;
    ArtifactScan s;
    s.kind = graph::kind_from_string(j.at("kind").get<std::string>());
    s.id = j.at("id").get<std::string>();
    s.retrievable = j.at("retrievable").get<bool>();
    for (const auto& f : j.at("files")) {
        s.files.push_back({f.at("path").get<std::string>(), file_class_from_string(f.at("file_class").get<std::string>()),
                           f.at("size").get<std::uint64_t>(), f.at("hash").get<std::string>()});
    }
    for (const auto& f : j.value("failures", nlohmann::json::array())) {
        s.failures.push_back({f.at("path").get<std::string>(), f.at("reason").get<std::string>()});
    }
    for (const auto& d : j.at("detections")) {
        s.detections.push_back({d.at("spdx_id").get<std::string>(), d.at("coverage").get<double>(),
                                d.at("file_path").get<std::string>(),
                                file_class_from_string(d.at("location_class").get<std::string>())});
    }
    for (const auto& n : j.at("notices")) {
        s.notices.push_back({n.at("raw_text").get<std::string>(), n.at("holder").get<std::string>(),
                             n.at("years").get<std::vector<int>>(), n.at("file_path").get<std::string>(),
                             file_class_from_string(n.at("location_class").get<std::string>())});
    }
    for (const auto& r : j.value("references", nlohmann::json::array())) {
        s.references.push_back({r.at("spdx_id").get<std::string>(), r.at("file_path").get<std::string>(),
                                file_class_from_string(r.at("location_class").get<std::string>())});
    }
    s.text = j.at("text").get<std::string>();
    return s;
}

/// One JSON line per artifact, sorted by (kind, id).
inline std::string write_scans(const ScanTable& scans)
{
    std::string out;
    for (const auto& [_, s] : scans) {
        out += to_json(s).dump();
        out += '\n';
    }
    return out;
}

inline ScanTable parse_scans(std::string_view text, const std::string& source = "<scans>")
{
    ScanTable scans;
    std::size_t line_no = 0;
    for (auto line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        try {
            auto s = scan_from_json(nlohmann::json::parse(line));
            auto key = s.key();
            if (!scans.emplace(key, std::move(s)).second) {
                throw FormatError("duplicate scan for " + graph::key_string(key));
            }
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(source + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw FormatError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return scans;
}

inline ScanTable load_scans(const std::filesystem::path& path)
{
    return parse_scans(read_file(path), path.string());
}

}  // namespace chainaudit::audit

#endif  // CHAINAUDIT_AUDIT_SCAN_HPP
