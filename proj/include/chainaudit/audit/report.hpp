#pragma once
#ifndef CHAINAUDIT_AUDIT_REPORT_HPP
#define CHAINAUDIT_AUDIT_REPORT_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainaudit/audit/attribution.hpp"
#include "chainaudit/audit/integrity.hpp"
#include "chainaudit/audit/org.hpp"
#include "chainaudit/audit/payload.hpp"

namespace chainaudit::audit {

struct AuditOptions {
    std::size_t top_orgs = 15;
    double coverage_threshold = license::kPresentCoverage;
};

struct AuditBundle {
    std::size_t chains = 0;
    PermissiveSubset subset;
    VerdictTable verdicts;
    std::map<graph::ArtifactKind, IntegrityRow> integrity;
    std::vector<SliceResult> slices;
    OrgTable orgs;
    std::vector<PayloadGapRow> payload_gap;
    std::vector<LocationRow> locations;
};

/// Integrity runs on the permissive subset; slices and the payload gap use
/// the whole graph.
inline AuditBundle run_audit(const graph::SupplyGraph& g, const ScanTable& scans, const license::LabelTables& tables,
                             const AuditOptions& opts = {})
{
    AuditBundle b;
    const auto chains = graph::enumerate_chains(g);
    b.chains = chains.size();
    const auto labels = graph_labels(g, scans, tables, opts.coverage_threshold);
    LabelLookup lookup = [&](const graph::NodeKey& k) -> std::optional<std::string> {
        auto it = labels.find(k);
        return it == labels.end() ? std::nullopt : it->second;
    };
    b.subset = filter_permissive_chains(chains, lookup, tables);
    b.verdicts = integrity_audit(b.subset.artifacts(), lookup, scans, tables, opts.coverage_threshold);
    b.integrity = integrity_table(b.verdicts);
    b.slices = run_all_slices(g, b.verdicts, scans);
    b.orgs = org_compliance(b.verdicts, g, opts.top_orgs);
    b.payload_gap = payload_gap_report(g, scans);
    b.locations = license_location_report(b.verdicts, scans, opts.coverage_threshold);
    return b;
}

namespace detail {

inline nlohmann::ordered_json row_json(const IntegrityRow& r)
{
    return {{"total", r.total},
            {"has_license_text", r.license_text},
            {"has_license_text_pct", format_percent(r.license_text, r.total, 1)},
            {"has_copyright", r.copyright},
            {"has_copyright_pct", format_percent(r.copyright, r.total, 1)},
            {"fully_compliant", r.compliant},
            {"fully_compliant_pct", format_percent(r.compliant, r.total, 1)}};
}

inline nlohmann::ordered_json split_json(const LocationSplit& s)
{
    return {{"license_files", s.license_file}, {"readme_files", s.readme_file}};
}

}  // namespace detail

inline nlohmann::ordered_json integrity_json(const AuditBundle& b)
{
    nlohmann::ordered_json j;
    j["permissive_chains"] = b.subset.chains.size();
    for (const auto& [kind, r] : b.integrity) {
        j["rows"][std::string(graph::to_string(kind))] = detail::row_json(r);
    }
    return j;
}

inline nlohmann::ordered_json slices_json(const std::vector<SliceResult>& results)
{
    auto j = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json s{{"slice", to_string(r.slice)},
                                 {"evaluated", r.evaluated},
                                 {"preserved", r.preserved},
                                 {"not_preserved", r.not_preserved()},
                                 {"rate", r.rate()}};
        if (r.slice == AttributionSlice::S2_CM_to_A) {
            s["inherited_evaluated"] = r.inherited_evaluated;
            s["inherited_preserved"] = r.inherited_preserved;
        }
        j.push_back(std::move(s));
    }
    return j;
}

inline nlohmann::ordered_json org_json(const OrgTable& t)
{
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        auto row = detail::row_json(r.counts);
        row["organization"] = r.organization;
        row["followers"] = r.followers;
        j["rows"].push_back(std::move(row));
    }
    j["total"] = detail::row_json(t.total);
    return j;
}

inline nlohmann::ordered_json payload_gap_json(const std::vector<PayloadGapRow>& rows)
{
    auto j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        j.push_back({{"artifact", graph::to_string(r.artifact_kind)},
                     {"total", r.total},
                     {"missing_readme", r.missing_readme},
                     {"missing_license", r.missing_license_file},
                     {"missing_either", r.missing_either}});
    }
    return j;
}

inline nlohmann::ordered_json locations_json(const std::vector<LocationRow>& rows)
{
    auto j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        j.push_back({{"artifact", graph::to_string(r.kind)},
                     {"total", r.total},
                     {"text", detail::split_json(r.text)},
                     {"reference", detail::split_json(r.reference)},
                     {"copyright", detail::split_json(r.copyright)}});
    }
    return j;
}

inline std::string summary_markdown(const AuditBundle& b)
{
    std::string md = "# License audit summary\n\n";
    md += "Supply chains: " + std::to_string(b.chains) + "; fully permissive: " +
          std::to_string(b.subset.chains.size()) + " (" + std::to_string(b.subset.datasets.size()) + " datasets, " +
          std::to_string(b.subset.models.size()) + " models, " + std::to_string(b.subset.applications.size()) +
          " applications).\n\n";
    md += "## License integrity of permissively-labeled artifacts\n\n";
    md += "| Artifact | Total | Has License Text | Has Copyright | Fully Compliant |\n";
    md += "|---|---:|---:|---:|---:|\n";
    for (const auto& [kind, r] : b.integrity) {
        md += "| " + std::string(graph::to_string(kind)) + " | " + std::to_string(r.total) + " | " +
              count_with_percent(r.license_text, r.total) + " | " + count_with_percent(r.copyright, r.total) + " | " +
              count_with_percent(r.compliant, r.total) + " |\n";
    }
    md += "\n## Attribution preservation from compliant upstream artifacts\n\n";
    md += "| Slice | Evaluated | Preserved | Not Preserved | Rate |\n";
    md += "|---|---:|---:|---:|---:|\n";
    for (const auto& r : b.slices) {
        const auto rate = r.rate();
        md += "| " + std::string(slice_label(r.slice)) + " | " + std::to_string(r.evaluated) + " | " +
              std::to_string(r.preserved) + " | " + std::to_string(r.not_preserved()) + " | " +
              (rate == "N/A" ? rate : rate + "%") + " |\n";
    }
    for (const auto& r : b.slices) {
        if (r.slice == AttributionSlice::S2_CM_to_A && r.inherited_evaluated > 0) {
            md += "\nS2 excludes " + std::to_string(r.inherited_evaluated) +
                  " links inherited through base models (" + std::to_string(r.inherited_preserved) + " preserved).\n";
        }
    }
    md += "\n## Availability of LICENSE/README files\n\n";
    md += "| Artifact | Total | Missing README | Missing LICENSE | Missing Either |\n";
    md += "|---|---:|---:|---:|---:|\n";
    for (const auto& r : b.payload_gap) {
        md += "| " + std::string(graph::to_string(r.artifact_kind)) + " | " + std::to_string(r.total) + " | " +
              count_with_percent(r.missing_readme, r.total) + " | " +
              count_with_percent(r.missing_license_file, r.total) + " | " +
              count_with_percent(r.missing_either, r.total) + " |\n";
    }
    return md;
}

/// Writes the full report bundle. File names are fixed; contents depend only
/// on the inputs.
inline std::vector<std::filesystem::path> write_reports(const AuditBundle& b, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::vector<std::pair<std::string, std::string>> files{
        {"integrity.csv", integrity_csv(b.integrity)},
        {"integrity.json", integrity_json(b).dump(2) + "\n"},
        {"verdicts.csv", verdicts_csv(b.verdicts)},
        {"slices.csv", slices_csv(b.slices)},
        {"slices.json", slices_json(b.slices).dump(2) + "\n"},
        {"slice_links.csv", slice_links_csv(b.slices)},
        {"org_compliance.csv", org_csv(b.orgs)},
        {"org_compliance.json", org_json(b.orgs).dump(2) + "\n"},
        {"payload_gap.csv", payload_gap_csv(b.payload_gap)},
        {"payload_gap.json", payload_gap_json(b.payload_gap).dump(2) + "\n"},
        {"license_locations.csv", license_locations_csv(b.locations)},
        {"license_locations.json", locations_json(b.locations).dump(2) + "\n"},
        {"summary.md", summary_markdown(b)},
    };
    std::vector<std::filesystem::path> written;
    for (const auto& [name, body] : files) {
        write_file_atomic(out_dir / name, body);
        written.push_back(out_dir / name);
    }
    return written;
}

}  // namespace chainaudit::audit

#endif  // CHAINAUDIT_AUDIT_REPORT_HPP
