#pragma once
#ifndef CHAINAUDIT_AUDIT_PAYLOAD_HPP
#define CHAINAUDIT_AUDIT_PAYLOAD_HPP

#include <map>
#include <string>
#include <vector>

#include "chainaudit/audit/integrity.hpp"
#include "chainaudit/audit/scan.hpp"
#include "chainaudit/graph/supply_graph.hpp"

namespace chainaudit::audit {

struct PayloadGapRow {
    graph::ArtifactKind artifact_kind = graph::ArtifactKind::dataset;
    std::uint64_t total = 0;
    std::uint64_t missing_readme = 0;
    std::uint64_t missing_license_file = 0;
    std::uint64_t missing_either = 0;

    friend bool operator==(const PayloadGapRow&, const PayloadGapRow&) = default;
};

/// Over every artifact in the graph. An artifact without a scan, or whose
/// fetch failed outright, is missing both file kinds.
inline std::vector<PayloadGapRow> payload_gap_report(const graph::SupplyGraph& g, const ScanTable& scans)
{
    std::vector<PayloadGapRow> rows;
    for (auto kind : graph::kAllKinds) {
        PayloadGapRow row;
        row.artifact_kind = kind;
        for (const auto& id : g.ids(kind)) {
            ++row.total;
            auto it = scans.find({kind, id});
            const bool usable = it != scans.end() && it->second.retrievable;
            const bool readme = usable && it->second.has_class(false);
            const bool license_file = usable && it->second.has_class(true);
            row.missing_readme += !readme;
            row.missing_license_file += !license_file;
            row.missing_either += !(readme && license_file);
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::string payload_gap_csv(const std::vector<PayloadGapRow>& rows)
{
    std::string out = csv_row({"artifact", "total", "missing_readme", "missing_license", "missing_either"});
    PayloadGapRow sum;
    for (const auto& r : rows) {
        out += csv_row({std::string(graph::to_string(r.artifact_kind)), std::to_string(r.total),
                        count_with_percent(r.missing_readme, r.total), count_with_percent(r.missing_license_file, r.total),
                        count_with_percent(r.missing_either, r.total)});
        sum.total += r.total;
        sum.missing_readme += r.missing_readme;
        sum.missing_license_file += r.missing_license_file;
        sum.missing_either += r.missing_either;
    }
    out += csv_row({"total", std::to_string(sum.total), count_with_percent(sum.missing_readme, sum.total),
                    count_with_percent(sum.missing_license_file, sum.total),
                    count_with_percent(sum.missing_either, sum.total)});
    return out;
}

enum class Location { license_file, readme_file, none };

/// A hit in any license-class file wins over a README hit.
template <typename Items, typename Pred>
Location locate(const Items& items, Pred&& counts)
{
    bool readme = false;
    for (const auto& item : items) {
        if (!counts(item)) {
            continue;
        }
        if (retrieval::is_license_class(item.location_class)) {
            return Location::license_file;
        }
        readme = readme || item.location_class == retrieval::FileClass::readme;
    }
    return readme ? Location::readme_file : Location::none;
}

struct LocationSplit {
    std::uint64_t license_file = 0;
    std::uint64_t readme_file = 0;

    void add(Location l)
    {
        license_file += l == Location::license_file;
        readme_file += l == Location::readme_file;
    }
    [[nodiscard]] std::uint64_t located() const { return license_file + readme_file; }

    friend bool operator==(const LocationSplit&, const LocationSplit&) = default;
};

struct LocationRow {
    graph::ArtifactKind kind = graph::ArtifactKind::dataset;
    std::uint64_t total = 0;
    LocationSplit text;       // present-level license text
    LocationSplit reference;  // present-level text or a license mention
    LocationSplit copyright;

    friend bool operator==(const LocationRow&, const LocationRow&) = default;
};

inline LocationRow locate_artifact_payload(graph::ArtifactKind kind, const ArtifactScan* scan,
                                           double threshold = license::kPresentCoverage)
{
    LocationRow row;
    row.kind = kind;
    row.total = 1;
    if (!scan || !scan->retrievable) {
        return row;
    }
    auto present = [&](const license::LicenseDetection& d) { return d.coverage >= threshold; };
    auto any = [](const auto&) { return true; };
    const Location text = locate(scan->detections, present);
    Location ref = text == Location::license_file ? text : locate(scan->references, any);
    if (ref == Location::none) {
        ref = text;
    }
    row.text.add(text);
    row.reference.add(ref);
    row.copyright.add(locate(scan->notices, any));
    return row;
}

/// Location table over the audited (permissive) artifacts.
inline std::vector<LocationRow> license_location_report(const VerdictTable& verdicts, const ScanTable& scans,
                                                        double threshold = license::kPresentCoverage)
{
    std::map<graph::ArtifactKind, LocationRow> rows;
    for (auto k : graph::kAllKinds) {
        rows[k].kind = k;
    }
    for (const auto& [key, _] : verdicts) {
        auto it = scans.find(key);
        const auto one = locate_artifact_payload(key.kind, it == scans.end() ? nullptr : &it->second, threshold);
        auto& row = rows[key.kind];
        row.total += 1;
        row.text.license_file += one.text.license_file;
        row.text.readme_file += one.text.readme_file;
        row.reference.license_file += one.reference.license_file;
        row.reference.readme_file += one.reference.readme_file;
        row.copyright.license_file += one.copyright.license_file;
        row.copyright.readme_file += one.copyright.readme_file;
    }
    std::vector<LocationRow> out;
    for (auto& [_, r] : rows) {
        out.push_back(r);
    }
    return out;
}

/// Reference shares are over artifacts with a located reference, so each row
/// splits 100% between the two locations; text and copyright shares are over
/// the kind total.
inline std::string license_locations_csv(const std::vector<LocationRow>& rows)
{
    std::string out = csv_row({"artifact", "total", "text_in_license_files", "text_in_readme_files",
                               "reference_in_license_files", "reference_in_readme_files",
                               "copyright_in_license_files", "copyright_in_readme_files"});
    LocationRow sum;
    auto emit = [&](const std::string& name, const LocationRow& r) {
        out += csv_row({name, std::to_string(r.total), count_with_percent(r.text.license_file, r.total),
                        count_with_percent(r.text.readme_file, r.total),
                        count_with_percent(r.reference.license_file, r.reference.located()),
                        count_with_percent(r.reference.readme_file, r.reference.located()),
                        count_with_percent(r.copyright.license_file, r.total),
                        count_with_percent(r.copyright.readme_file, r.total)});
    };
    for (const auto& r : rows) {
        emit(std::string(graph::to_string(r.kind)), r);
        sum.total += r.total;
        sum.text.license_file += r.text.license_file;
        sum.text.readme_file += r.text.readme_file;
        sum.reference.license_file += r.reference.license_file;
        sum.reference.readme_file += r.reference.readme_file;
        sum.copyright.license_file += r.copyright.license_file;
        sum.copyright.readme_file += r.copyright.readme_file;
    }
    emit("total", sum);
    return out;
}

}  // namespace chainaudit::audit

#endif  // CHAINAUDIT_AUDIT_PAYLOAD_HPP
