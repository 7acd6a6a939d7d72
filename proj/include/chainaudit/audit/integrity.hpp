#pragma once
#ifndef CHAINAUDIT_AUDIT_INTEGRITY_HPP
#define CHAINAUDIT_AUDIT_INTEGRITY_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainaudit/audit/scan.hpp"
#include "chainaudit/graph/supply_graph.hpp"
#include "chainaudit/license/labels.hpp"

namespace chainaudit::audit {

using LabelLookup = std::function<std::optional<std::string>(const graph::NodeKey&)>;

/// Effective labels for every node of a graph.
inline std::map<graph::NodeKey, std::optional<std::string>> graph_labels(const graph::SupplyGraph& g,
                                                                         const ScanTable& scans,
                                                                         const license::LabelTables& tables,
                                                                         double threshold = license::kPresentCoverage)
{
    std::map<graph::NodeKey, std::optional<std::string>> labels;
    for (const auto& [key, rec] : g.nodes()) {
        auto it = scans.find(key);
        labels[key] = effective_label(rec, it == scans.end() ? nullptr : &it->second, tables, threshold);
    }
    return labels;
}

struct PermissiveSubset {
    std::vector<graph::SupplyChain> chains;
    std::set<std::string> datasets;
    std::set<std::string> models;
    std::set<std::string> applications;

    [[nodiscard]] std::vector<graph::NodeKey> artifacts() const
    {
        std::vector<graph::NodeKey> out;
        for (const auto& d : datasets) out.push_back({graph::ArtifactKind::dataset, d});
        for (const auto& m : models) out.push_back({graph::ArtifactKind::model, m});
        for (const auto& a : applications) out.push_back({graph::ArtifactKind::application, a});
        return out;
    }
};

/// Chains whose dataset, model, and application all carry a permissive label.
inline PermissiveSubset filter_permissive_chains(const std::vector<graph::SupplyChain>& chains, const LabelLookup& label,
                                                 const license::LabelTables& tables)
{
    using graph::ArtifactKind;
    auto permissive = [&](ArtifactKind k, const std::string& id) {
        auto l = label({k, id});
        return l && tables.is_permissive_label(*l);
    };
    PermissiveSubset out;
    for (const auto& c : chains) {
        if (permissive(ArtifactKind::dataset, c.dataset_id) && permissive(ArtifactKind::model, c.model_id) &&
            permissive(ArtifactKind::application, c.application_id)) {
            out.chains.push_back(c);
            out.datasets.insert(c.dataset_id);
            out.models.insert(c.model_id);
            out.applications.insert(c.application_id);
        }
    }
    return out;
}

struct IntegrityVerdict {
    graph::ArtifactKind kind = graph::ArtifactKind::model;
    std::string artifact_id;
    std::string label;
    double coverage = 0.0;  // best coverage of the label's own template
    bool retrievable = true;
    bool has_license_text = false;
    bool has_copyright = false;
    bool fully_compliant = false;

    friend bool operator==(const IntegrityVerdict&, const IntegrityVerdict&) = default;
};

/// Coverage counts only for the template that matches the label itself.
inline IntegrityVerdict integrity_verdict(const graph::NodeKey& key, const std::string& label, const ArtifactScan* scan,
                                          const license::LabelTables& tables,
                                          double threshold = license::kPresentCoverage)
{
    IntegrityVerdict v;
    v.kind = key.kind;
    v.artifact_id = key.id;
    v.label = tables.normalize(label);
    v.retrievable = scan != nullptr && scan->retrievable;
    if (v.retrievable) {
        for (const auto& d : scan->detections) {
            if (tables.normalize(d.spdx_id) == v.label) {
                v.coverage = std::max(v.coverage, d.coverage);
            }
        }
        v.has_license_text = v.coverage >= threshold;
        v.has_copyright = !scan->notices.empty();
    }
    v.fully_compliant = v.has_license_text && v.has_copyright;
    return v;
}

using VerdictTable = std::map<graph::NodeKey, IntegrityVerdict>;

inline VerdictTable integrity_audit(const std::vector<graph::NodeKey>& artifacts, const LabelLookup& label,
                                    const ScanTable& scans, const license::LabelTables& tables,
                                    double threshold = license::kPresentCoverage)
{
    VerdictTable verdicts;
    for (const auto& key : artifacts) {
        auto it = scans.find(key);
        const auto l = label(key);
        verdicts[key] = integrity_verdict(key, l.value_or(""), it == scans.end() ? nullptr : &it->second, tables,
                                          threshold);
    }
    return verdicts;
}

struct IntegrityRow {
    std::uint64_t total = 0;
    std::uint64_t license_text = 0;
    std::uint64_t copyright = 0;
    std::uint64_t compliant = 0;

    void add(const IntegrityVerdict& v)
    {
        ++total;
        license_text += v.has_license_text;
        copyright += v.has_copyright;
        compliant += v.fully_compliant;
    }

    friend bool operator==(const IntegrityRow&, const IntegrityRow&) = default;
};

inline std::map<graph::ArtifactKind, IntegrityRow> integrity_table(const VerdictTable& verdicts)
{
    std::map<graph::ArtifactKind, IntegrityRow> rows;
    for (auto k : graph::kAllKinds) {
        rows[k];
    }
    for (const auto& [_, v] : verdicts) {
        rows[v.kind].add(v);
    }
    return rows;
}

inline std::string count_with_percent(std::uint64_t count, std::uint64_t total, int decimals = 1)
{
    return std::to_string(count) + " (" + format_percent(count, total, decimals) + "%)";
}

inline std::string integrity_csv(const std::map<graph::ArtifactKind, IntegrityRow>& rows)
{
    std::string out = csv_row({"artifact", "total", "has_license_text", "has_copyright", "fully_compliant"});
    for (const auto& [kind, r] : rows) {
        out += csv_row({std::string(graph::to_string(kind)), std::to_string(r.total),
                        count_with_percent(r.license_text, r.total), count_with_percent(r.copyright, r.total),
                        count_with_percent(r.compliant, r.total)});
    }
    return out;
}

inline std::string verdicts_csv(const VerdictTable& verdicts)
{
    std::string out = csv_row({"kind", "artifact_id", "label", "coverage", "retrievable", "has_license_text",
                               "has_copyright", "fully_compliant"});
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    for (const auto& [_, v] : verdicts) {
        char cov[16];
        std::snprintf(cov, sizeof cov, "%.4f", v.coverage);
        out += csv_row({std::string(graph::to_string(v.kind)), v.artifact_id, v.label, cov, flag(v.retrievable),
                        flag(v.has_license_text), flag(v.has_copyright), flag(v.fully_compliant)});
    }
    return out;
}

}  // namespace chainaudit::audit

#endif  // CHAINAUDIT_AUDIT_INTEGRITY_HPP
