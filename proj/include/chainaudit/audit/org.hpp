#pragma once
#ifndef CHAINAUDIT_AUDIT_ORG_HPP
#define CHAINAUDIT_AUDIT_ORG_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainaudit/audit/integrity.hpp"
#include "chainaudit/graph/supply_graph.hpp"

namespace chainaudit::audit {

struct OrgRow {
    std::string organization;
    std::uint64_t followers = 0;
    IntegrityRow counts;

    friend bool operator==(const OrgRow&, const OrgRow&) = default;
};

struct OrgTable {
    std::vector<OrgRow> rows;
    IntegrityRow total;
};

/// Owner of a hub artifact: the organization field, else the id prefix.
inline std::optional<std::string> owner_of(const graph::ArtifactRecord& r)
{
    if (r.organization) {
        return r.organization;
    }
    const auto slash = r.id.find('/');
    if (slash == std::string::npos || slash == 0) {
        return std::nullopt;
    }
    return r.id.substr(0, slash);
}

/// Top-k hub organizations by follower count among those owning audited
/// (permissively labeled) artifacts; ties break by name.
inline OrgTable org_compliance(const VerdictTable& verdicts, const graph::SupplyGraph& g, std::size_t top_k)
{
    std::map<std::string, OrgRow> by_org;
    for (const auto& [key, v] : verdicts) {
        const auto* rec = g.find(key.kind, key.id);
        if (!rec || rec->platform != graph::Platform::hub) {
            continue;
        }
        auto owner = owner_of(*rec);
        if (!owner) {
            continue;
        }
        auto& row = by_org[*owner];
        row.organization = *owner;
        row.followers = std::max(row.followers, rec->follower_count.value_or(0));
        row.counts.add(v);
    }
    std::vector<OrgRow> ranked;
    for (auto& [_, row] : by_org) {
        ranked.push_back(row);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const OrgRow& a, const OrgRow& b) { return a.followers > b.followers; });
    if (ranked.size() > top_k) {
        ranked.resize(top_k);
    }
    OrgTable table;
    for (const auto& row : ranked) {
        table.total.total += row.counts.total;
        table.total.license_text += row.counts.license_text;
        table.total.copyright += row.counts.copyright;
        table.total.compliant += row.counts.compliant;
    }
    table.rows = std::move(ranked);
    return table;
}

inline std::string org_csv(const OrgTable& t)
{
    std::string out =
        csv_row({"organization", "followers", "artifacts", "has_license_pct", "has_copyright_pct", "has_both_pct"});
    auto pct = [](std::uint64_t c, std::uint64_t n) {
        const auto p = format_percent(c, n, 1);
        return p == "N/A" ? p : p + "%";
    };
    for (const auto& r : t.rows) {
        out += csv_row({r.organization, std::to_string(r.followers), std::to_string(r.counts.total),
                        pct(r.counts.license_text, r.counts.total), pct(r.counts.copyright, r.counts.total),
                        pct(r.counts.compliant, r.counts.total)});
    }
    out += csv_row({"Total", "", std::to_string(t.total.total), pct(t.total.license_text, t.total.total),
                    pct(t.total.copyright, t.total.total), pct(t.total.compliant, t.total.total)});
    return out;
}

}  // namespace chainaudit::audit

#endif  // CHAINAUDIT_AUDIT_ORG_HPP
