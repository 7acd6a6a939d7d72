#pragma once
#ifndef CHAINAUDIT_AUDIT_ATTRIBUTION_HPP
#define CHAINAUDIT_AUDIT_ATTRIBUTION_HPP

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chainaudit/audit/integrity.hpp"
#include "chainaudit/audit/notice.hpp"
#include "chainaudit/audit/scan.hpp"
#include "chainaudit/graph/supply_graph.hpp"

namespace chainaudit::audit {

enum class AttributionSlice { S1_CD_to_M, S2_CM_to_A, S3_anyC_to_A, S4_joint_to_A };

inline constexpr AttributionSlice kAllSlices[] = {AttributionSlice::S1_CD_to_M, AttributionSlice::S2_CM_to_A,
                                                  AttributionSlice::S3_anyC_to_A, AttributionSlice::S4_joint_to_A};

inline std::string_view to_string(AttributionSlice s)
{
    switch (s) {
        case AttributionSlice::S1_CD_to_M: return "S1";
        case AttributionSlice::S2_CM_to_A: return "S2";
        case AttributionSlice::S3_anyC_to_A: return "S3";
        case AttributionSlice::S4_joint_to_A: return "S4";
    }
    return "S1";
}

inline std::string_view slice_label(AttributionSlice s)
{
    switch (s) {
        case AttributionSlice::S1_CD_to_M: return "S1 (CD->M)";
        case AttributionSlice::S2_CM_to_A: return "S2 (CM->A)";
        case AttributionSlice::S3_anyC_to_A: return "S3 ((CD|CM)->A)";
        case AttributionSlice::S4_joint_to_A: return "S4 (CD->CM->A)";
    }
    return "";
}

struct SliceLink {
    std::string upstream_id;
    std::string downstream_id;
    bool preserved = false;
    bool inherited = false;

    friend bool operator==(const SliceLink&, const SliceLink&) = default;
};

struct SliceResult {
    AttributionSlice slice = AttributionSlice::S1_CD_to_M;
    std::uint64_t evaluated = 0;
    std::uint64_t preserved = 0;
    std::vector<SliceLink> links;
    // S2 only: links reaching an application through a base_of descendant.
    std::uint64_t inherited_evaluated = 0;
    std::uint64_t inherited_preserved = 0;

    [[nodiscard]] std::uint64_t not_preserved() const { return evaluated - preserved; }
    [[nodiscard]] std::string rate() const { return format_percent(preserved, evaluated, 2); }
};

/// Read-only view shared by the four slices.
class AttributionContext {
public:
    AttributionContext(const graph::SupplyGraph& g, const VerdictTable& verdicts, const ScanTable& scans)
        : graph_(g), verdicts_(verdicts), scans_(scans)
    {
    }

    [[nodiscard]] bool compliant(graph::ArtifactKind kind, const std::string& id) const
    {
        auto it = verdicts_.find({kind, id});
        return it != verdicts_.end() && it->second.fully_compliant;
    }

    [[nodiscard]] const std::vector<std::string>& notices(graph::ArtifactKind kind, const std::string& id) const
    {
        const graph::NodeKey key{kind, id};
        auto cached = notice_cache_.find(key);
        if (cached != notice_cache_.end()) {
            return cached->second;
        }
        auto it = scans_.find(key);
        auto& slot = notice_cache_[key];
        if (it != scans_.end()) {
            slot = it->second.normalized_notices();
        }
        return slot;
    }

    [[nodiscard]] std::string_view text(graph::ArtifactKind kind, const std::string& id) const
    {
        auto it = scans_.find({kind, id});
        return it == scans_.end() ? std::string_view{} : std::string_view(it->second.text);
    }

    [[nodiscard]] bool preserved(graph::ArtifactKind up_kind, const std::string& up, graph::ArtifactKind down_kind,
                                 const std::string& down) const
    {
        return any_notice_preserved(notices(up_kind, up), text(down_kind, down));
    }

    [[nodiscard]] const graph::SupplyGraph& graph() const { return graph_; }

private:
    const graph::SupplyGraph& graph_;
    const VerdictTable& verdicts_;
    const ScanTable& scans_;
    mutable std::map<graph::NodeKey, std::vector<std::string>> notice_cache_;
};

namespace detail {

inline std::string join_ids(const std::vector<std::string>& ids, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out += sep;
        out += ids[i];
    }
    return out;
}

}  // namespace detail

inline SliceResult run_slice(AttributionSlice slice, const AttributionContext& ctx)
{
    using graph::ArtifactKind;
    using graph::EdgeType;
    const auto& g = ctx.graph();
    SliceResult r;
    r.slice = slice;
    auto tally = [&](SliceLink link) {
        ++r.evaluated;
        r.preserved += link.preserved;
        r.links.push_back(std::move(link));
    };

    switch (slice) {
        case AttributionSlice::S1_CD_to_M: {
            for (const auto& m : g.ids(ArtifactKind::model)) {
                for (const auto& d : g.effective_datasets(m)) {
                    if (ctx.compliant(ArtifactKind::dataset, d)) {
                        tally({d, m, ctx.preserved(ArtifactKind::dataset, d, ArtifactKind::model, m),
                               !g.is_direct_dataset(d, m)});
                    }
                }
            }
            break;
        }
        case AttributionSlice::S2_CM_to_A: {
            for (const auto& m : g.ids(ArtifactKind::model)) {
                if (!ctx.compliant(ArtifactKind::model, m)) {
                    continue;
                }
                const auto direct = g.successors(EdgeType::used_by, m);
                for (const auto& a : direct) {
                    tally({m, a, ctx.preserved(ArtifactKind::model, m, ArtifactKind::application, a), false});
                }
                std::set<std::string> inherited;
                for (const auto& desc : g.descendants(m)) {
                    for (const auto& a : g.successors(EdgeType::used_by, desc)) {
                        if (direct.count(a) == 0) {
                            inherited.insert(a);
                        }
                    }
                }
                for (const auto& a : inherited) {
                    const bool kept = ctx.preserved(ArtifactKind::model, m, ArtifactKind::application, a);
                    ++r.inherited_evaluated;
                    r.inherited_preserved += kept;
                    r.links.push_back({m, a, kept, true});
                }
            }
            break;
        }
        case AttributionSlice::S3_anyC_to_A: {
            for (const auto& a : g.ids(ArtifactKind::application)) {
                std::set<graph::NodeKey> upstream;
                for (const auto& m : g.predecessors(EdgeType::used_by, a)) {
                    if (ctx.compliant(ArtifactKind::model, m)) {
                        upstream.insert({ArtifactKind::model, m});
                    }
                    for (const auto& d : g.effective_datasets(m)) {
                        if (ctx.compliant(ArtifactKind::dataset, d)) {
                            upstream.insert({ArtifactKind::dataset, d});
                        }
                    }
                }
                if (upstream.empty()) {
                    continue;
                }
                bool kept = false;
                std::vector<std::string> names;
                for (const auto& u : upstream) {
                    names.push_back(graph::key_string(u));
                    kept = kept || ctx.preserved(u.kind, u.id, ArtifactKind::application, a);
                }
                tally({detail::join_ids(names, ";"), a, kept, false});
            }
            break;
        }
        case AttributionSlice::S4_joint_to_A: {
            for (const auto& a : g.ids(ArtifactKind::application)) {
                std::set<std::pair<std::string, std::string>> joint;
                for (const auto& m : g.predecessors(EdgeType::used_by, a)) {
                    if (!ctx.compliant(ArtifactKind::model, m)) {
                        continue;
                    }
                    for (const auto& d : g.effective_datasets(m)) {
                        if (ctx.compliant(ArtifactKind::dataset, d)) {
                            joint.emplace(d, m);
                        }
                    }
                }
                if (joint.empty()) {
                    continue;
                }
                bool kept = false;
                std::vector<std::string> names;
                for (const auto& [d, m] : joint) {
                    names.push_back(d + "+" + m);
                    kept = kept || (ctx.preserved(ArtifactKind::dataset, d, ArtifactKind::application, a) &&
                                    ctx.preserved(ArtifactKind::model, m, ArtifactKind::application, a));
                }
                tally({detail::join_ids(names, ";"), a, kept, false});
            }
            break;
        }
    }
    return r;
}

inline SliceResult run_slice(AttributionSlice slice, const graph::SupplyGraph& g, const VerdictTable& verdicts,
                             const ScanTable& scans)
{
    return run_slice(slice, AttributionContext(g, verdicts, scans));
}

inline std::vector<SliceResult> run_all_slices(const graph::SupplyGraph& g, const VerdictTable& verdicts,
                                               const ScanTable& scans)
{
    AttributionContext ctx(g, verdicts, scans);
    std::vector<SliceResult> out;
    for (auto s : kAllSlices) {
        out.push_back(run_slice(s, ctx));
    }
    return out;
}

inline std::string slices_csv(const std::vector<SliceResult>& results)
{
    std::string out = csv_row({"slice", "evaluated", "preserved", "not_preserved", "rate", "inherited_evaluated",
                               "inherited_preserved"});
    for (const auto& r : results) {
        const bool s2 = r.slice == AttributionSlice::S2_CM_to_A;
        out += csv_row({std::string(slice_label(r.slice)), std::to_string(r.evaluated), std::to_string(r.preserved),
                        std::to_string(r.not_preserved()), r.rate() == "N/A" ? "N/A" : r.rate() + "%",
                        s2 ? std::to_string(r.inherited_evaluated) : "", s2 ? std::to_string(r.inherited_preserved) : ""});
    }
    return out;
}

inline std::string slice_links_csv(const std::vector<SliceResult>& results)
{
    std::string out = csv_row({"slice", "upstream", "downstream", "preserved", "inherited"});
    for (const auto& r : results) {
        for (const auto& l : r.links) {
            out += csv_row({std::string(to_string(r.slice)), l.upstream_id, l.downstream_id,
                            l.preserved ? "true" : "false", l.inherited ? "true" : "false"});
        }
    }
    return out;
}

}  // namespace chainaudit::audit

#endif  // CHAINAUDIT_AUDIT_ATTRIBUTION_HPP
