#pragma once
#ifndef CHAINAUDIT_GRAPH_INGEST_HPP
#define CHAINAUDIT_GRAPH_INGEST_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainaudit/graph/lineage.hpp"
#include "chainaudit/graph/snapshot.hpp"
#include "chainaudit/graph/supply_graph.hpp"
#include "chainaudit/graph/usage.hpp"
#include "chainaudit/parallel.hpp"

namespace chainaudit::graph {

/// One code-search result: a source file in an application repository that
/// mentions a model identifier.
struct CodeHit {
    std::string application;
    std::string model;
    std::string path;
    std::string content;
};

inline std::vector<CodeHit> parse_code_hits(std::string_view text, const std::string& source = "<code hits>")
{
    std::vector<CodeHit> hits;
    std::size_t line_no = 0;
    for (auto line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto j = nlohmann::json::parse(line, nullptr, false);
        try {
            if (j.is_discarded()) {
                throw FormatError("not JSON");
            }
            hits.push_back({j.at("application").get<std::string>(), j.at("model").get<std::string>(),
                            j.at("path").get<std::string>(), j.value("content", std::string())});
        } catch (const std::exception& e) {
            throw FormatError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return hits;
}

inline std::vector<CodeHit> load_code_hits(const std::filesystem::path& path)
{
    return parse_code_hits(read_file(path), path.string());
}

struct IngestOptions {
    std::uint64_t min_likes = 1;
    std::uint64_t min_stars = 1;
    std::size_t workers = 1;
};

struct IngestReport {
    std::size_t snapshot_models = 0;
    std::size_t engaged_models = 0;
    std::size_t models_with_ancestors = 0;
    std::size_t unique_dataset_refs = 0;
    std::size_t resolved_dataset_refs = 0;
    std::vector<std::string> unresolved_dataset_refs;
    std::size_t models_with_dataset_lineage = 0;
    std::size_t code_hits = 0;
    std::size_t python_hits = 0;
    std::size_t validated_hits = 0;
    std::size_t applications_with_usage = 0;
    std::size_t engaged_applications = 0;
    std::map<std::string, std::size_t> before_prune;
    std::map<std::string, std::size_t> after_prune;
    std::size_t chains = 0;
    LineageWarnings warnings;
    std::vector<std::string> rejected_base_edges;

    [[nodiscard]] nlohmann::ordered_json to_json() const
    {
        nlohmann::ordered_json j;
        j["snapshot_models"] = snapshot_models;
        j["engaged_models"] = engaged_models;
        j["models_with_ancestors"] = models_with_ancestors;
        j["unique_dataset_refs"] = unique_dataset_refs;
        j["resolved_dataset_refs"] = resolved_dataset_refs;
        j["unresolved_dataset_refs"] = unresolved_dataset_refs;
        j["models_with_dataset_lineage"] = models_with_dataset_lineage;
        j["code_hits"] = code_hits;
        j["python_hits"] = python_hits;
        j["validated_hits"] = validated_hits;
        j["applications_with_usage"] = applications_with_usage;
        j["engaged_applications"] = engaged_applications;
        j["before_prune"] = before_prune;
        j["after_prune"] = after_prune;
        j["chains"] = chains;
        j["dangling_lineage"] = warnings.dangling;
        j["base_model_cycles"] = warnings.cycles;
        j["rejected_base_edges"] = rejected_base_edges;
        return j;
    }
};

struct IngestResult {
    SupplyGraph graph;
    IngestReport report;
};

inline std::map<std::string, std::size_t> kind_counts(const SupplyGraph& g)
{
    std::map<std::string, std::size_t> out;
    for (auto k : kAllKinds) {
        out[std::string(to_string(k))] = g.count(k);
    }
    return out;
}

/// Builds the pruned supply graph from snapshot records and code hits.
/// Dataset refs that resolve to ids absent from the snapshot become bare
/// dataset nodes; applications must appear in the snapshot.
inline IngestResult build_supply_graph(const std::vector<ArtifactRecord>& snapshot, const std::vector<CodeHit>& hits,
                                       const std::vector<UsageSignature>& signatures, const IngestOptions& opts,
                                       const DatasetRefResolver& dataset_resolver)
{
    IngestResult out;
    auto& rep = out.report;

    std::map<std::string, ArtifactRecord> all_models;
    std::map<std::string, ArtifactRecord> all_datasets;
    std::map<std::string, ArtifactRecord> all_apps;
    for (const auto& r : snapshot) {
        auto& bucket = r.kind == ArtifactKind::model ? all_models
                       : r.kind == ArtifactKind::dataset ? all_datasets
                                                         : all_apps;
        bucket.emplace(r.id, r);
    }
    rep.snapshot_models = all_models.size();

    std::vector<ArtifactRecord> engaged;
    for (const auto& [_, m] : all_models) {
        if (m.engagement >= opts.min_likes) {
            engaged.push_back(m);
        }
    }
    rep.engaged_models = engaged.size();

    auto lineage = resolve_base_lineage(engaged, [&](std::string_view id) -> std::optional<ArtifactRecord> {
        auto it = all_models.find(std::string(id));
        if (it == all_models.end()) return std::nullopt;
        return it->second;
    });
    rep.models_with_ancestors = lineage.models.size();
    rep.warnings = lineage.warnings;

    std::set<std::string> unique_refs;
    std::set<std::string> unresolved;
    std::map<std::string, std::set<std::string>> direct_datasets;
    for (const auto& m : lineage.models) {
        for (const auto& ref : m.dataset_refs) {
            unique_refs.insert(std::string(trim(ref)));
        }
        auto res = resolve_dataset_refs(m, dataset_resolver);
        direct_datasets[m.id].insert(res.resolved.begin(), res.resolved.end());
        for (const auto& u : res.unresolved) {
            unresolved.insert(std::string(trim(u)));
        }
    }
    unique_refs.erase("");
    rep.unique_dataset_refs = unique_refs.size();
    rep.unresolved_dataset_refs.assign(unresolved.begin(), unresolved.end());
    rep.resolved_dataset_refs = unique_refs.size() - unresolved.size();

    SupplyGraph g;
    std::set<std::string> model_ids;
    for (const auto& m : lineage.models) {
        g.add_node(m);
        model_ids.insert(m.id);
    }
    for (const auto& m : lineage.models) {
        if (m.base_model_ref && model_ids.count(*m.base_model_ref) > 0) {
            if (!g.add_edge({*m.base_model_ref, m.id, EdgeType::base_of})) {
                rep.rejected_base_edges.push_back(*m.base_model_ref + " -> " + m.id);
            }
        }
    }
    for (const auto& [model, datasets] : direct_datasets) {
        for (const auto& d : datasets) {
            if (!g.has_node(ArtifactKind::dataset, d)) {
                auto it = all_datasets.find(d);
                g.add_node(it != all_datasets.end() ? it->second
                                                    : ArtifactRecord{d, ArtifactKind::dataset, Platform::hub, {}, 0, {}, {}, {}, {}});
            }
            g.add_edge({d, model, EdgeType::trained_on});
        }
    }
    for (const auto& id : model_ids) {
        rep.models_with_dataset_lineage += !g.effective_datasets(id).empty();
    }

    // Usage validation over Python sources, then the star filter.
    rep.code_hits = hits.size();
    std::vector<const CodeHit*> candidates;
    for (const auto& h : hits) {
        if (ends_with_icase(h.path, ".py")) {
            ++rep.python_hits;
            if (model_ids.count(h.model) > 0) {
                candidates.push_back(&h);
            }
        }
    }
    std::vector<char> valid(candidates.size(), 0);
    parallel_for(candidates.size(), opts.workers, [&](std::size_t i) {
        valid[i] = detect_model_usage(candidates[i]->content, candidates[i]->model, signatures) ? 1 : 0;
    });
    std::set<std::pair<std::string, std::string>> usage;  // (model, application)
    std::set<std::string> used_apps;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (valid[i]) {
            ++rep.validated_hits;
            usage.emplace(candidates[i]->model, candidates[i]->application);
            used_apps.insert(candidates[i]->application);
        }
    }
    rep.applications_with_usage = used_apps.size();
    for (const auto& a : used_apps) {
        auto it = all_apps.find(a);
        if (it != all_apps.end() && it->second.engagement >= opts.min_stars) {
            ++rep.engaged_applications;
            g.add_node(it->second);
        }
    }
    for (const auto& [m, a] : usage) {
        if (g.has_node(ArtifactKind::application, a)) {
            g.add_edge({m, a, EdgeType::used_by});
        }
    }

    rep.before_prune = kind_counts(g);
    out.graph = prune_incomplete_chains(g);
    rep.after_prune = kind_counts(out.graph);
    rep.chains = enumerate_chains(out.graph).size();
    return out;
}

}  // namespace chainaudit::graph

#endif  // CHAINAUDIT_GRAPH_INGEST_HPP
