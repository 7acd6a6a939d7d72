#pragma once
#ifndef CHAINAUDIT_GRAPH_SUPPLY_GRAPH_HPP
#define CHAINAUDIT_GRAPH_SUPPLY_GRAPH_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chainaudit/graph/types.hpp"

namespace chainaudit::graph {

struct GraphError : Error {
    using Error::Error;
};

struct DuplicateNodeError : GraphError {
    using GraphError::GraphError;
};

/// Typed provenance graph. Nodes are keyed by (kind, id); edges reference ids
/// and take their endpoint kinds from the edge type.
class SupplyGraph {
public:
    void add_node(ArtifactRecord record)
    {
        auto key = key_of(record);
        if (record.id.empty()) {
            throw GraphError("node id is empty");
        }
        if (nodes_.count(key) > 0) {
            throw DuplicateNodeError("duplicate node " + key_string(key));
        }
        nodes_.emplace(std::move(key), std::move(record));
    }

    /// Returns false (and adds nothing) when a base_of edge would close a cycle.
    bool add_edge(const LineageEdge& edge)
    {
        const auto [src_kind, dst_kind] = endpoint_kinds(edge.edge_type);
        const NodeKey src{src_kind, edge.src};
        const NodeKey dst{dst_kind, edge.dst};
        if (nodes_.count(src) == 0 || nodes_.count(dst) == 0) {
            throw GraphError("edge " + std::string(to_string(edge.edge_type)) + " " + edge.src + " -> " + edge.dst +
                             " has a missing endpoint");
        }
        if (edges_.count(edge) > 0) {
            return true;
        }
        if (edge.edge_type == EdgeType::base_of && (edge.src == edge.dst || reaches_by_base(edge.dst, edge.src))) {
            return false;
        }
        edges_.insert(edge);
        auto& adj = adjacency_[edge.edge_type];
        adj.out[edge.src].insert(edge.dst);
        adj.in[edge.dst].insert(edge.src);
        return true;
    }

    [[nodiscard]] bool has_node(ArtifactKind kind, const std::string& id) const { return nodes_.count({kind, id}) > 0; }

    [[nodiscard]] const ArtifactRecord* find(ArtifactKind kind, const std::string& id) const
    {
        auto it = nodes_.find({kind, id});
        return it == nodes_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] const ArtifactRecord& node(ArtifactKind kind, const std::string& id) const
    {
        auto it = nodes_.find({kind, id});
        if (it == nodes_.end()) {
            throw GraphError("no node " + key_string({kind, id}));
        }
        return it->second;
    }

    [[nodiscard]] const std::map<NodeKey, ArtifactRecord>& nodes() const { return nodes_; }
    [[nodiscard]] const std::set<LineageEdge>& edges() const { return edges_; }

    [[nodiscard]] std::vector<std::string> ids(ArtifactKind kind) const
    {
        std::vector<std::string> out;
        for (const auto& [key, _] : nodes_) {
            if (key.kind == kind) {
                out.push_back(key.id);
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t count(ArtifactKind kind) const { return ids(kind).size(); }

    [[nodiscard]] std::set<std::string> successors(EdgeType t, const std::string& id) const
    {
        return lookup(t, id, true);
    }

    [[nodiscard]] std::set<std::string> predecessors(EdgeType t, const std::string& id) const
    {
        return lookup(t, id, false);
    }

    /// All base_of ancestors of a model, nearest first is not guaranteed.
    [[nodiscard]] std::set<std::string> ancestors(const std::string& model) const { return closure(model, false); }
    [[nodiscard]] std::set<std::string> descendants(const std::string& model) const { return closure(model, true); }

    /// Direct trained_on datasets united with those of every ancestor.
    [[nodiscard]] std::set<std::string> effective_datasets(const std::string& model) const
    {
        std::set<std::string> out = predecessors(EdgeType::trained_on, model);
        for (const auto& a : ancestors(model)) {
            auto direct = predecessors(EdgeType::trained_on, a);
            out.insert(direct.begin(), direct.end());
        }
        return out;
    }

    [[nodiscard]] bool is_direct_dataset(const std::string& dataset, const std::string& model) const
    {
        return edges_.count({dataset, model, EdgeType::trained_on}) > 0;
    }

    friend bool operator==(const SupplyGraph& a, const SupplyGraph& b)
    {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    struct Adjacency {
        std::map<std::string, std::set<std::string>> out;
        std::map<std::string, std::set<std::string>> in;
    };

    [[nodiscard]] std::set<std::string> lookup(EdgeType t, const std::string& id, bool forward) const
    {
        auto adj = adjacency_.find(t);
        if (adj == adjacency_.end()) {
            return {};
        }
        const auto& m = forward ? adj->second.out : adj->second.in;
        auto it = m.find(id);
        return it == m.end() ? std::set<std::string>{} : it->second;
    }

    [[nodiscard]] std::set<std::string> closure(const std::string& start, bool forward) const
    {
        std::set<std::string> seen;
        std::vector<std::string> stack{start};
        while (!stack.empty()) {
            const std::string cur = stack.back();
            stack.pop_back();
            for (const auto& next : lookup(EdgeType::base_of, cur, forward)) {
                if (next != start && seen.insert(next).second) {
                    stack.push_back(next);
                }
            }
        }
        return seen;
    }

    [[nodiscard]] bool reaches_by_base(const std::string& from, const std::string& to) const
    {
        return closure(from, true).count(to) > 0;
    }

    std::map<NodeKey, ArtifactRecord> nodes_;
    std::set<LineageEdge> edges_;
    std::map<EdgeType, Adjacency> adjacency_;
};

/// Keeps the nodes lying on some dataset -> model(base_of)* -> application
/// path. A model survives when it has dataset lineage (direct or inherited)
/// and it or a base_of descendant is used by an application; ancestors that
/// only carry lineage toward a used descendant are therefore kept.
inline SupplyGraph prune_incomplete_chains(const SupplyGraph& g)
{
    std::set<std::string> models;
    for (const auto& m : g.ids(ArtifactKind::model)) {
        if (g.effective_datasets(m).empty()) {
            continue;
        }
        bool used = !g.successors(EdgeType::used_by, m).empty();
        for (const auto& d : g.descendants(m)) {
            if (used) break;
            used = !g.successors(EdgeType::used_by, d).empty();
        }
        if (used) {
            models.insert(m);
        }
    }
    std::set<std::string> datasets;
    std::set<std::string> apps;
    for (const auto& m : models) {
        auto ds = g.predecessors(EdgeType::trained_on, m);
        datasets.insert(ds.begin(), ds.end());
        auto as = g.successors(EdgeType::used_by, m);
        apps.insert(as.begin(), as.end());
    }

    SupplyGraph out;
    auto keep = [&](const NodeKey& k) {
        switch (k.kind) {
            case ArtifactKind::dataset: return datasets.count(k.id) > 0;
            case ArtifactKind::model: return models.count(k.id) > 0;
            case ArtifactKind::application: return apps.count(k.id) > 0;
        }
        return false;
    };
    for (const auto& [key, rec] : g.nodes()) {
        if (keep(key)) {
            out.add_node(rec);
        }
    }
    for (const auto& e : g.edges()) {
        const auto [sk, dk] = endpoint_kinds(e.edge_type);
        if (keep({sk, e.src}) && keep({dk, e.dst})) {
            out.add_edge(e);
        }
    }
    return out;
}

/// Distinct (dataset, model, application) triples; a dataset reached both
/// directly and through ancestry yields one chain.
inline std::vector<SupplyChain> enumerate_chains(const SupplyGraph& g)
{
    std::set<SupplyChain> chains;
    for (const auto& m : g.ids(ArtifactKind::model)) {
        const auto apps = g.successors(EdgeType::used_by, m);
        if (apps.empty()) {
            continue;
        }
        for (const auto& d : g.effective_datasets(m)) {
            for (const auto& a : apps) {
                chains.insert({d, m, a});
            }
        }
    }
    return {chains.begin(), chains.end()};
}

// graph.jsonl: {"node": <record>} lines sorted by (kind, id), then
// {"edge": {"type", "src", "dst"}} lines sorted by (type, src, dst).
inline std::string write_graph(const SupplyGraph& g)
{
    std::string out;
    for (const auto& [_, rec] : g.nodes()) {
        nlohmann::ordered_json j;
        j["node"] = to_json(rec);
        out += j.dump();
        out += '\n';
    }
    for (const auto& e : g.edges()) {
        nlohmann::ordered_json j;
        j["edge"]["type"] = to_string(e.edge_type);
        j["edge"]["src"] = e.src;
        j["edge"]["dst"] = e.dst;
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline SupplyGraph parse_graph(std::string_view text, const std::string& source = "<graph>")
{
    SupplyGraph g;
    std::vector<LineageEdge> edges;
    std::size_t line_no = 0;
    for (auto line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw FormatError(where + ": not a JSON object");
        }
        try {
            if (j.contains("node")) {
                g.add_node(record_from_json(j["node"]));
            } else if (j.contains("edge")) {
                const auto& e = j["edge"];
                edges.push_back({e.at("src").get<std::string>(), e.at("dst").get<std::string>(),
                                 edge_type_from_string(e.at("type").get<std::string>())});
            } else {
                throw FormatError("expected a node or an edge");
            }
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(where + ": " + e.what());
        } catch (const Error& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    for (const auto& e : edges) {
        if (!g.add_edge(e)) {
            throw GraphError(source + ": base_of cycle through " + e.src + " -> " + e.dst);
        }
    }
    return g;
}

inline SupplyGraph load_graph(const std::filesystem::path& path)
{
    return parse_graph(read_file(path), path.string());
}

}  // namespace chainaudit::graph

#endif  // CHAINAUDIT_GRAPH_SUPPLY_GRAPH_HPP
