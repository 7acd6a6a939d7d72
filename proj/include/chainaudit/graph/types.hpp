#pragma once
#ifndef CHAINAUDIT_GRAPH_TYPES_HPP
#define CHAINAUDIT_GRAPH_TYPES_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "chainaudit/common.hpp"

namespace chainaudit::graph {

enum class ArtifactKind { dataset, model, application };
enum class Platform { hub, forge };

inline std::string_view to_string(ArtifactKind k)
{
    switch (k) {
        case ArtifactKind::dataset: return "dataset";
        case ArtifactKind::model: return "model";
        case ArtifactKind::application: return "application";
    }
    return "dataset";
}

inline std::string_view to_string(Platform p)
{
    return p == Platform::hub ? "hub" : "forge";
}

inline ArtifactKind kind_from_string(std::string_view s)
{
    if (s == "dataset") return ArtifactKind::dataset;
    if (s == "model") return ArtifactKind::model;
    if (s == "application") return ArtifactKind::application;
    throw FormatError("unknown artifact kind '" + std::string(s) + "'");
}

inline Platform platform_from_string(std::string_view s)
{
    if (s == "hub") return Platform::hub;
    if (s == "forge") return Platform::forge;
    throw FormatError("unknown platform '" + std::string(s) + "'");
}

inline constexpr ArtifactKind kAllKinds[] = {ArtifactKind::dataset, ArtifactKind::model, ArtifactKind::application};

struct ArtifactRecord {
    std::string id;
    ArtifactKind kind = ArtifactKind::model;
    Platform platform = Platform::hub;
    std::optional<std::string> declared_license;
    std::uint64_t engagement = 0;
    std::optional<std::string> organization;
    std::optional<std::uint64_t> follower_count;
    std::vector<std::string> dataset_refs;
    std::optional<std::string> base_model_ref;

    friend bool operator==(const ArtifactRecord&, const ArtifactRecord&) = default;
};

struct NodeKey {
    ArtifactKind kind = ArtifactKind::model;
    std::string id;

    friend auto operator<=>(const NodeKey&, const NodeKey&) = default;
};

inline NodeKey key_of(const ArtifactRecord& r)
{
    return {r.kind, r.id};
}

inline std::string key_string(const NodeKey& k)
{
    return std::string(to_string(k.kind)) + ":" + k.id;
}

enum class EdgeType { trained_on, base_of, used_by };

inline std::string_view to_string(EdgeType t)
{
    switch (t) {
        case EdgeType::trained_on: return "trained_on";
        case EdgeType::base_of: return "base_of";
        case EdgeType::used_by: return "used_by";
    }
    return "trained_on";
}

inline EdgeType edge_type_from_string(std::string_view s)
{
    if (s == "trained_on") return EdgeType::trained_on;
    if (s == "base_of") return EdgeType::base_of;
    if (s == "used_by") return EdgeType::used_by;
    throw FormatError("unknown edge type '" + std::string(s) + "'");
}

/// Kind signature of an edge type: trained_on is dataset->model, base_of is
/// model(ancestor)->model(derived), used_by is model->application.
inline std::pair<ArtifactKind, ArtifactKind> endpoint_kinds(EdgeType t)
{
    switch (t) {
        case EdgeType::trained_on: return {ArtifactKind::dataset, ArtifactKind::model};
        case EdgeType::base_of: return {ArtifactKind::model, ArtifactKind::model};
        case EdgeType::used_by: return {ArtifactKind::model, ArtifactKind::application};
    }
    return {ArtifactKind::model, ArtifactKind::model};
}

struct LineageEdge {
    std::string src;
    std::string dst;
    EdgeType edge_type = EdgeType::trained_on;

    friend auto operator<=>(const LineageEdge& a, const LineageEdge& b)
    {
        return std::tie(a.edge_type, a.src, a.dst) <=> std::tie(b.edge_type, b.src, b.dst);
    }
    friend bool operator==(const LineageEdge&, const LineageEdge&) = default;
};

struct SupplyChain {
    std::string dataset_id;
    std::string model_id;
    std::string application_id;

    friend auto operator<=>(const SupplyChain&, const SupplyChain&) = default;
};

// JSON field names: id, kind, platform, license, engagement, organization,
// followers, datasets, base_model.
inline nlohmann::ordered_json to_json(const ArtifactRecord& r)
{
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["kind"] = to_string(r.kind);
    j["platform"] = to_string(r.platform);
    j["license"] = r.declared_license ? nlohmann::ordered_json(*r.declared_license) : nlohmann::ordered_json();
    j["engagement"] = r.engagement;
    j["organization"] = r.organization ? nlohmann::ordered_json(*r.organization) : nlohmann::ordered_json();
    j["followers"] = r.follower_count ? nlohmann::ordered_json(*r.follower_count) : nlohmann::ordered_json();
    if (r.kind == ArtifactKind::model) {
        j["datasets"] = r.dataset_refs;
        j["base_model"] = r.base_model_ref ? nlohmann::ordered_json(*r.base_model_ref) : nlohmann::ordered_json();
    }
    return j;
}

namespace detail {

inline std::optional<std::string> optional_string(const nlohmann::json& j, const char* field)
{
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw FormatError(std::string("field '") + field + "' must be a string");
    }
    std::string value = it->get<std::string>();
    if (trim(value).empty()) {
        return std::nullopt;
    }
    return value;
}

inline std::optional<std::uint64_t> optional_count(const nlohmann::json& j, const char* field)
{
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw FormatError(std::string("field '") + field + "' must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

}  // namespace detail

/// Strict parse of one snapshot record; throws FormatError on schema violations.
inline ArtifactRecord record_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw FormatError("record is not an object");
    }
    ArtifactRecord r;
    auto id = detail::optional_string(j, "id");
    if (!id) {
        throw FormatError("record has no id");
    }
    r.id = *id;
    if (!j.contains("kind") || !j["kind"].is_string()) {
        throw FormatError("record has no kind");
    }
    r.kind = kind_from_string(j["kind"].get<std::string>());
    if (!j.contains("platform") || !j["platform"].is_string()) {
        throw FormatError("record has no platform");
    }
    r.platform = platform_from_string(j["platform"].get<std::string>());
    r.declared_license = detail::optional_string(j, "license");
    r.engagement = detail::optional_count(j, "engagement").value_or(0);
    r.organization = detail::optional_string(j, "organization");
    r.follower_count = detail::optional_count(j, "followers");

    if (auto it = j.find("datasets"); it != j.end() && !it->is_null()) {
        std::vector<std::string> refs;
        if (it->is_string()) {
            refs.push_back(it->get<std::string>());
        } else if (it->is_array()) {
            for (const auto& v : *it) {
                if (!v.is_string()) {
                    throw FormatError("datasets entries must be strings");
                }
                refs.push_back(v.get<std::string>());
            }
        } else {
            throw FormatError("datasets must be a list of strings");
        }
        std::erase_if(refs, [](const std::string& s) { return trim(s).empty(); });
        if (!refs.empty() && r.kind != ArtifactKind::model) {
            throw FormatError("datasets is only valid on models");
        }
        r.dataset_refs = std::move(refs);
    }
    if (auto it = j.find("base_model"); it != j.end() && !it->is_null()) {
        std::optional<std::string> base;
        if (it->is_string()) {
            base = it->get<std::string>();
        } else if (it->is_array() && !it->empty() && (*it)[0].is_string()) {
            base = (*it)[0].get<std::string>();
        } else if (!(it->is_array() && it->empty())) {
            throw FormatError("base_model must be a string");
        }
        if (base && !trim(*base).empty()) {
            if (r.kind != ArtifactKind::model) {
                throw FormatError("base_model is only valid on models");
            }
            r.base_model_ref = std::string(trim(*base));
        }
    }
    return r;
}

}  // namespace chainaudit::graph

#endif  // CHAINAUDIT_GRAPH_TYPES_HPP
