#pragma once
#ifndef CHAINAUDIT_GRAPH_DISCLOSURE_HPP
#define CHAINAUDIT_GRAPH_DISCLOSURE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "chainaudit/graph/types.hpp"

namespace chainaudit::graph {

struct DisclosureStats {
    std::uint64_t total_models = 0;
    std::uint64_t with_base_model = 0;
    std::uint64_t with_datasets = 0;
    std::uint64_t with_likes = 0;

    [[nodiscard]] std::string base_model_percent() const { return format_percent(with_base_model, total_models, 1); }
    [[nodiscard]] std::string datasets_percent() const { return format_percent(with_datasets, total_models, 1); }
    [[nodiscard]] std::string likes_percent() const { return format_percent(with_likes, total_models, 1); }
};

inline DisclosureStats lineage_disclosure_stats(const std::vector<ArtifactRecord>& snapshot)
{
    DisclosureStats s;
    for (const auto& r : snapshot) {
        if (r.kind != ArtifactKind::model) {
            continue;
        }
        ++s.total_models;
        s.with_base_model += r.base_model_ref.has_value();
        s.with_datasets += !r.dataset_refs.empty();
        s.with_likes += r.engagement >= 1;
    }
    return s;
}

inline std::string disclosure_csv(const DisclosureStats& s)
{
    std::string out = csv_row({"metric", "count", "percent"});
    out += csv_row({"total_models", std::to_string(s.total_models), format_percent(s.total_models, s.total_models, 1)});
    out += csv_row({"with_base_model_tag", std::to_string(s.with_base_model), s.base_model_percent()});
    out += csv_row({"with_datasets_tag", std::to_string(s.with_datasets), s.datasets_percent()});
    out += csv_row({"with_at_least_one_like", std::to_string(s.with_likes), s.likes_percent()});
    return out;
}

}  // namespace chainaudit::graph

#endif  // CHAINAUDIT_GRAPH_DISCLOSURE_HPP
