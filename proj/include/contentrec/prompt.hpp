#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contentrec/catalog.hpp"

namespace contentrec {

/// Deterministic text rendering of a record's selected features.
struct Prompt {
    std::string text;
    std::string source_id;
    std::vector<std::string> feature_set;  // feature names actually rendered
    std::uint64_t prompt_hash = 0;

    bool operator==(const Prompt&) const = default;
};

/// Ablation groups over the shared feature set
/// {sales play, solution area, product}.
enum class FeatureGroup { A, B, C, D };

/// A -> all three; B -> drop sales play; C -> drop product;
/// D -> drop solution area and product.
std::vector<std::string> resolve_group(FeatureGroup group);

FeatureGroup parse_group(const std::string& label);  // throws UnknownGroupError
std::string group_label(FeatureGroup group);

/// "name: <v>. description: <v>. solution area: <v>. product: <v>."
/// Absent fields are omitted entirely. Throws EmptyPromptError when every
/// renderable field is absent.
Prompt build_content_prompt(const ContentDoc& doc);

/// Opportunity name first, then the group-resolved subset of
/// {sales play, solution area, product}, then segment and area name.
Prompt build_opportunity_prompt(const Opportunity& opp,
                                FeatureGroup group = FeatureGroup::A);

}  // namespace contentrec
