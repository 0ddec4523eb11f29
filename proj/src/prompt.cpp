#include "contentrec/prompt.hpp"

#include <algorithm>

#include "contentrec/text.hpp"

namespace contentrec {

namespace {

// Appends one "label: value." segment; segments are space-separated.
void append_segment(std::string& text, std::vector<std::string>& features,
                    const std::string& label, const std::string& value) {
    if (value.empty()) return;
    if (!text.empty()) text.push_back(' ');
    text += label;
    text += ": ";
    text += value;
    text.push_back('.');
    features.push_back(label);
}

void append_segment(std::string& text, std::vector<std::string>& features,
                    const std::string& label,
                    const std::optional<std::string>& value) {
    if (value) append_segment(text, features, label, *value);
}

Prompt finish(std::string text, std::vector<std::string> features,
              const std::string& source_id) {
    if (text.empty()) throw EmptyPromptError(source_id);
    Prompt p;
    p.prompt_hash = fnv1a64(text);
    p.text = std::move(text);
    p.source_id = source_id;
    p.feature_set = std::move(features);
    return p;
}

}  // namespace

std::vector<std::string> resolve_group(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::A: return {"sales play", "solution area", "product"};
        case FeatureGroup::B: return {"solution area", "product"};
        case FeatureGroup::C: return {"sales play", "solution area"};
        case FeatureGroup::D: return {"sales play"};
    }
    throw UnknownGroupError("<invalid>");
}

FeatureGroup parse_group(const std::string& label) {
    if (label == "A") return FeatureGroup::A;
    if (label == "B") return FeatureGroup::B;
    if (label == "C") return FeatureGroup::C;
    if (label == "D") return FeatureGroup::D;
    throw UnknownGroupError(label);
}

std::string group_label(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::A: return "A";
        case FeatureGroup::B: return "B";
        case FeatureGroup::C: return "C";
        case FeatureGroup::D: return "D";
    }
    throw UnknownGroupError("<invalid>");
}

Prompt build_content_prompt(const ContentDoc& doc) {
    std::string text;
    std::vector<std::string> features;
    append_segment(text, features, "name", doc.name);
    append_segment(text, features, "description", doc.description);
    append_segment(text, features, "solution area", doc.solution_area);
    append_segment(text, features, "product", doc.product);
    return finish(std::move(text), std::move(features), doc.content_id);
}

Prompt build_opportunity_prompt(const Opportunity& opp, FeatureGroup group) {
    auto enabled = resolve_group(group);
    auto on = [&](const char* feature) {
        return std::find(enabled.begin(), enabled.end(), feature) != enabled.end();
    };
    std::string text;
    std::vector<std::string> features;
    append_segment(text, features, "opportunity name", opp.opportunity_name);
    if (on("sales play")) append_segment(text, features, "sales play", opp.sales_play);
    if (on("solution area"))
        append_segment(text, features, "solution area", opp.solution_area);
    if (on("product")) append_segment(text, features, "product", opp.primary_product);
    append_segment(text, features, "segment", opp.segment);
    append_segment(text, features, "area name", opp.area_name);
    return finish(std::move(text), std::move(features), opp.opportunity_id);
}

}  // namespace contentrec
