#include "contentrec/retrieval.hpp"

#include <algorithm>

namespace contentrec {

namespace {

bool field_matches(const std::optional<std::string>& opp_field,
                   const std::optional<std::string>& doc_field) {
    if (!opp_field) return true;  // filter inactive
    if (!doc_field) return true;  // document wildcard
    return *opp_field == *doc_field;
}

}  // namespace

bool passes_filter(const Opportunity& opp, const ContentDoc& doc) {
    return field_matches(opp.sales_stage_name, doc.sales_stage) &&
           field_matches(opp.area_name, doc.area) &&
           field_matches(opp.solution_area, doc.solution_area);
}

CandidateSet retrieve_candidates(const EmbeddingVector& opp_vector,
                                 const Opportunity& opp,
                                 const EmbeddingStore& store,
                                 const ContentCatalog& catalog, std::size_t k) {
    CandidateSet result;
    result.opportunity_id = opp.opportunity_id;
    auto& scored = result.candidates;
    for (const auto& [content_id, entry] : store.entries) {
        const ContentDoc* doc = catalog.find(content_id);
        if (!doc || !passes_filter(opp, *doc)) continue;
        scored.emplace_back(content_id,
                            cosine(std::span<const float>(opp_vector.values),
                                   std::span<const float>(entry.vec)));
    }
    auto better = [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    if (scored.size() > k) {
        std::partial_sort(scored.begin(), scored.begin() + std::ptrdiff_t(k),
                          scored.end(), better);
        scored.resize(k);
    } else {
        std::sort(scored.begin(), scored.end(), better);
    }
    return result;
}

SearchSpaceStats search_space_stats(std::uint64_t n_opportunities,
                                    std::uint64_t n_contents,
                                    double mean_filtered_contents) {
    SearchSpaceStats s;
    s.n_opportunities = n_opportunities;
    s.n_contents = n_contents;
    s.naive_pairs = double(n_opportunities) * double(n_contents);
    s.mean_filtered_contents = mean_filtered_contents;
    s.filtered_pairs = double(n_opportunities) * mean_filtered_contents;
    s.reduction_fraction =
        s.naive_pairs == 0 ? 0 : 1.0 - s.filtered_pairs / s.naive_pairs;
    return s;
}

}  // namespace contentrec
