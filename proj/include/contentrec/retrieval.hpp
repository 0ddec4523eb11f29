#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contentrec/catalog.hpp"
#include "contentrec/embedding.hpp"
#include "contentrec/vector_store.hpp"

namespace contentrec {

/// Stage-1 shortlist for one opportunity: up to K (content_id, cosine)
/// pairs, descending by score, ties broken by ascending content_id.
struct CandidateSet {
    std::string opportunity_id;
    std::vector<std::pair<std::string, double>> candidates;
};

struct SearchSpaceStats {
    std::uint64_t n_opportunities = 0;
    std::uint64_t n_contents = 0;
    double naive_pairs = 0;
    double mean_filtered_contents = 0;
    double filtered_pairs = 0;
    double reduction_fraction = 0;  // 0 when naive_pairs == 0
};

/// Hard filter over {sales stage, area, solution area}: a filter is
/// inactive when the opportunity field is absent, a document with a
/// missing field is a wildcard, otherwise normalized values must be equal.
bool passes_filter(const Opportunity& opp, const ContentDoc& doc);

/// Exhaustive cosine scan over the filtered documents; exact top-K.
/// An empty result is legal when nothing passes the filter.
CandidateSet retrieve_candidates(const EmbeddingVector& opp_vector,
                                 const Opportunity& opp,
                                 const EmbeddingStore& store,
                                 const ContentCatalog& catalog,
                                 std::size_t k = 50);

SearchSpaceStats search_space_stats(std::uint64_t n_opportunities,
                                    std::uint64_t n_contents,
                                    double mean_filtered_contents);

}  // namespace contentrec
