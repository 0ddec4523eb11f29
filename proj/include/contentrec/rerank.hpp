#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contentrec/catalog.hpp"
#include "contentrec/prompt.hpp"
#include "contentrec/retrieval.hpp"

namespace contentrec {

struct RecommendationItem {
    std::string content_id;
    double cross_score = 0;
    int rank = 0;  // 1-based, contiguous
    bool customer_ready = false;

    bool operator==(const RecommendationItem&) const = default;
};

/// Final top-N output for one opportunity. Items are sorted by descending
/// cross_score with ascending content_id tie-break, and every item comes
/// from the stage-1 candidate set.
struct Recommendation {
    std::string opportunity_id;
    std::vector<RecommendationItem> items;
    std::string model_version;
    std::string generated_at;  // ISO-8601 UTC

    bool operator==(const Recommendation&) const = default;
};

/// Stage-2 pair scorer contract. Implementations must be safe to call
/// from many workers simultaneously.
class CrossScorer {
  public:
    virtual ~CrossScorer() = default;
    virtual std::string name() const = 0;
    /// Score in [0, 1] for the reference scorer; deterministic.
    virtual double score(const Prompt& opp_prompt,
                         const Prompt& content_prompt) const = 0;
};

/// Reference scorer: Jaccard similarity of the two prompts' lowercased
/// token sets. Symmetric, deterministic, bounded in [0, 1].
class JaccardScorer final : public CrossScorer {
  public:
    std::string name() const override { return "jaccard-ref-v1"; }
    double score(const Prompt& opp_prompt,
                 const Prompt& content_prompt) const override;
};

/// Cross-encoder behind an HTTP endpoint:
/// POST /score {"pairs": [[a, b], ...]} -> {"scores": [...]}.
class HttpCrossScorer final : public CrossScorer {
  public:
    HttpCrossScorer(std::string endpoint, int timeout_ms = 10000,
                    int max_retries = 2, std::string api_key = {});
    std::string name() const override { return "http-scorer:" + endpoint_; }
    double score(const Prompt& opp_prompt,
                 const Prompt& content_prompt) const override;

  private:
    std::string endpoint_;
    int timeout_ms_;
    int max_retries_;
    std::string api_key_;
};

/// Scores candidates in batches and keeps the top N. All candidates are
/// returned when fewer than N survive; an empty candidate set yields a
/// recommendation with empty items.
Recommendation rerank(const CandidateSet& candidates, const Prompt& opp_prompt,
                      const ContentCatalog& catalog, const CrossScorer& scorer,
                      std::size_t n = 5, std::size_t batch_size = 64);

/// Number of pairs the cross scorer sees for a run: n_opportunities * K.
std::uint64_t count_rerank_records(std::uint64_t n_opportunities,
                                   std::uint64_t k = 50);

}  // namespace contentrec
