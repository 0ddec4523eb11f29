#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "contentrec/rerank.hpp"

namespace contentrec {

std::string recommendation_to_json(const Recommendation& rec);
Recommendation recommendation_from_json(const std::string& line);

struct FeedbackRecord {
    std::string opportunity_id;
    std::string content_id;
    std::string verdict;  // "useful" | "not-useful"
    std::string free_text;
    std::string submitted_at;  // ISO-8601 UTC
};

/// Latest-wins recommendation store backed by an append-friendly JSONL
/// log. Loading replays the log; compact() rewrites it as one line per
/// opportunity, sorted by id, so repeated runs produce identical bytes.
class RecommendationStore {
  public:
    explicit RecommendationStore(std::string path);

    /// Validates the Recommendation invariants, appends to the log and
    /// updates the live view. Throws InvalidRecommendationError.
    void upsert(const Recommendation& rec);

    /// Latest committed record. Throws NotFoundError.
    Recommendation get(const std::string& opportunity_id) const;
    bool contains(const std::string& opportunity_id) const;
    std::size_t size() const;
    std::vector<std::string> ids() const;

    /// Rewrites the log to its compacted, id-sorted view (temp + rename).
    void compact();

  private:
    void load();

    std::string path_;
    mutable std::mutex mu_;
    std::map<std::string, Recommendation> live_;
};

/// Append-only feedback log. Every record must reference a currently
/// recommended (opportunity, content) pair; history is retained.
class FeedbackStore {
  public:
    FeedbackStore(std::string path, const RecommendationStore& recs);

    /// Throws UnknownReferenceError when the pair was never recommended.
    void record(const FeedbackRecord& fb);
    std::vector<FeedbackRecord> all() const;

  private:
    std::string path_;
    const RecommendationStore& recs_;
    mutable std::mutex mu_;
    std::vector<FeedbackRecord> records_;
};

/// Binds the lookup/feedback API:
///   GET  /recommendations/<opportunity_id>
///   POST /feedback   {"opportunityid","contentid","verdict","free_text"?}
/// Blocks until stopped; intended for the `serve` CLI subcommand.
int serve(RecommendationStore& recs, FeedbackStore& feedback,
          const std::string& address, int port);

}  // namespace contentrec
