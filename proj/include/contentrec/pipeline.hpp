#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "contentrec/catalog.hpp"
#include "contentrec/config.hpp"
#include "contentrec/serving.hpp"
#include "contentrec/vector_store.hpp"

namespace contentrec {

/// Stable 64-bit hash over the normalized critical-property tuple
/// (opportunityid, opportunityname, salesplay, salesstagename,
/// primaryproduct, segment, areaname), in that order.
std::uint64_t critical_signature(const Opportunity& opp);

/// Persisted per-opportunity signatures defining "changed since the last
/// refresh". Written atomically (temp + rename) by the orchestrator only.
struct Watermark {
    std::string last_run_at;
    std::uint64_t store_version = 0;
    std::unordered_map<std::string, std::uint64_t> signatures;

    void save(const std::string& path) const;
    static Watermark load(const std::string& path);
    static bool exists(const std::string& path);
};

enum class RunMode { Prepopulate, Daily, WeeklyEmbed };

struct RunReport {
    RunMode mode = RunMode::Prepopulate;
    std::size_t processed = 0;
    std::size_t delta_new = 0;
    std::size_t delta_changed = 0;
    std::size_t skipped = 0;
    double wall_time_ms = 0;
    double embed_ms = 0;
    double retrieve_ms = 0;
    double rerank_ms = 0;
    double per_opportunity_ms = 0;
    std::size_t workers = 1;

    std::string to_json() const;
    std::string summary() const;
};

/// Net-new opportunities plus those whose critical-property signature
/// changed since the watermark. Non-critical edits are excluded.
std::vector<const Opportunity*> detect_delta(const Watermark& watermark,
                                             const OpportunitySnapshot& snapshot);

/// Test-only crash injection points for the durability harness.
enum class FaultPoint { None, BeforeStoreCommit, BeforeWatermark };

/// Orchestrates prepopulation and the daily delta refresh over a worker
/// pool. Shared inputs are immutable for the duration of a run; the
/// watermark is written only after the recommendation store commit.
class Pipeline {
  public:
    Pipeline(const RunConfig& config, const ContentCatalog& catalog,
             std::shared_ptr<const EmbeddingStore> store);

    RunReport prepopulate(const OpportunitySnapshot& snapshot);
    RunReport run_daily(const OpportunitySnapshot& snapshot);

    void set_fault_point(FaultPoint p) { fault_ = p; }

  private:
    RunReport run(const OpportunitySnapshot& snapshot,
                  const std::vector<const Opportunity*>& batch, RunMode mode,
                  Watermark watermark);

    const RunConfig& config_;
    const ContentCatalog& catalog_;
    std::shared_ptr<const EmbeddingStore> store_;
    std::unique_ptr<EmbeddingProvider> provider_;
    std::unique_ptr<CrossScorer> scorer_;
    FaultPoint fault_ = FaultPoint::None;
};

/// Weekly mode: loads the catalog, refreshes the on-disk embedding store
/// through the configured provider, and saves it when anything changed.
RunReport run_weekly_embed(const RunConfig& config);

/// Partitions items across `workers` threads and applies `fn` to each
/// index. Results are position-stable, so the outcome is identical for
/// any worker count. Per-item failures are retried up to `retry_limit`;
/// items still failing are reported back by index.
struct ParallelResult {
    double wall_time_ms = 0;
    std::vector<std::pair<std::size_t, std::string>> failures;  // index, error
};
ParallelResult execute_parallel(std::size_t n_items, std::size_t workers,
                                const std::function<void(std::size_t)>& fn,
                                int retry_limit = 2);

}  // namespace contentrec
