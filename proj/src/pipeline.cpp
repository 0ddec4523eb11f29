#include "contentrec/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "contentrec/retrieval.hpp"
#include "contentrec/text.hpp"

namespace contentrec {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::Prepopulate: return "prepopulate";
        case RunMode::Daily: return "daily";
        case RunMode::WeeklyEmbed: return "weekly-embed";
    }
    return "?";
}

std::string value_or_empty(const std::optional<std::string>& v) {
    return v ? *v : std::string{};
}

}  // namespace

std::uint64_t critical_signature(const Opportunity& opp) {
    return hash_tuple({normalize_field(opp.opportunity_id),
                       normalize_field(opp.opportunity_name),
                       normalize_field(value_or_empty(opp.sales_play)),
                       normalize_field(value_or_empty(opp.sales_stage_name)),
                       normalize_field(value_or_empty(opp.primary_product)),
                       normalize_field(value_or_empty(opp.segment)),
                       normalize_field(value_or_empty(opp.area_name))});
}

void Watermark::save(const std::string& path) const {
    json sigs = json::object();
    for (const auto& [id, sig] : signatures) sigs[id] = sig;
    json j{{"last_run_at", last_run_at},
           {"store_version", store_version},
           {"signatures", std::move(sigs)}};
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw StorageError("cannot write watermark: " + tmp);
        out << j.dump() << "\n";
        if (!out) throw StorageError("short write to watermark: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Watermark Watermark::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open watermark: " + path);
    json j = json::parse(in);
    Watermark w;
    w.last_run_at = j.value("last_run_at", "");
    w.store_version = j.value("store_version", std::uint64_t{0});
    for (const auto& [id, sig] : j.at("signatures").items())
        w.signatures.emplace(id, sig.get<std::uint64_t>());
    return w;
}

bool Watermark::exists(const std::string& path) {
    return std::filesystem::exists(path);
}

std::vector<const Opportunity*> detect_delta(const Watermark& watermark,
                                             const OpportunitySnapshot& snapshot) {
    std::vector<const Opportunity*> delta;
    for (const Opportunity& opp : snapshot.opportunities) {
        auto it = watermark.signatures.find(opp.opportunity_id);
        if (it == watermark.signatures.end() ||
            it->second != critical_signature(opp))
            delta.push_back(&opp);
    }
    return delta;
}

ParallelResult execute_parallel(std::size_t n_items, std::size_t workers,
                                const std::function<void(std::size_t)>& fn,
                                int retry_limit) {
    if (workers < 1) workers = 1;
    workers = std::min(workers, std::max<std::size_t>(n_items, 1));
    auto start = Clock::now();

    std::mutex failures_mu;
    std::vector<std::pair<std::size_t, std::string>> failures;
    auto run_item = [&](std::size_t i) {
        for (int attempt = 0;; ++attempt) {
            try {
                fn(i);
                return;
            } catch (const std::exception& e) {
                if (attempt >= retry_limit) {
                    std::lock_guard lock(failures_mu);
                    failures.emplace_back(i, e.what());
                    return;
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        // static partition: worker w owns items [lo, hi)
        std::size_t lo = n_items * w / workers;
        std::size_t hi = n_items * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) run_item(i);
        });
    }
    for (auto& t : pool) t.join();

    std::sort(failures.begin(), failures.end());
    return {ms_since(start), std::move(failures)};
}

std::string RunReport::to_json() const {
    json j{{"mode", mode_name(mode)},
           {"processed", processed},
           {"delta_new", delta_new},
           {"delta_changed", delta_changed},
           {"skipped", skipped},
           {"wall_time_ms", wall_time_ms},
           {"embed_ms", embed_ms},
           {"retrieve_ms", retrieve_ms},
           {"rerank_ms", rerank_ms},
           {"per_opportunity_ms", per_opportunity_ms},
           {"workers", workers}};
    return j.dump();
}

std::string RunReport::summary() const {
    std::ostringstream os;
    os << mode_name(mode) << ": processed " << processed << " (" << delta_new
       << " new, " << delta_changed << " changed, " << skipped
       << " skipped) in " << wall_time_ms << " ms with " << workers
       << " worker(s); " << per_opportunity_ms
       << " ms/opportunity; stage times embed=" << embed_ms
       << " retrieve=" << retrieve_ms << " rerank=" << rerank_ms << " ms";
    return os.str();
}

Pipeline::Pipeline(const RunConfig& config, const ContentCatalog& catalog,
                   std::shared_ptr<const EmbeddingStore> store)
    : config_(config),
      catalog_(catalog),
      store_(std::move(store)),
      provider_(config.make_provider()),
      scorer_(config.make_scorer()) {}

RunReport Pipeline::prepopulate(const OpportunitySnapshot& snapshot) {
    std::vector<const Opportunity*> all;
    all.reserve(snapshot.opportunities.size());
    for (const Opportunity& opp : snapshot.opportunities) all.push_back(&opp);
    return run(snapshot, all, RunMode::Prepopulate, Watermark{});
}

RunReport Pipeline::run_daily(const OpportunitySnapshot& snapshot) {
    Watermark watermark = Watermark::load(config_.watermark_path);
    auto delta = detect_delta(watermark, snapshot);
    return run(snapshot, delta, RunMode::Daily, std::move(watermark));
}

RunReport Pipeline::run(const OpportunitySnapshot& snapshot,
                        const std::vector<const Opportunity*>& batch,
                        RunMode mode, Watermark watermark) {
    auto run_start = Clock::now();
    FeatureGroup group = parse_group(config_.prompt_group);

    RunReport report;
    report.mode = mode;
    report.workers = config_.workers;
    for (const Opportunity* opp : batch) {
        if (watermark.signatures.count(opp->opportunity_id))
            ++report.delta_changed;
        else
            ++report.delta_new;
    }
    report.processed = batch.size();

    struct Slot {
        Prompt prompt;
        EmbeddingVector vec;
        CandidateSet candidates;
        Recommendation rec;
        bool skipped = false;
    };
    std::vector<Slot> slots(batch.size());

    auto fail_run = [&](const char* stage, const ParallelResult& r) {
        std::ostringstream os;
        os << stage << " stage failed for " << r.failures.size() << " item(s):";
        for (const auto& [i, err] : r.failures)
            os << " " << batch[i]->opportunity_id << " (" << err << ")";
        throw StorageError(os.str());
    };

    auto embed_result = execute_parallel(
        batch.size(), config_.workers,
        [&](std::size_t i) {
            try {
                slots[i].prompt = build_opportunity_prompt(*batch[i], group);
            } catch (const EmptyPromptError&) {
                slots[i].skipped = true;
                return;
            }
            auto vecs = provider_->embed_batch({&slots[i].prompt, 1});
            slots[i].vec = std::move(vecs.front());
        },
        config_.retry_limit);
    if (!embed_result.failures.empty()) fail_run("embed", embed_result);
    report.embed_ms = embed_result.wall_time_ms;

    auto retrieve_result = execute_parallel(
        batch.size(), config_.workers,
        [&](std::size_t i) {
            if (slots[i].skipped) return;
            slots[i].candidates = retrieve_candidates(
                slots[i].vec, *batch[i], *store_, catalog_, config_.top_k);
        },
        config_.retry_limit);
    if (!retrieve_result.failures.empty()) fail_run("retrieve", retrieve_result);
    report.retrieve_ms = retrieve_result.wall_time_ms;

    auto rerank_result = execute_parallel(
        batch.size(), config_.workers,
        [&](std::size_t i) {
            if (slots[i].skipped) return;
            slots[i].rec =
                rerank(slots[i].candidates, slots[i].prompt, catalog_, *scorer_,
                       config_.top_n, config_.batch_size);
            slots[i].rec.generated_at = !batch[i]->snapshot_time.empty()
                                            ? batch[i]->snapshot_time
                                            : snapshot.snapshot_time;
        },
        config_.retry_limit);
    if (!rerank_result.failures.empty()) fail_run("rerank", rerank_result);
    report.rerank_ms = rerank_result.wall_time_ms;

    if (fault_ == FaultPoint::BeforeStoreCommit)
        throw StorageError("injected fault before store commit");

    // commit in id order so reruns append identically
    std::vector<std::size_t> order(batch.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return batch[a]->opportunity_id < batch[b]->opportunity_id;
    });
    RecommendationStore store(config_.recommendations_path);
    for (std::size_t i : order) {
        if (slots[i].skipped) {
            ++report.skipped;
            continue;
        }
        store.upsert(slots[i].rec);
    }
    store.compact();

    if (fault_ == FaultPoint::BeforeWatermark)
        throw StorageError("injected fault before watermark write");

    for (const Opportunity* opp : batch)
        watermark.signatures[opp->opportunity_id] = critical_signature(*opp);
    watermark.last_run_at = std::max(watermark.last_run_at, snapshot.snapshot_time);
    watermark.store_version = store_->version;
    watermark.save(config_.watermark_path);

    report.wall_time_ms = ms_since(run_start);
    report.per_opportunity_ms =
        report.processed ? report.wall_time_ms / double(report.processed) : 0;
    return report;
}

RunReport run_weekly_embed(const RunConfig& config) {
    auto start = Clock::now();
    ContentCatalog catalog = load_content_catalog(config.contents_path);

    VectorStore store =
        std::filesystem::exists(config.store_path)
            ? VectorStore(EmbeddingStore::load(config.store_path))
            : VectorStore(config.dimension);
    auto provider = config.make_provider();
    RefreshStats stats = store.refresh_contents(catalog, *provider);
    if (stats.mutated()) store.snapshot()->save(config.store_path);

    RunReport report;
    report.mode = RunMode::WeeklyEmbed;
    report.processed = stats.added + stats.changed + stats.removed;
    report.delta_new = stats.added;
    report.delta_changed = stats.changed;
    report.workers = 1;
    report.wall_time_ms = ms_since(start);
    return report;
}

}  // namespace contentrec
