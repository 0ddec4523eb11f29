#include <doctest.h>

#include <atomic>
#include <filesystem>

#include "contentrec/pipeline.hpp"
#include "contentrec/synth.hpp"
#include "test_util.hpp"

using namespace contentrec;

namespace {

Opportunity base_opp() {
    Opportunity opp;
    opp.opportunity_id = "o1";
    opp.opportunity_name = "contoso data platform";
    opp.sales_play = "modernize your data estate";
    opp.sales_stage_name = "propose";
    opp.primary_product = "azure synapse";
    opp.segment = "enterprise";
    opp.area_name = "western europe";
    opp.solution_area = "data & ai";
    opp.snapshot_time = "2026-02-01T00:00:00Z";
    return opp;
}

ContentCatalog catalog_of(const std::vector<ContentDoc>& docs) {
    ContentCatalog cat;
    for (const auto& doc : docs) {
        cat.by_id.emplace(doc.content_id, cat.docs.size());
        cat.docs.push_back(doc);
    }
    return cat;
}

OpportunitySnapshot snapshot_of(std::vector<Opportunity> opps) {
    OpportunitySnapshot snap;
    for (auto& opp : opps) {
        snap.by_id.emplace(opp.opportunity_id, snap.opportunities.size());
        snap.snapshot_time = std::max(snap.snapshot_time, opp.snapshot_time);
        snap.opportunities.push_back(std::move(opp));
    }
    return snap;
}

/// Everything a pipeline run needs, rooted in one temp dir.
struct Rig {
    testutil::TempDir dir;
    RunConfig config;
    ContentCatalog catalog;
    std::shared_ptr<const EmbeddingStore> store;

    explicit Rig(const SynthOutput& corpus, std::size_t workers = 1) {
        config.workers = workers;
        config.dimension = 64;
        config.watermark_path = dir.file("watermark.json");
        config.recommendations_path = dir.file("recommendations.jsonl");
        catalog = catalog_of(corpus.contents);
        catalog.snapshot_time = "2026-02-01T00:00:00Z";
        VectorStore vs(config.dimension);
        HashingEmbedder embedder(config.dimension);
        vs.refresh_contents(catalog, embedder);
        store = vs.snapshot();
    }
};

}  // namespace

TEST_CASE("every critical property flips the signature") {
    auto opp = base_opp();
    auto sig = critical_signature(opp);

    auto flipped = [&](auto mutate) {
        Opportunity copy = base_opp();
        mutate(copy);
        return critical_signature(copy) != sig;
    };
    CHECK(flipped([](Opportunity& o) { o.opportunity_id = "o2"; }));
    CHECK(flipped([](Opportunity& o) { o.opportunity_name = "renamed"; }));
    CHECK(flipped([](Opportunity& o) { o.sales_play = "innovate with ai"; }));
    CHECK(flipped([](Opportunity& o) { o.sales_stage_name = "close"; }));
    CHECK(flipped([](Opportunity& o) { o.primary_product = "fabric"; }));
    CHECK(flipped([](Opportunity& o) { o.segment = "smb"; }));
    CHECK(flipped([](Opportunity& o) { o.area_name = "asia"; }));
    CHECK(flipped([](Opportunity& o) { o.sales_play.reset(); }));
}

TEST_CASE("non-critical properties leave the signature unchanged") {
    auto opp = base_opp();
    auto sig = critical_signature(opp);

    opp.snapshot_time = "2026-03-01T00:00:00Z";
    opp.solution_area = "security";
    opp.extra["note"] = "touched";
    CHECK(critical_signature(opp) == sig);

    // normalization: case and whitespace noise is not a change
    opp.opportunity_name = "  Contoso   DATA  Platform ";
    CHECK(critical_signature(opp) == sig);
}

TEST_CASE("adjacent-field boundaries do not collide") {
    auto a = base_opp();
    auto b = base_opp();
    a.sales_play = "alpha";
    a.sales_stage_name = "betagamma";
    b.sales_play = "alphabeta";
    b.sales_stage_name = "gamma";
    CHECK(critical_signature(a) != critical_signature(b));
}

TEST_CASE("watermark round-trips through disk") {
    testutil::TempDir dir;
    std::string path = dir.file("watermark.json");
    CHECK_FALSE(Watermark::exists(path));

    Watermark w;
    w.last_run_at = "2026-02-01T00:00:00Z";
    w.store_version = 7;
    w.signatures["o1"] = 123456789ULL;
    w.signatures["o2"] = 0xFFFFFFFFFFFFFFFFULL;  // full 64-bit range survives
    w.save(path);

    CHECK(Watermark::exists(path));
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    auto back = Watermark::load(path);
    CHECK(back.last_run_at == w.last_run_at);
    CHECK(back.store_version == 7);
    CHECK(back.signatures == w.signatures);

    CHECK_THROWS_AS(Watermark::load(dir.file("missing.json")), StorageError);
}

TEST_CASE("delta detection flags net-new and critically changed only") {
    auto o1 = base_opp();
    auto o2 = base_opp();
    o2.opportunity_id = "o2";
    auto o3 = base_opp();
    o3.opportunity_id = "o3";

    Watermark w;
    w.signatures["o1"] = critical_signature(o1);
    w.signatures["o2"] = critical_signature(o2);
    // o3 is net-new; o2 changes critically; o1 changes non-critically
    o2.primary_product = "ms fabric";
    o1.extra["note"] = "only a note";

    auto delta = detect_delta(w, snapshot_of({o1, o2, o3}));
    REQUIRE(delta.size() == 2);
    CHECK(delta[0]->opportunity_id == "o2");
    CHECK(delta[1]->opportunity_id == "o3");
}

TEST_CASE("quiescent snapshot yields an empty delta") {
    auto o1 = base_opp();
    Watermark w;
    w.signatures["o1"] = critical_signature(o1);
    CHECK(detect_delta(w, snapshot_of({o1})).empty());
}

TEST_CASE("execute_parallel is position-stable for any worker count") {
    std::vector<int> one(100), four(100), nine(100);
    auto fill = [](std::vector<int>& out) {
        return [&out](std::size_t i) { out[i] = int(i * i % 97); };
    };
    CHECK(execute_parallel(100, 1, fill(one)).failures.empty());
    CHECK(execute_parallel(100, 4, fill(four)).failures.empty());
    CHECK(execute_parallel(100, 9, fill(nine)).failures.empty());
    CHECK(one == four);
    CHECK(one == nine);
}

TEST_CASE("transient per-item failures are retried away") {
    std::vector<std::atomic<int>> attempts(10);
    auto result = execute_parallel(
        10, 3,
        [&](std::size_t i) {
            if (attempts[i]++ < 2) throw std::runtime_error("flaky");
        },
        2);
    CHECK(result.failures.empty());
    for (auto& a : attempts) CHECK(a.load() == 3);
}

TEST_CASE("persistent failures are reported in index order") {
    auto result = execute_parallel(
        10, 4,
        [](std::size_t i) {
            if (i % 3 == 0) throw std::runtime_error("item " + std::to_string(i));
        },
        1);
    REQUIRE(result.failures.size() == 4);
    CHECK(result.failures[0] == std::pair<std::size_t, std::string>{0, "item 0"});
    CHECK(result.failures[1].first == 3);
    CHECK(result.failures[3].first == 9);
}

TEST_CASE("zero items is a no-op") {
    auto result = execute_parallel(0, 8, [](std::size_t) {});
    CHECK(result.failures.empty());
}

TEST_CASE("prepopulate then an unchanged daily run") {
    SynthConfig cfg;
    cfg.n_contents = 150;
    cfg.n_opportunities = 40;
    auto corpus = generate(cfg);
    Rig rig(corpus);
    auto snapshot = snapshot_of(corpus.opportunities);

    Pipeline pipeline(rig.config, rig.catalog, rig.store);
    auto report = pipeline.prepopulate(snapshot);
    CHECK(report.processed == 40);
    CHECK(report.delta_new == 40);
    CHECK(report.skipped == 0);

    RecommendationStore recs(rig.config.recommendations_path);
    CHECK(recs.size() == 40);
    for (const auto& id : recs.ids()) {
        auto rec = recs.get(id);
        CHECK(rec.items.size() <= 5);
        CHECK(rec.generated_at == snapshot.find(id)->snapshot_time);
        CHECK(rec.model_version == "jaccard-ref-v1");
    }

    // nothing changed: the daily refresh must do no work
    auto daily = pipeline.run_daily(snapshot);
    CHECK(daily.processed == 0);
    CHECK(daily.delta_new == 0);
    CHECK(daily.delta_changed == 0);
}

TEST_CASE("daily refresh processes exactly the mutated ground truth") {
    SynthConfig cfg;
    cfg.n_contents = 150;
    cfg.n_opportunities = 200;
    cfg.delta_fraction = 0.05;
    auto corpus = generate(cfg);
    Rig rig(corpus);

    Pipeline pipeline(rig.config, rig.catalog, rig.store);
    pipeline.prepopulate(snapshot_of(corpus.opportunities));

    auto day1 = mutate_day(corpus.opportunities, cfg, 1);
    auto snapshot = snapshot_of(day1.snapshot);
    auto expected = detect_delta(Watermark::load(rig.config.watermark_path),
                                 snapshot);
    std::vector<std::string> expected_ids;
    for (const auto* opp : expected) expected_ids.push_back(opp->opportunity_id);
    std::vector<std::string> truth = day1.ground_truth_delta;
    std::sort(truth.begin(), truth.end());
    std::sort(expected_ids.begin(), expected_ids.end());
    CHECK(expected_ids == truth);

    auto report = pipeline.run_daily(snapshot);
    CHECK(report.processed == truth.size());
    // net-new arrivals counted apart from edits
    CHECK(report.delta_new > 0);
    CHECK(report.delta_changed > 0);
    CHECK(report.delta_new + report.delta_changed == report.processed);

    // a second pass over the same day is quiescent
    CHECK(pipeline.run_daily(snapshot).processed == 0);
}

TEST_CASE("recommendation bytes are identical for 1 and 4 workers") {
    SynthConfig cfg;
    cfg.n_contents = 120;
    cfg.n_opportunities = 60;
    auto corpus = generate(cfg);

    std::string bytes[2];
    std::size_t workers[2] = {1, 4};
    for (int i = 0; i < 2; ++i) {
        Rig rig(corpus, workers[i]);
        Pipeline pipeline(rig.config, rig.catalog, rig.store);
        pipeline.prepopulate(snapshot_of(corpus.opportunities));
        bytes[i] = testutil::read_bytes(rig.config.recommendations_path);
    }
    CHECK(bytes[0].size() > 0);
    CHECK(bytes[0] == bytes[1]);
}

TEST_CASE("a crashed run converges to the uninterrupted result on rerun") {
    SynthConfig cfg;
    cfg.n_contents = 100;
    cfg.n_opportunities = 30;
    auto corpus = generate(cfg);
    auto snapshot = snapshot_of(corpus.opportunities);

    // reference: one clean prepopulate
    Rig clean(corpus);
    Pipeline ok(clean.config, clean.catalog, clean.store);
    ok.prepopulate(snapshot);
    auto want_recs = testutil::read_bytes(clean.config.recommendations_path);
    auto want_mark = testutil::read_bytes(clean.config.watermark_path);

    for (auto fault : {FaultPoint::BeforeStoreCommit, FaultPoint::BeforeWatermark}) {
        Rig rig(corpus);
        Pipeline pipeline(rig.config, rig.catalog, rig.store);
        pipeline.set_fault_point(fault);
        CHECK_THROWS_AS(pipeline.prepopulate(snapshot), StorageError);
        // the watermark is never ahead of the committed recommendations
        CHECK_FALSE(Watermark::exists(rig.config.watermark_path));

        pipeline.set_fault_point(FaultPoint::None);
        pipeline.prepopulate(snapshot);
        CHECK(testutil::read_bytes(rig.config.recommendations_path) == want_recs);
        CHECK(testutil::read_bytes(rig.config.watermark_path) == want_mark);
    }
}

TEST_CASE("weekly embed refresh is incremental and idempotent") {
    SynthConfig cfg;
    cfg.n_contents = 80;
    cfg.n_opportunities = 5;
    auto corpus = generate(cfg);

    testutil::TempDir dir;
    write_corpus(corpus, dir.path.string());
    RunConfig config;
    config.dimension = 64;
    config.contents_path = dir.file("contents.jsonl");
    config.store_path = dir.file("embeddings.bin");

    auto first = run_weekly_embed(config);
    CHECK(first.delta_new == 80);
    auto store_bytes = testutil::read_bytes(config.store_path);
    CHECK(store_bytes.size() > 0);

    // unchanged catalog: no re-embedding, store file untouched
    auto second = run_weekly_embed(config);
    CHECK(second.processed == 0);
    CHECK(testutil::read_bytes(config.store_path) == store_bytes);
}
