// End-to-end acceptance suite. Each numbered criterion prints exactly one
// [PASS]/[FAIL]/[SKIP] line; the process exits non-zero if any criterion
// fails. SKIP is reserved for checks whose hardware precondition is not met
// on this machine and never hides a failing check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "contentrec/eval.hpp"
#include "contentrec/pipeline.hpp"
#include "contentrec/retrieval.hpp"
#include "contentrec/synth.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace contentrec;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int num, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", num,
                detail.c_str());
    if (!ok) ++g_failures;
}

void report_skip(int num, const std::string& detail) {
    std::printf("[SKIP] criterion %d: %s\n", num, detail.c_str());
}

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start)
        .count();
}

ContentCatalog catalog_of(const std::vector<ContentDoc>& docs) {
    ContentCatalog cat;
    for (const auto& doc : docs) {
        cat.by_id.emplace(doc.content_id, cat.docs.size());
        cat.docs.push_back(doc);
    }
    cat.snapshot_time = "2026-02-01T00:00:00Z";
    return cat;
}

OpportunitySnapshot snapshot_of(const std::vector<Opportunity>& opps) {
    OpportunitySnapshot snap;
    for (const auto& opp : opps) {
        snap.by_id.emplace(opp.opportunity_id, snap.opportunities.size());
        snap.snapshot_time = std::max(snap.snapshot_time, opp.snapshot_time);
        snap.opportunities.push_back(opp);
    }
    return snap;
}

std::shared_ptr<const EmbeddingStore> build_store(const ContentCatalog& catalog,
                                                  std::size_t dimension) {
    VectorStore vs(dimension);
    HashingEmbedder embedder(dimension);
    vs.refresh_contents(catalog, embedder);
    return vs.snapshot();
}

/// The standard corpus used by most criteria: 2,000 contents and 300
/// opportunities from seed 42, plus its catalog, embedding store and a
/// finished prepopulate run in a temp directory.
struct Fixture {
    SynthConfig cfg;
    SynthOutput corpus;
    ContentCatalog catalog;
    OpportunitySnapshot snapshot;
    std::shared_ptr<const EmbeddingStore> store;
    testutil::TempDir dir;
    RunConfig config;
    double prepopulate_ms = 0;

    Fixture() {
        corpus = generate(cfg);  // defaults: seed 42, 2000 x 300
        catalog = catalog_of(corpus.contents);
        snapshot = snapshot_of(corpus.opportunities);
        store = build_store(catalog, 384);
        config.watermark_path = dir.file("watermark.json");
        config.recommendations_path = dir.file("recommendations.jsonl");
        Pipeline pipeline(config, catalog, store);
        auto start = Clock::now();
        pipeline.prepopulate(snapshot);
        prepopulate_ms = ms_since(start);
    }
};

// --- criterion 1: pipeline output equals the independent brute-force oracle

void criterion_1(const Fixture& fx) {
    RecommendationStore recs(fx.config.recommendations_path);
    HashingEmbedder embedder(384);
    std::size_t mismatches = 0;
    for (const auto& opp : fx.snapshot.opportunities) {
        auto prompt = build_opportunity_prompt(opp);
        std::vector<Prompt> one{prompt};
        auto vec = embedder.embed_batch(one);
        auto want = oracle::top_n(opp, prompt, vec[0].values, fx.catalog,
                                  embedder, 50, 5);
        auto got = recs.get(opp.opportunity_id);
        bool same = got.items.size() == want.size();
        for (std::size_t i = 0; same && i < want.size(); ++i)
            same = got.items[i].content_id == want[i].first;
        if (!same) ++mismatches;
    }
    std::ostringstream os;
    os << "pipeline equals brute-force oracle for "
       << fx.snapshot.opportunities.size() - mismatches << "/"
       << fx.snapshot.opportunities.size() << " opportunities; batch run took "
       << std::lround(fx.prepopulate_ms) << " ms (< 120000 required)";
    report(1, mismatches == 0 && fx.prepopulate_ms < 120000.0, os.str());
}

// --- criterion 2: containment, filter and ordering invariants

void criterion_2(const Fixture& fx) {
    RecommendationStore recs(fx.config.recommendations_path);
    HashingEmbedder embedder(384);
    std::size_t violations = 0;
    for (const auto& opp : fx.snapshot.opportunities) {
        auto prompt = build_opportunity_prompt(opp);
        std::vector<Prompt> one{prompt};
        auto vec = embedder.embed_batch(one);
        auto cands =
            retrieve_candidates(vec[0], opp, *fx.store, fx.catalog, 50);
        for (const auto& [id, score] : cands.candidates)
            if (!oracle::passes(opp, *fx.catalog.find(id))) ++violations;

        auto rec = recs.get(opp.opportunity_id);
        for (std::size_t i = 0; i < rec.items.size(); ++i) {
            const auto& item = rec.items[i];
            bool contained = std::any_of(
                cands.candidates.begin(), cands.candidates.end(),
                [&](const auto& c) { return c.first == item.content_id; });
            if (!contained) ++violations;
            if (item.rank != int(i + 1)) ++violations;
            if (i > 0) {
                const auto& prev = rec.items[i - 1];
                bool ordered = prev.cross_score > item.cross_score ||
                               (prev.cross_score == item.cross_score &&
                                prev.content_id < item.content_id);
                if (!ordered) ++violations;
            }
        }
    }
    report(2, violations == 0,
           "containment/filter/ordering invariants: " +
               std::to_string(violations) + " violations across " +
               std::to_string(fx.snapshot.opportunities.size()) +
               " recommendations");
}

// --- criterion 3: search-space reduction arithmetic at production scale

void criterion_3() {
    auto s = search_space_stats(700000, 40000, 7000);
    bool ok = s.naive_pairs == 2.8e10 && s.filtered_pairs == 4.9e9 &&
              std::abs(s.reduction_fraction - 0.825) < 1e-12;
    std::ostringstream os;
    os << "search space 700000x40000 with 7000 avg filtered: naive "
       << s.naive_pairs << ", filtered " << s.filtered_pairs << ", reduction "
       << s.reduction_fraction;
    report(3, ok, os.str());
}

// --- criterion 4: rerank record count

void criterion_4() {
    auto n = count_rerank_records(1000, 50);
    report(4, n == 50000,
           "count_rerank_records(1000, 50) = " + std::to_string(n) +
               " (expected 50000)");
}

// --- criterion 5: delta detection over five simulated days + field cases

void criterion_5(const Fixture& fx) {
    // fresh pipeline state so this criterion owns its watermark
    testutil::TempDir dir;
    RunConfig config;
    config.watermark_path = dir.file("watermark.json");
    config.recommendations_path = dir.file("recommendations.jsonl");
    Pipeline pipeline(config, fx.catalog, fx.store);
    pipeline.prepopulate(fx.snapshot);

    bool ok = true;
    std::ostringstream why;
    auto opps = fx.corpus.opportunities;
    for (std::uint32_t day = 1; day <= 5; ++day) {
        auto mutation = mutate_day(opps, fx.cfg, day);
        auto snapshot = snapshot_of(mutation.snapshot);
        auto watermark = Watermark::load(config.watermark_path);
        std::vector<std::string> detected;
        for (const auto* opp : detect_delta(watermark, snapshot))
            detected.push_back(opp->opportunity_id);
        std::sort(detected.begin(), detected.end());
        if (detected != mutation.ground_truth_delta) {
            ok = false;
            why << " day " << day << " delta mismatch;";
        }
        pipeline.run_daily(snapshot);
        auto after = Watermark::load(config.watermark_path);
        if (!detect_delta(after, snapshot).empty()) {
            ok = false;
            why << " day " << day << " not quiescent after run;";
        }
        opps = std::move(mutation.snapshot);
    }

    // seven critical single-field changes flag, one non-critical does not
    Opportunity base = fx.corpus.opportunities[0];
    Watermark w;
    w.signatures[base.opportunity_id] = critical_signature(base);
    auto flags = [&](const Opportunity& changed) {
        return !detect_delta(w, snapshot_of({changed})).empty();
    };
    std::size_t positives = 0;
    {
        auto o = base; o.opportunity_id += "x";
        Watermark wx; wx.signatures[o.opportunity_id] = 0;  // unknown id
        positives += !detect_delta(wx, snapshot_of({o})).empty();
    }
    { auto o = base; o.opportunity_name += " renamed"; positives += flags(o); }
    { auto o = base; o.sales_play = "another play"; positives += flags(o); }
    { auto o = base; o.sales_stage_name = "someother"; positives += flags(o); }
    { auto o = base; o.primary_product = "otherproduct"; positives += flags(o); }
    { auto o = base; o.segment = "othersegment"; positives += flags(o); }
    { auto o = base; o.area_name = "otherarea"; positives += flags(o); }
    bool negative_ok;
    {
        auto o = base;
        o.extra["note"] = "non-critical edit";
        o.snapshot_time = "2026-03-01T00:00:00Z";
        negative_ok = !flags(o);
    }
    if (positives != 7 || !negative_ok) {
        ok = false;
        why << " field cases: " << positives << "/7 positive, negative "
            << (negative_ok ? "ok" : "WRONG") << ";";
    }
    report(5, ok,
           ok ? "delta detection exact on 5 simulated days; 7 critical-field "
                "positives and 1 non-critical negative all correct"
              : "delta detection failed:" + why.str());
}

// --- criterion 6: worker-count determinism and quiescent-daily stability

void criterion_6(const Fixture& fx) {
    std::string bytes[2];
    std::size_t workers[2] = {1, 4};
    bool quiescent_ok = true;
    for (int i = 0; i < 2; ++i) {
        testutil::TempDir dir;
        RunConfig config;
        config.workers = workers[i];
        config.watermark_path = dir.file("watermark.json");
        config.recommendations_path = dir.file("recommendations.jsonl");
        Pipeline pipeline(config, fx.catalog, fx.store);
        pipeline.prepopulate(fx.snapshot);
        bytes[i] = testutil::read_bytes(config.recommendations_path);
        pipeline.run_daily(fx.snapshot);  // nothing changed
        quiescent_ok = quiescent_ok &&
                       testutil::read_bytes(config.recommendations_path) ==
                           bytes[i];
    }
    bool ok = !bytes[0].empty() && bytes[0] == bytes[1] && quiescent_ok;
    report(6, ok,
           std::string("recommendations.jsonl byte-identical for W=1 and W=4 (") +
               std::to_string(bytes[0].size()) + " bytes)" +
               (quiescent_ok ? "; quiescent daily run left it untouched"
                             : "; QUIESCENT RUN MUTATED THE STORE"));
}

// --- criterion 7: parallel speedup and linear scaling of the rerank stage

void criterion_7() {
    SynthConfig cfg;
    cfg.n_opportunities = 2000;
    auto corpus = generate(cfg);
    auto catalog = catalog_of(corpus.contents);
    auto store = build_store(catalog, 64);
    HashingEmbedder embedder(64);
    JaccardScorer scorer;

    std::vector<Prompt> prompts(corpus.opportunities.size());
    std::vector<CandidateSet> cands(corpus.opportunities.size());
    for (std::size_t i = 0; i < corpus.opportunities.size(); ++i) {
        prompts[i] = build_opportunity_prompt(corpus.opportunities[i]);
        std::vector<Prompt> one{prompts[i]};
        auto vec = embedder.embed_batch(one);
        cands[i] = retrieve_candidates(vec[0], corpus.opportunities[i], *store,
                                       catalog, 50);
    }

    auto rerank_stage_ms = [&](std::size_t n, std::size_t workers) {
        double best = 1e18;
        for (int rep = 0; rep < 3; ++rep) {
            auto r = execute_parallel(n, workers, [&](std::size_t i) {
                volatile auto rec =
                    rerank(cands[i], prompts[i], catalog, scorer, 5, 64)
                        .items.size();
                (void)rec;
            });
            best = std::min(best, r.wall_time_ms);
        }
        return best;
    };

    double t_1000 = rerank_stage_ms(1000, 1);
    double t_2000 = rerank_stage_ms(2000, 1);
    double growth = t_2000 / t_1000;
    bool linear_ok = growth >= 1.3 && growth <= 2.7;

    unsigned cores = std::thread::hardware_concurrency();
    std::ostringstream os;
    os.precision(3);
    if (cores >= 4) {
        double w1 = rerank_stage_ms(2000, 1);
        double w4 = rerank_stage_ms(2000, 4);
        double speedup = w1 / w4;
        os << "rerank stage speedup W=1/W=4 = " << speedup
           << " (>= 2.5 required on " << cores << " cores); 2x-load growth "
           << growth << " (within 2x +/- 35%)";
        report(7, speedup >= 2.5 && linear_ok, os.str());
    } else {
        os << "speedup check needs >= 4 physical cores, this machine exposes "
           << cores << "; 2x-load growth " << growth
           << " is " << (linear_ok ? "within" : "OUTSIDE") << " 2x +/- 35%";
        if (linear_ok)
            report_skip(7, os.str());
        else
            report(7, false, os.str());
    }
}

// --- criterion 8: correlation metrics against a direct-formula oracle

void criterion_8() {
    bool ok = true;
    std::ostringstream why;

    std::mt19937_64 rng(2026);
    auto unit = [&] { return double(rng() >> 11) * (1.0 / 9007199254740992.0); };
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(22), y(22);
        for (int i = 0; i < 22; ++i) {
            x[i] = unit() * 20 - 10;
            y[i] = 0.4 * x[i] + unit() * 8;
        }
        worst = std::max(worst,
                         std::abs(pearson(x, y) - oracle::pearson_direct(x, y)));
        worst = std::max(
            worst, std::abs(spearman(x, y) - oracle::spearman_direct(x, y)));
    }
    if (worst >= 1e-12) {
        ok = false;
        why << " oracle deviation " << worst << ";";
    }

    double p = pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4});
    if (std::abs(p - 0.98198) > 1e-5) { ok = false; why << " pinned pearson " << p << ";"; }
    double s = spearman(std::vector<double>{1, 2, 3, 4, 5},
                        std::vector<double>{1, 3, 2, 4, 5});
    if (s != 0.9) { ok = false; why << " pinned spearman " << s << ";"; }

    for (int trial = 0; trial < 100 && ok; ++trial) {
        std::vector<double> x(15), y(15), ax(15), mx(15);
        for (int i = 0; i < 15; ++i) {
            x[i] = unit() * 6 - 3;
            y[i] = unit() * 6 - 3;
            ax[i] = 2.5 * x[i] - 7;
            mx[i] = std::exp(x[i]);
        }
        if (std::abs(pearson(ax, y) - pearson(x, y)) > 1e-12 ||
            std::abs(spearman(mx, y) - spearman(x, y)) > 1e-12) {
            ok = false;
            why << " invariance case " << trial << ";";
        }
    }

    std::ostringstream os;
    os.precision(3);
    os << "pearson/spearman vs direct oracle on 1000 series (max dev " << worst
       << " < 1e-12), pinned values exact, 100 invariance cases hold";
    report(8, ok, ok ? os.str() : "correlation metrics failed:" + why.str());
}

// --- criteria 9/10 share the two-stage evaluation queries

std::vector<EvalQuery> run_group(const Fixture& fx, FeatureGroup group) {
    HashingEmbedder embedder(384);
    JaccardScorer scorer;
    std::vector<EvalQuery> queries;
    for (const auto& opp : fx.snapshot.opportunities) {
        auto prompt = build_opportunity_prompt(opp, group);
        std::vector<Prompt> one{prompt};
        auto vec = embedder.embed_batch(one);
        auto cands =
            retrieve_candidates(vec[0], opp, *fx.store, fx.catalog, 50);
        auto rec = rerank(cands, prompt, fx.catalog, scorer, 5);
        if (rec.items.size() < 5) continue;
        EvalQuery q;
        q.query_id = opp.opportunity_id;
        q.opportunity_prompt = prompt.text;
        q.group = group;
        q.expected = rec;
        for (const auto& item : rec.items)
            q.mean_cross_score += item.cross_score / double(rec.items.size());
        queries.push_back(std::move(q));
    }
    return queries;
}

void criterion_9_10(const Fixture& fx) {
    std::map<FeatureGroup, std::vector<EvalQuery>> by_group;
    for (auto g : {FeatureGroup::A, FeatureGroup::B, FeatureGroup::C,
                   FeatureGroup::D})
        by_group[g] = run_group(fx, g);

    auto mean_of = [&](FeatureGroup g) {
        double sum = 0;
        for (const auto& q : by_group[g]) sum += q.mean_cross_score;
        return sum / double(by_group[g].size());
    };
    double a = mean_of(FeatureGroup::A), b = mean_of(FeatureGroup::B);
    double c = mean_of(FeatureGroup::C), d = mean_of(FeatureGroup::D);
    {
        std::ostringstream os;
        os.precision(4);
        os << "ablation means A=" << a << " B=" << b << " C=" << c
           << " D=" << d << "; dropping the sales play (group B) is strictly "
           << (b < std::min({a, c, d}) ? "worst" : "NOT worst");
        report(9, b < std::min({a, c, d}), os.str());
    }

    // criterion 10: deterministic judge loop on 22 synthetic queries whose
    // documents share a controlled number of tokens with the query, so the
    // true relevance spans the whole 0-5 scale; ratings are 5 * cross score
    constexpr std::size_t kQueryTokens = 20;
    JaccardScorer scorer;
    std::vector<EvalQuery> queries;
    std::vector<std::vector<std::string>> query_docs;
    for (int qi = 0; qi < 22; ++qi) {
        std::string tag = "q" + std::to_string(qi);
        std::string opp_text;
        for (std::size_t t = 0; t < kQueryTokens; ++t)
            opp_text += tag + "w" + std::to_string(t) + " ";
        EvalQuery q;
        q.query_id = tag;
        q.opportunity_prompt = opp_text;
        std::vector<std::string> docs;
        for (std::size_t item = 0; item < 5; ++item) {
            // shared-token count grows with the query index and jitters per
            // item; jaccard = shared / (2 * kQueryTokens - shared)
            std::size_t shared = std::min<std::size_t>(
                kQueryTokens, 1 + (std::size_t(qi) * 18) / 21 + item % 3);
            std::string doc;
            for (std::size_t t = 0; t < shared; ++t)
                doc += tag + "w" + std::to_string(t) + " ";
            for (std::size_t t = shared; t < kQueryTokens; ++t)
                doc += tag + "doc" + std::to_string(item) + "u" +
                       std::to_string(t) + " ";
            docs.push_back(std::move(doc));
        }
        queries.push_back(std::move(q));
        query_docs.push_back(std::move(docs));
    }

    bool phrases_ok = true;
    MockJudge judge;
    std::vector<RatingSet> human, judged;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const auto& q = queries[qi];
        const auto& docs = query_docs[qi];
        Prompt opp_prompt{q.opportunity_prompt, q.query_id, {}, 0};
        RatingSet h{q.query_id, "rater", {}};
        for (std::size_t i = 0; i < 5; ++i)
            h.scores[i] =
                5.0 * scorer.score(opp_prompt, Prompt{docs[i], "d", {}, 0});
        auto request = build_judge_prompt(q.opportunity_prompt, docs);
        phrases_ok = phrases_ok &&
                     request.find("Calculate the similarity score") !=
                         std::string::npos &&
                     request.find("Use a scale from 0 to 5") != std::string::npos;
        RatingSet j{q.query_id, judge.name(),
                    parse_judge_response(judge.respond(request))};
        human.push_back(std::move(h));
        judged.push_back(std::move(j));
    }
    auto alignment = judge_alignment(queries, human, judged);
    std::ostringstream os;
    os.precision(4);
    os << "judge template phrases " << (phrases_ok ? "verbatim" : "MISSING")
       << "; mock-judge alignment Pearson " << alignment.pearson_r
       << " over " << queries.size() << " queries (>= 0.98 required)";
    report(10, phrases_ok && alignment.pearson_r >= 0.98 && queries.size() == 22,
           os.str());
}

// --- criterion 11: crash injection converges to the uninterrupted bytes

void criterion_11(const Fixture& fx) {
    auto want = testutil::read_bytes(fx.config.recommendations_path);
    bool ok = !want.empty();
    for (auto fault :
         {FaultPoint::BeforeStoreCommit, FaultPoint::BeforeWatermark}) {
        testutil::TempDir dir;
        RunConfig config;
        config.watermark_path = dir.file("watermark.json");
        config.recommendations_path = dir.file("recommendations.jsonl");
        Pipeline pipeline(config, fx.catalog, fx.store);
        pipeline.set_fault_point(fault);
        try {
            pipeline.prepopulate(fx.snapshot);
            ok = false;  // the injected fault must surface
        } catch (const StorageError&) {
        }
        // the watermark must never claim work the store does not have
        ok = ok && !Watermark::exists(config.watermark_path);
        pipeline.set_fault_point(FaultPoint::None);
        pipeline.prepopulate(fx.snapshot);
        ok = ok && testutil::read_bytes(config.recommendations_path) == want;
    }
    report(11, ok,
           "reruns after crashes before the store commit and before the "
           "watermark write both converge to the uninterrupted bytes");
}

}  // namespace

int main() {
    std::printf("acceptance: corpus 2000 contents x 300 opportunities, seed 42\n");
    Fixture fx;
    criterion_1(fx);
    criterion_2(fx);
    criterion_3();
    criterion_4();
    criterion_5(fx);
    criterion_6(fx);
    criterion_7();
    criterion_8();
    criterion_9_10(fx);
    criterion_11(fx);
    if (g_failures)
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    else
        std::printf("acceptance: all criteria passed\n");
    return g_failures == 0 ? 0 : 1;
}
