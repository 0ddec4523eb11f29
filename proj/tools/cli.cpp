#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "contentrec/catalog.hpp"
#include "contentrec/config.hpp"
#include "contentrec/eval.hpp"
#include "contentrec/pipeline.hpp"
#include "contentrec/prompt.hpp"
#include "contentrec/retrieval.hpp"
#include "contentrec/serving.hpp"
#include "contentrec/synth.hpp"
#include "contentrec/vector_store.hpp"

namespace {

using namespace contentrec;

RunConfig load_config(const std::string& path) {
    return path.empty() ? RunConfig{} : RunConfig::from_file(path);
}

std::shared_ptr<const EmbeddingStore> load_store(const RunConfig& cfg) {
    return std::make_shared<const EmbeddingStore>(
        EmbeddingStore::load(cfg.store_path));
}

int cmd_synth(const std::string& out_dir, const SynthConfig& synth_cfg) {
    SynthOutput out = generate(synth_cfg);
    write_corpus(out, out_dir);
    std::cout << "wrote " << out.contents.size() << " contents and "
              << out.opportunities.size() << " opportunities to " << out_dir
              << " (expected pass-rate " << out.expected_pass_rate << ")\n";
    return 0;
}

int cmd_render_prompt(const RunConfig& cfg, const std::string& kind,
                      const std::string& id, const std::string& group) {
    if (kind == "content") {
        auto catalog = load_content_catalog(cfg.contents_path);
        const ContentDoc* doc = catalog.find(id);
        if (!doc) throw NotFoundError("no content with id " + id);
        std::cout << build_content_prompt(*doc).text << "\n";
    } else {
        auto snap = load_opportunity_snapshot(cfg.opportunities_path);
        const Opportunity* opp = snap.find(id);
        if (!opp) throw NotFoundError("no opportunity with id " + id);
        std::cout << build_opportunity_prompt(*opp, parse_group(group)).text
                  << "\n";
    }
    return 0;
}

int cmd_embed_contents(const RunConfig& cfg) {
    RunReport report = run_weekly_embed(cfg);
    std::cout << report.to_json() << "\n" << report.summary() << "\n";
    return 0;
}

int cmd_prepopulate(const RunConfig& cfg) {
    auto catalog = load_content_catalog(cfg.contents_path);
    auto snapshot = load_opportunity_snapshot(cfg.opportunities_path);
    Pipeline pipeline(cfg, catalog, load_store(cfg));
    RunReport report = pipeline.prepopulate(snapshot);
    std::cout << report.to_json() << "\n" << report.summary() << "\n";
    return 0;
}

int cmd_refresh_daily(const RunConfig& cfg) {
    auto catalog = load_content_catalog(cfg.contents_path);
    auto snapshot = load_opportunity_snapshot(cfg.opportunities_path);
    Pipeline pipeline(cfg, catalog, load_store(cfg));
    RunReport report = pipeline.run_daily(snapshot);
    std::cout << report.to_json() << "\n" << report.summary() << "\n";
    return 0;
}

int cmd_stats(const RunConfig& cfg) {
    auto catalog = load_content_catalog(cfg.contents_path);
    auto snapshot = load_opportunity_snapshot(cfg.opportunities_path);
    std::uint64_t total_filtered = 0;
    for (const auto& opp : snapshot.opportunities)
        for (const auto& doc : catalog.docs)
            total_filtered += passes_filter(opp, doc) ? 1 : 0;
    double mean_filtered =
        snapshot.opportunities.empty()
            ? 0
            : double(total_filtered) / double(snapshot.opportunities.size());
    SearchSpaceStats s = search_space_stats(snapshot.opportunities.size(),
                                            catalog.docs.size(), mean_filtered);
    nlohmann::json j{{"n_opportunities", s.n_opportunities},
                     {"n_contents", s.n_contents},
                     {"naive_pairs", s.naive_pairs},
                     {"mean_filtered_contents", s.mean_filtered_contents},
                     {"filtered_pairs", s.filtered_pairs},
                     {"reduction_fraction", s.reduction_fraction}};
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_recommend(const RunConfig& cfg, const std::string& id) {
    RecommendationStore store(cfg.recommendations_path);
    std::cout << recommendation_to_json(store.get(id)) << "\n";
    return 0;
}

int cmd_serve(const RunConfig& cfg) {
    RecommendationStore recs(cfg.recommendations_path);
    FeedbackStore feedback(cfg.feedback_path, recs);
    return serve(recs, feedback, cfg.bind_address, cfg.bind_port);
}

std::vector<EvalQuery> read_queries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open queries file: " + path);
    std::vector<EvalQuery> queries;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) queries.push_back(eval_query_from_json(line));
    return queries;
}

std::vector<RatingSet> read_ratings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open ratings file: " + path);
    std::vector<RatingSet> ratings;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ratings.push_back(rating_from_json(line));
    return ratings;
}

int cmd_eval_build_queries(const RunConfig& cfg, const std::string& out_path,
                           const std::string& group_label_arg,
                           std::size_t limit) {
    auto catalog = load_content_catalog(cfg.contents_path);
    auto snapshot = load_opportunity_snapshot(cfg.opportunities_path);
    auto store = load_store(cfg);
    auto provider = cfg.make_provider();
    auto scorer = cfg.make_scorer();
    FeatureGroup group = parse_group(group_label_arg);

    std::ofstream out(out_path, std::ios::trunc);
    std::size_t written = 0;
    for (const auto& opp : snapshot.opportunities) {
        if (written >= limit) break;
        Prompt prompt;
        try {
            prompt = build_opportunity_prompt(opp, group);
        } catch (const EmptyPromptError&) {
            continue;
        }
        auto vec = provider->embed_batch({&prompt, 1});
        auto candidates =
            retrieve_candidates(vec.front(), opp, *store, catalog, cfg.top_k);
        Recommendation rec = rerank(candidates, prompt, catalog, *scorer,
                                    cfg.top_n, cfg.batch_size);
        if (rec.items.empty()) continue;
        EvalQuery q;
        q.query_id = "q-" + opp.opportunity_id + "-" + group_label_arg;
        q.opportunity_prompt = prompt.text;
        q.group = group;
        q.expected = rec;
        double sum = 0;
        for (const auto& item : rec.items) sum += item.cross_score;
        q.mean_cross_score = sum / double(rec.items.size());
        out << eval_query_to_json(q) << "\n";
        ++written;
    }
    std::cout << "wrote " << written << " eval queries to " << out_path << "\n";
    return 0;
}

int cmd_eval_align(const std::string& queries_path, const std::string& ratings_path,
                   const std::string& csv_path) {
    auto report = alignment_report(read_queries(queries_path),
                                   read_ratings(ratings_path));
    std::cout << report.to_json() << "\n";
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::trunc);
        csv << report.scatter_csv();
    }
    return 0;
}

int cmd_eval_ablation(const std::string& queries_path) {
    std::cout << ablation_report(read_queries(queries_path)).to_json() << "\n";
    return 0;
}

int cmd_eval_judge(const RunConfig& cfg, const std::string& queries_path,
                   const std::string& ratings_path, const std::string& judge_kind,
                   const std::string& endpoint,
                   const std::string& transcripts_dir) {
    auto queries = read_queries(queries_path);
    auto catalog = load_content_catalog(cfg.contents_path);
    std::unique_ptr<Judge> judge;
    if (judge_kind == "mock")
        judge = std::make_unique<MockJudge>();
    else
        judge = std::make_unique<HttpJudge>(endpoint);
    if (!transcripts_dir.empty())
        std::filesystem::create_directories(transcripts_dir);

    std::vector<RatingSet> judge_ratings;
    for (const auto& q : queries) {
        if (q.expected.items.size() != 5) continue;
        std::vector<std::string> docs;
        for (const auto& item : q.expected.items) {
            const ContentDoc* doc = catalog.find(item.content_id);
            if (!doc) throw NotFoundError("content missing: " + item.content_id);
            docs.push_back(build_content_prompt(*doc).text);
        }
        std::string request = build_judge_prompt(q.opportunity_prompt, docs);
        std::string response = judge->respond(request);
        if (!transcripts_dir.empty()) {
            std::ofstream t(std::filesystem::path(transcripts_dir) /
                            (q.query_id + ".txt"));
            t << request << "\n---\n" << response;
        }
        RatingSet r;
        r.query_id = q.query_id;
        r.rater_id = judge->name();
        r.scores = parse_judge_response(response);
        judge_ratings.push_back(std::move(r));
    }
    auto report = judge_alignment(queries, read_ratings(ratings_path),
                                  judge_ratings);
    std::cout << report.to_json() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch semantic-matching content recommender"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "data", kind = "opportunity", id;
    std::string group = "A", queries_path = "eval_queries.jsonl";
    std::string ratings_path = "ratings.jsonl", csv_path, judge_kind = "mock";
    std::string endpoint, transcripts_dir;
    std::size_t workers = 0, limit = 22;
    SynthConfig synth_cfg;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file");
        cmd->add_option("--workers", workers, "worker thread count override");
    };

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    synth_cmd->add_option("--out", out_dir, "output directory");
    synth_cmd->add_option("--seed", synth_cfg.seed);
    synth_cmd->add_option("--contents", synth_cfg.n_contents);
    synth_cmd->add_option("--opportunities", synth_cfg.n_opportunities);
    synth_cmd->add_option("--pass-rate", synth_cfg.target_pass_rate);
    synth_cmd->add_option("--delta-fraction", synth_cfg.delta_fraction);

    auto* render_cmd = app.add_subcommand("render-prompt", "print a record's prompt");
    add_config(render_cmd);
    render_cmd->add_option("--type", kind, "content|opportunity");
    render_cmd->add_option("--id", id)->required();
    render_cmd->add_option("--group", group, "ablation group A|B|C|D");

    auto* embed_cmd =
        app.add_subcommand("embed-contents", "refresh the content embedding store");
    embed_cmd->add_flag("--weekly", "scheduled weekly refresh (same operation)");
    add_config(embed_cmd);

    auto* prepopulate_cmd =
        app.add_subcommand("prepopulate", "one-time recommendation prepopulation");
    add_config(prepopulate_cmd);

    auto* refresh_cmd = app.add_subcommand("refresh", "delta refresh");
    refresh_cmd->add_flag("--daily", "daily delta mode (default)");
    add_config(refresh_cmd);

    auto* stats_cmd =
        app.add_subcommand("stats", "search-space statistics for the corpora");
    add_config(stats_cmd);

    auto* recommend_cmd =
        app.add_subcommand("recommend", "look up stored recommendations");
    add_config(recommend_cmd);
    recommend_cmd->add_option("--opportunity-id", id)->required();

    auto* serve_cmd = app.add_subcommand("serve", "bind the lookup/feedback API");
    add_config(serve_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "evaluation harness");
    eval_cmd->require_subcommand(1);
    auto* build_queries_cmd =
        eval_cmd->add_subcommand("build-queries", "derive eval queries from a run");
    add_config(build_queries_cmd);
    build_queries_cmd->add_option("--out", queries_path);
    build_queries_cmd->add_option("--group", group);
    build_queries_cmd->add_option("--limit", limit);
    auto* align_cmd =
        eval_cmd->add_subcommand("align", "human/cross-score correlation");
    align_cmd->add_option("--queries", queries_path);
    align_cmd->add_option("--ratings", ratings_path);
    align_cmd->add_option("--scatter-csv", csv_path);
    auto* ablation_cmd =
        eval_cmd->add_subcommand("ablation", "per-group score summaries");
    ablation_cmd->add_option("--queries", queries_path);
    auto* judge_cmd = eval_cmd->add_subcommand("judge", "LLM-as-judge loop");
    add_config(judge_cmd);
    judge_cmd->add_option("--queries", queries_path);
    judge_cmd->add_option("--ratings", ratings_path);
    judge_cmd->add_option("--judge", judge_kind, "mock|http");
    judge_cmd->add_option("--endpoint", endpoint);
    judge_cmd->add_option("--transcripts", transcripts_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (workers > 0) cfg.workers = workers;
        if (synth_cmd->parsed()) return cmd_synth(out_dir, synth_cfg);
        if (render_cmd->parsed()) return cmd_render_prompt(cfg, kind, id, group);
        if (embed_cmd->parsed()) return cmd_embed_contents(cfg);
        if (prepopulate_cmd->parsed()) return cmd_prepopulate(cfg);
        if (refresh_cmd->parsed()) return cmd_refresh_daily(cfg);
        if (stats_cmd->parsed()) return cmd_stats(cfg);
        if (recommend_cmd->parsed()) return cmd_recommend(cfg, id);
        if (serve_cmd->parsed()) return cmd_serve(cfg);
        if (eval_cmd->parsed()) {
            if (build_queries_cmd->parsed())
                return cmd_eval_build_queries(cfg, queries_path, group, limit);
            if (align_cmd->parsed())
                return cmd_eval_align(queries_path, ratings_path, csv_path);
            if (ablation_cmd->parsed()) return cmd_eval_ablation(queries_path);
            if (judge_cmd->parsed())
                return cmd_eval_judge(cfg, queries_path, ratings_path,
                                      judge_kind, endpoint, transcripts_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
