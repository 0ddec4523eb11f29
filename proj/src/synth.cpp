#include "contentrec/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

namespace contentrec {

namespace {

using nlohmann::json;

const std::vector<std::string> kSalesPlays = {
    "accelerate innovation with low code platforms",
    "optimize finance and supply chain operations",
    "secure hybrid work with zero trust",
    "modernize legacy data estates in the cloud",
    "unify customer engagement across digital channels",
    "scale intelligent applications with managed services",
};
const std::vector<std::string> kSolutionAreas = {
    "data & ai", "modern work",      "security",
    "infrastructure", "business applications", "digital & app innovation",
};
const std::vector<std::string> kProducts = {
    "fabric",    "azure openai", "dynamics 365", "teams",
    "sentinel",  "power platform", "cosmos db",  "synapse",
};
const std::vector<std::string> kAreas = {
    "western europe", "asia", "americas", "middle east & africa",
    "central europe",
};
const std::vector<std::string> kSalesStages = {"qualify", "develop", "propose",
                                               "close"};
const std::vector<std::string> kSegments = {"enterprise", "smb",
                                            "public sector", "strategic"};
const std::vector<std::string> kDocKinds = {
    "pitch deck", "battle card", "customer success story",
    "technical documentation", "comparison guide"};

constexpr const char* kContentTime = "2026-01-05T00:00:00Z";
constexpr const char* kBaseSnapshotTime = "2026-02-01T00:00:00Z";

std::string day_time(std::uint32_t day) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2026-02-%02uT00:00:00Z", day + 1);
    return buf;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

const std::string& pick(std::mt19937_64& rng,
                        const std::vector<std::string>& v) {
    return v[pick(rng, v.size())];
}

double unit(std::mt19937_64& rng) {
    return double(rng() >> 11) * (1.0 / 9007199254740992.0);
}

/// Per-filter wildcard probability so that wildcard + uniform match hits
/// the requested per-filter pass probability q.
double wildcard_prob(double q, std::size_t vocab_size) {
    double inv = 1.0 / double(vocab_size);
    double w = (q - inv) / (1.0 - inv);
    if (w < 0 || w > 1)
        throw InvalidConfigError("target pass-rate unreachable with vocabulary");
    return w;
}

std::string pad_id(const char* prefix, std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s%06zu", prefix, i);
    return buf;
}

}  // namespace

void SynthConfig::finalize() {
    if (sales_plays.empty()) sales_plays = kSalesPlays;
    if (solution_areas.empty()) solution_areas = kSolutionAreas;
    if (products.empty()) products = kProducts;
    if (areas.empty()) areas = kAreas;
    if (sales_stages.empty()) sales_stages = kSalesStages;
    if (target_pass_rate <= 0 || target_pass_rate > 1)
        throw InvalidConfigError("target_pass_rate must be in (0, 1]");
    if (delta_fraction < 0 || delta_fraction > 1)
        throw InvalidConfigError("delta_fraction must be in [0, 1]");
    if (n_contents == 0 || n_opportunities == 0)
        throw InvalidConfigError("corpus sizes must be positive");
}

SynthOutput generate(const SynthConfig& raw) {
    SynthConfig cfg = raw;
    cfg.finalize();
    std::mt19937_64 rng(cfg.seed);

    double q = std::cbrt(cfg.target_pass_rate);
    double w_stage = wildcard_prob(q, cfg.sales_stages.size());
    double w_area = wildcard_prob(q, cfg.areas.size());
    double w_solution = wildcard_prob(q, cfg.solution_areas.size());

    SynthOutput out;
    out.expected_pass_rate =
        (w_stage + (1 - w_stage) / double(cfg.sales_stages.size())) *
        (w_area + (1 - w_area) / double(cfg.areas.size())) *
        (w_solution + (1 - w_solution) / double(cfg.solution_areas.size()));

    out.contents.reserve(cfg.n_contents);
    for (std::size_t i = 0; i < cfg.n_contents; ++i) {
        ContentDoc doc;
        doc.content_id = pad_id("C", i);
        const std::string& theme = pick(rng, cfg.sales_plays);
        const std::string& product = pick(rng, cfg.products);
        const std::string& kind = pick(rng, kDocKinds);
        doc.name = product + " " + kind + " " + std::to_string(i);
        if (unit(rng) < 1 - w_solution)
            doc.solution_area = pick(rng, cfg.solution_areas);
        if (unit(rng) < 1 - w_stage)
            doc.sales_stage = pick(rng, cfg.sales_stages);
        if (unit(rng) < 1 - w_area) doc.area = pick(rng, cfg.areas);
        doc.description = "how customers " + theme + " using " + product +
                          (doc.solution_area ? " in " + *doc.solution_area
                                             : std::string{});
        if (unit(rng) < 0.9) doc.product = product;
        doc.customer_ready = unit(rng) < 0.6;
        doc.published = true;
        doc.last_modified = kContentTime;
        out.contents.push_back(std::move(doc));
    }

    out.opportunities.reserve(cfg.n_opportunities);
    for (std::size_t i = 0; i < cfg.n_opportunities; ++i) {
        Opportunity opp;
        opp.opportunity_id = pad_id("O", i);
        const std::string& product = pick(rng, cfg.products);
        opp.opportunity_name =
            "account " + std::to_string(1000 + pick(rng, 9000)) + " " + product +
            " expansion";
        opp.sales_play = pick(rng, cfg.sales_plays);
        opp.sales_stage_name = pick(rng, cfg.sales_stages);
        opp.primary_product = product;
        opp.segment = pick(rng, kSegments);
        opp.area_name = pick(rng, cfg.areas);
        opp.solution_area = pick(rng, cfg.solution_areas);
        opp.snapshot_time = kBaseSnapshotTime;
        opp.extra["note"] = "initial";
        out.opportunities.push_back(std::move(opp));
    }
    return out;
}

std::string content_to_json(const ContentDoc& doc) {
    json j{{"contentid", doc.content_id},
           {"name", doc.name},
           {"description", doc.description},
           {"customerready", doc.customer_ready},
           {"published", doc.published},
           {"lastmodified", doc.last_modified}};
    if (doc.solution_area) j["solutionarea"] = *doc.solution_area;
    if (doc.product) j["product"] = *doc.product;
    if (doc.sales_stage) j["salesstage"] = *doc.sales_stage;
    if (doc.area) j["area"] = *doc.area;
    return j.dump();
}

std::string opportunity_to_json(const Opportunity& opp) {
    json j{{"opportunityid", opp.opportunity_id},
           {"opportunityname", opp.opportunity_name},
           {"snapshottime", opp.snapshot_time}};
    if (opp.sales_play) j["salesplay"] = *opp.sales_play;
    if (opp.sales_stage_name) j["salesstagename"] = *opp.sales_stage_name;
    if (opp.primary_product) j["primaryproduct"] = *opp.primary_product;
    if (opp.segment) j["segment"] = *opp.segment;
    if (opp.area_name) j["areaname"] = *opp.area_name;
    if (opp.solution_area) j["solutionarea"] = *opp.solution_area;
    for (const auto& [key, value] : opp.extra) j[key] = value;
    return j.dump();
}

void write_corpus(const SynthOutput& out, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto dir = std::filesystem::path(out_dir);
    {
        std::ofstream f(dir / "contents.jsonl", std::ios::trunc);
        for (const auto& doc : out.contents) f << content_to_json(doc) << "\n";
    }
    {
        std::ofstream f(dir / "opportunities.jsonl", std::ios::trunc);
        for (const auto& opp : out.opportunities)
            f << opportunity_to_json(opp) << "\n";
    }
    {
        std::ofstream f(dir / "synth_stats.json", std::ios::trunc);
        f << json{{"n_contents", out.contents.size()},
                  {"n_opportunities", out.opportunities.size()},
                  {"expected_pass_rate", out.expected_pass_rate}}
                 .dump()
          << "\n";
    }
}

DayMutation mutate_day(const std::vector<Opportunity>& opportunities,
                       const SynthConfig& raw, std::uint32_t day) {
    SynthConfig cfg = raw;
    cfg.finalize();
    std::mt19937_64 rng(cfg.seed * 1000003ULL + day);

    DayMutation out;
    out.snapshot = opportunities;
    std::size_t n = out.snapshot.size();
    auto n_mutate = static_cast<std::size_t>(
        std::llround(cfg.delta_fraction * double(n)));

    // distinct victims: critical edits first, then a disjoint set of
    // non-critical note edits that must NOT appear in the ground truth
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[pick(rng, i)]);

    std::string stamp = day_time(day);
    for (std::size_t k = 0; k < n_mutate && k < n; ++k) {
        Opportunity& opp = out.snapshot[idx[k]];
        switch (pick(rng, 4)) {
            case 0:
                opp.sales_play = (opp.sales_play ? *opp.sales_play : "") +
                                 " day " + std::to_string(day);
                break;
            case 1:
                opp.opportunity_name += " renewal " + std::to_string(day);
                break;
            case 2:
                opp.sales_stage_name = pick(rng, cfg.sales_stages) + " d" +
                                       std::to_string(day);
                break;
            default:
                opp.primary_product = pick(rng, cfg.products) + " d" +
                                      std::to_string(day);
                break;
        }
        opp.snapshot_time = stamp;
        out.ground_truth_delta.push_back(opp.opportunity_id);
    }
    for (std::size_t k = n_mutate; k < 2 * n_mutate && k < n; ++k) {
        Opportunity& opp = out.snapshot[idx[k]];
        opp.extra["note"] = "touched day " + std::to_string(day);
        opp.snapshot_time = stamp;  // timestamp alone is not a critical change
    }

    // a few net-new opportunities arrive each day
    std::size_t n_new = n_mutate / 2;
    for (std::size_t k = 0; k < n_new; ++k) {
        Opportunity opp;
        opp.opportunity_id =
            pad_id("O", n + std::size_t(day) * 1000 + k);
        const std::string& product = pick(rng, cfg.products);
        opp.opportunity_name =
            "account " + std::to_string(1000 + pick(rng, 9000)) + " " + product +
            " net new";
        opp.sales_play = pick(rng, cfg.sales_plays);
        opp.sales_stage_name = pick(rng, cfg.sales_stages);
        opp.primary_product = product;
        opp.segment = pick(rng, kSegments);
        opp.area_name = pick(rng, cfg.areas);
        opp.solution_area = pick(rng, cfg.solution_areas);
        opp.snapshot_time = stamp;
        out.ground_truth_delta.push_back(opp.opportunity_id);
        out.snapshot.push_back(std::move(opp));
    }

    std::sort(out.ground_truth_delta.begin(), out.ground_truth_delta.end());
    return out;
}

}  // namespace contentrec
