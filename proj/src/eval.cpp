#include "contentrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "contentrec/text.hpp"

namespace contentrec {

namespace {

using nlohmann::json;

void check_series(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw LengthMismatchError("series lengths differ: " +
                                  std::to_string(x.size()) + " vs " +
                                  std::to_string(y.size()));
    if (x.size() < 2)
        throw LengthMismatchError("need at least 2 points, got " +
                                  std::to_string(x.size()));
}

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

/// Ranks with ties broken by averaging (1-based).
std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        double avg = (double(i) + double(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    check_series(x, y);
    double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0)
        throw DegenerateSeriesError("constant series has undefined correlation");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_series(x, y);
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    return pearson(rx, ry);
}

std::string AlignmentReport::to_json() const {
    json points = json::array();
    for (const auto& [id, x, y] : scatter)
        points.push_back({{"query_id", id}, {"x", x}, {"y", y}});
    return json{{"pearson", pearson_r},
                {"spearman", spearman_rho},
                {"points", std::move(points)}}
        .dump();
}

std::string AlignmentReport::scatter_csv() const {
    std::ostringstream os;
    os << "query_id,x,y\n";
    for (const auto& [id, x, y] : scatter)
        os << id << "," << x << "," << y << "\n";
    return os.str();
}

namespace {

/// Per query: average over the 5 items, then over raters.
std::map<std::string, double> mean_rating_by_query(
    const std::vector<RatingSet>& ratings) {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const RatingSet& r : ratings) {
        double item_mean = mean(r.scores);
        auto& [sum, n] = acc[r.query_id];
        sum += item_mean;
        ++n;
    }
    std::map<std::string, double> out;
    for (const auto& [qid, sn] : acc) out[qid] = sn.first / double(sn.second);
    return out;
}

AlignmentReport correlate(const std::vector<std::tuple<std::string, double, double>>& pts) {
    AlignmentReport report;
    report.scatter = pts;
    std::vector<double> xs, ys;
    for (const auto& [id, x, y] : pts) {
        xs.push_back(x);
        ys.push_back(y);
    }
    report.pearson_r = pearson(xs, ys);
    report.spearman_rho = spearman(xs, ys);
    return report;
}

}  // namespace

AlignmentReport alignment_report(const std::vector<EvalQuery>& queries,
                                 const std::vector<RatingSet>& ratings) {
    auto human = mean_rating_by_query(ratings);
    std::vector<std::tuple<std::string, double, double>> pts;
    for (const EvalQuery& q : queries) {
        auto it = human.find(q.query_id);
        if (it == human.end()) continue;  // unrated query
        pts.emplace_back(q.query_id, it->second, q.mean_cross_score);
    }
    return correlate(pts);
}

const GroupSummary* AblationReport::find(const std::string& group) const {
    for (const auto& g : groups)
        if (g.group == group) return &g;
    return nullptr;
}

std::string AblationReport::to_json() const {
    json gs = json::array();
    for (const auto& g : groups)
        gs.push_back({{"group", g.group},
                      {"n_queries", g.n_queries},
                      {"mean", g.mean},
                      {"min", g.min},
                      {"max", g.max}});
    json qs = json::array();
    for (const auto& [group, qid, score] : per_query)
        qs.push_back({{"group", group}, {"query_id", qid}, {"score", score}});
    return json{{"groups", std::move(gs)}, {"queries", std::move(qs)}}.dump();
}

AblationReport ablation_report(const std::vector<EvalQuery>& queries) {
    std::map<std::string, std::vector<std::pair<std::string, double>>> by_group;
    for (const EvalQuery& q : queries)
        by_group[group_label(q.group)].emplace_back(q.query_id,
                                                    q.mean_cross_score);
    AblationReport report;
    for (auto& [group, entries] : by_group) {
        std::sort(entries.begin(), entries.end());
        GroupSummary s;
        s.group = group;
        s.n_queries = entries.size();
        s.min = entries.front().second;
        s.max = s.min;
        double sum = 0;
        for (const auto& [qid, score] : entries) {
            sum += score;
            s.min = std::min(s.min, score);
            s.max = std::max(s.max, score);
            report.per_query.emplace_back(group, qid, score);
        }
        s.mean = sum / double(entries.size());
        report.groups.push_back(std::move(s));
    }
    return report;
}

std::string build_judge_prompt(const std::string& opportunity_prompt,
                               std::span<const std::string> doc_prompts) {
    if (doc_prompts.size() != 5) throw WrongDocCountError(doc_prompts.size());
    std::ostringstream os;
    os << "\"role\" : \"You are an AI assistant that helps people find "
          "information\".\n\n";
    os << "\"role\" : \"user\" ; Given the following query about an "
          "opportunity:\n";
    os << "- " << opportunity_prompt << "\n";
    os << "And the following documents:\n";
    for (std::size_t i = 0; i < 5; ++i)
        os << "- Doc[" << (i + 1) << "]: " << doc_prompts[i] << "\n";
    os << "Please perform the following tasks:\n";
    os << "- Calculate the similarity score between the query and each "
          "document. The similarity score should reflect how relevant each "
          "document is to the information contained in the query. Use a "
          "scale from 0 to 5, where 5 indicates a perfect match and 0 "
          "indicates no relevance.\n";
    os << "- Provide a brief justification for the ranking based on the "
          "similarity scores.\n";
    os << "Finish your answer with a single machine-readable line of the "
          "form \"SCORES: s1,s2,s3,s4,s5\" where si is your score for "
          "Doc[i].\n";
    return os.str();
}

std::array<double, 5> parse_judge_response(const std::string& text) {
    auto clamp_score = [](double s) {
        if (s < 0 || s > 5) {
            std::cerr << "judge score " << s << " outside [0,5], clamped\n";
            return std::clamp(s, 0.0, 5.0);
        }
        return s;
    };

    static const std::regex scores_line(
        R"(SCORES:\s*([0-9.+-]+)\s*,\s*([0-9.+-]+)\s*,\s*([0-9.+-]+)\s*,\s*([0-9.+-]+)\s*,\s*([0-9.+-]+))");
    std::smatch m;
    if (std::regex_search(text, m, scores_line)) {
        std::array<double, 5> out{};
        for (int i = 0; i < 5; ++i) out[i] = clamp_score(std::stod(m[i + 1]));
        return out;
    }

    // fallback: "Doc[i] ... <number>" patterns anywhere in the prose
    std::array<double, 5> out{};
    int found = 0;
    for (int i = 1; i <= 5; ++i) {
        std::regex doc_pattern(R"(Doc\[)" + std::to_string(i) +
                               R"(\][^0-9-]*(-?[0-9]+(?:\.[0-9]+)?))");
        if (std::regex_search(text, m, doc_pattern)) {
            out[i - 1] = clamp_score(std::stod(m[1]));
            ++found;
        }
    }
    if (found != 5)
        throw UnparseableResponseError(
            "could not extract 5 scores from judge response");
    return out;
}

std::string MockJudge::respond(const std::string& request) const {
    // recover the opportunity prompt and the five documents from the request
    std::istringstream in(request);
    std::string line, opp;
    std::array<std::string, 5> docs;
    bool next_is_opp = false;
    while (std::getline(in, line)) {
        if (line.rfind("\"role\" : \"user\"", 0) == 0) {
            next_is_opp = true;
            continue;
        }
        if (next_is_opp && line.rfind("- ", 0) == 0) {
            opp = line.substr(2);
            next_is_opp = false;
            continue;
        }
        for (int i = 1; i <= 5; ++i) {
            std::string tag = "- Doc[" + std::to_string(i) + "]: ";
            if (line.rfind(tag, 0) == 0) docs[i - 1] = line.substr(tag.size());
        }
    }
    if (opp.empty())
        throw UnparseableResponseError("mock judge got a malformed request");

    JaccardScorer scorer;
    Prompt q{opp, "judge-query", {}, fnv1a64(opp)};
    std::ostringstream os;
    os << "Each document was compared against the query on shared "
          "vocabulary.\n";
    std::array<int, 5> scores{};
    for (int i = 0; i < 5; ++i) {
        Prompt d{docs[i], "judge-doc", {}, fnv1a64(docs[i])};
        scores[i] = static_cast<int>(std::lround(5.0 * scorer.score(q, d)));
        os << "Doc[" << (i + 1) << "] overlap suggests a score of "
           << scores[i] << ".\n";
    }
    os << "SCORES: " << scores[0] << "," << scores[1] << "," << scores[2]
       << "," << scores[3] << "," << scores[4] << "\n";
    return os.str();
}

HttpJudge::HttpJudge(std::string endpoint, int timeout_ms, std::string api_key)
    : endpoint_(std::move(endpoint)),
      timeout_ms_(timeout_ms),
      api_key_(std::move(api_key)) {}

std::string HttpJudge::respond(const std::string& request) const {
    httplib::Client client(endpoint_);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    json body{{"temperature", 0},
              {"messages",
               {{{"role", "user"}, {"content", request}}}}};
    auto res = client.Post("/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res || res->status != 200)
        throw ProviderUnavailableError("judge endpoint unavailable");
    json resp = json::parse(res->body);
    return resp.at("choices").at(0).at("message").at("content").get<std::string>();
}

AlignmentReport judge_alignment(const std::vector<EvalQuery>& queries,
                                const std::vector<RatingSet>& human_ratings,
                                const std::vector<RatingSet>& judge_ratings) {
    auto human = mean_rating_by_query(human_ratings);
    auto judge = mean_rating_by_query(judge_ratings);
    std::vector<std::tuple<std::string, double, double>> pts;
    for (const EvalQuery& q : queries) {
        auto h = human.find(q.query_id);
        auto j = judge.find(q.query_id);
        if (h == human.end() || j == judge.end()) continue;
        pts.emplace_back(q.query_id, h->second, j->second);
    }
    return correlate(pts);
}

std::string eval_query_to_json(const EvalQuery& q) {
    json items = json::array();
    for (const auto& item : q.expected.items)
        items.push_back({{"contentid", item.content_id},
                         {"score", item.cross_score},
                         {"rank", item.rank},
                         {"customer_ready", item.customer_ready}});
    return json{{"query_id", q.query_id},
                {"opportunity_prompt", q.opportunity_prompt},
                {"group", group_label(q.group)},
                {"opportunityid", q.expected.opportunity_id},
                {"items", std::move(items)},
                {"mean_cross_score", q.mean_cross_score}}
        .dump();
}

EvalQuery eval_query_from_json(const std::string& line) {
    json j = json::parse(line);
    EvalQuery q;
    q.query_id = j.at("query_id").get<std::string>();
    q.opportunity_prompt = j.at("opportunity_prompt").get<std::string>();
    q.group = parse_group(j.at("group").get<std::string>());
    q.expected.opportunity_id = j.value("opportunityid", "");
    for (const auto& item : j.at("items"))
        q.expected.items.push_back({item.at("contentid").get<std::string>(),
                                    item.at("score").get<double>(),
                                    item.at("rank").get<int>(),
                                    item.value("customer_ready", false)});
    q.mean_cross_score = j.at("mean_cross_score").get<double>();
    return q;
}

std::string rating_to_json(const RatingSet& r) {
    return json{{"query_id", r.query_id},
                {"rater_id", r.rater_id},
                {"scores", r.scores}}
        .dump();
}

RatingSet rating_from_json(const std::string& line) {
    json j = json::parse(line);
    RatingSet r;
    r.query_id = j.at("query_id").get<std::string>();
    r.rater_id = j.at("rater_id").get<std::string>();
    auto scores = j.at("scores").get<std::vector<double>>();
    if (scores.size() != 5)
        throw InvalidConfigError("rating set must have exactly 5 scores");
    std::copy(scores.begin(), scores.end(), r.scores.begin());
    for (double s : r.scores)
        if (s < 0 || s > 5)
            throw InvalidConfigError("rating outside [0,5]");
    return r;
}

}  // namespace contentrec
