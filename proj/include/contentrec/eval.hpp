#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "contentrec/prompt.hpp"
#include "contentrec/rerank.hpp"

namespace contentrec {

/// One curated evaluation query: an opportunity prompt, its ablation
/// group, and the model's top-5 for it.
struct EvalQuery {
    std::string query_id;
    std::string opportunity_prompt;
    FeatureGroup group = FeatureGroup::A;
    Recommendation expected;
    double mean_cross_score = 0;  // arithmetic mean of the item scores
};

/// One rater's scores for a query's five recommended items, each in [0,5].
struct RatingSet {
    std::string query_id;
    std::string rater_id;
    std::array<double, 5> scores{};
};

/// Product-moment correlation. Throws LengthMismatchError and
/// DegenerateSeriesError (zero variance).
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson of rank-transformed series; ties get average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct AlignmentReport {
    double pearson_r = 0;
    double spearman_rho = 0;
    /// (query_id, x, y) scatter points, one per query.
    std::vector<std::tuple<std::string, double, double>> scatter;

    std::string to_json() const;
    std::string scatter_csv() const;
};

/// Correlates mean human rating (averaged over items, then raters)
/// against mean_cross_score across queries.
AlignmentReport alignment_report(const std::vector<EvalQuery>& queries,
                                 const std::vector<RatingSet>& ratings);

struct GroupSummary {
    std::string group;
    std::size_t n_queries = 0;
    double mean = 0;
    double min = 0;
    double max = 0;
};

struct AblationReport {
    std::vector<GroupSummary> groups;  // ordered A..D, present groups only
    /// (group, query_id, mean_cross_score) ordered by group then query.
    std::vector<std::tuple<std::string, std::string, double>> per_query;

    std::string to_json() const;
    const GroupSummary* find(const std::string& group) const;
};

AblationReport ablation_report(const std::vector<EvalQuery>& queries);

/// Renders the judge request: fixed template with the opportunity prompt
/// and the five ranked documents substituted, asking for 0-5 scores, a
/// brief justification, and a final machine-readable
/// "SCORES: s1,s2,s3,s4,s5" line. Throws WrongDocCountError.
std::string build_judge_prompt(const std::string& opportunity_prompt,
                               std::span<const std::string> doc_prompts);

/// Extracts five scores from the SCORES line, falling back to scanning
/// for "Doc[i] ... <number>" patterns. Out-of-range values are clamped
/// to [0,5] with a warning on the diagnostic stream.
std::array<double, 5> parse_judge_response(const std::string& text);

/// Judge contract: request text in, response text out.
class Judge {
  public:
    virtual ~Judge() = default;
    virtual std::string name() const = 0;
    virtual std::string respond(const std::string& request) const = 0;
};

/// Deterministic offline judge: scores each document as
/// round(5 * reference cross score vs the opportunity prompt) and emits
/// a well-formed response with justification and SCORES line.
class MockJudge final : public Judge {
  public:
    std::string name() const override { return "mock-judge-v1"; }
    std::string respond(const std::string& request) const override;
};

/// Chat-completion endpoint behind the Judge contract, temperature 0.
class HttpJudge final : public Judge {
  public:
    HttpJudge(std::string endpoint, int timeout_ms = 30000,
              std::string api_key = {});
    std::string name() const override { return "http-judge"; }
    std::string respond(const std::string& request) const override;

  private:
    std::string endpoint_;
    int timeout_ms_;
    std::string api_key_;
};

/// Same mechanics as alignment_report, correlating mean human scores
/// against mean judge scores per query.
AlignmentReport judge_alignment(const std::vector<EvalQuery>& queries,
                                const std::vector<RatingSet>& human_ratings,
                                const std::vector<RatingSet>& judge_ratings);

// eval_queries.jsonl / ratings.jsonl round-trip
std::string eval_query_to_json(const EvalQuery& q);
EvalQuery eval_query_from_json(const std::string& line);
std::string rating_to_json(const RatingSet& r);
RatingSet rating_from_json(const std::string& line);

}  // namespace contentrec
