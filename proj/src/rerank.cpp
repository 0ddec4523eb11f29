#include "contentrec/rerank.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "contentrec/text.hpp"

namespace contentrec {

double JaccardScorer::score(const Prompt& opp_prompt,
                            const Prompt& content_prompt) const {
    if (opp_prompt.text.empty()) throw EmptyPromptError(opp_prompt.source_id);
    if (content_prompt.text.empty())
        throw EmptyPromptError(content_prompt.source_id);
    auto a = token_set(opp_prompt.text);
    auto b = token_set(content_prompt.text);
    if (a.size() > b.size()) std::swap(a, b);
    std::size_t common = 0;
    for (const auto& t : a) common += b.count(t);
    std::size_t uni = a.size() + b.size() - common;
    return uni == 0 ? 0.0 : double(common) / double(uni);
}

HttpCrossScorer::HttpCrossScorer(std::string endpoint, int timeout_ms,
                                 int max_retries, std::string api_key)
    : endpoint_(std::move(endpoint)),
      timeout_ms_(timeout_ms),
      max_retries_(max_retries),
      api_key_(std::move(api_key)) {}

double HttpCrossScorer::score(const Prompt& opp_prompt,
                              const Prompt& content_prompt) const {
    if (opp_prompt.text.empty()) throw EmptyPromptError(opp_prompt.source_id);
    if (content_prompt.text.empty())
        throw EmptyPromptError(content_prompt.source_id);
    nlohmann::json req{{"pairs", {{opp_prompt.text, content_prompt.text}}}};
    std::string body = req.dump();

    httplib::Client client(endpoint_);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(50 << attempt));
        auto res = client.Post("/score", headers, body, "application/json");
        if (!res) {
            error = "transport error (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status != 200) {
            error = "status " + std::to_string(res->status);
            if (res->status >= 400 && res->status < 500) break;
            continue;
        }
        auto resp = nlohmann::json::parse(res->body, nullptr, false);
        if (resp.is_discarded() || !resp.contains("scores") ||
            resp["scores"].size() != 1)
            throw ProviderUnavailableError("scorer returned malformed body");
        return resp["scores"][0].get<double>();
    }
    throw ProviderUnavailableError("scorer unavailable: " + error);
}

Recommendation rerank(const CandidateSet& candidates, const Prompt& opp_prompt,
                      const ContentCatalog& catalog, const CrossScorer& scorer,
                      std::size_t n, std::size_t batch_size) {
    Recommendation rec;
    rec.opportunity_id = candidates.opportunity_id;
    rec.model_version = scorer.name();

    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(candidates.candidates.size());
    for (std::size_t start = 0; start < candidates.candidates.size();
         start += batch_size) {
        std::size_t end =
            std::min(start + batch_size, candidates.candidates.size());
        for (std::size_t i = start; i < end; ++i) {
            const auto& content_id = candidates.candidates[i].first;
            const ContentDoc* doc = catalog.find(content_id);
            if (!doc)
                throw NotFoundError("candidate not in catalog: " + content_id);
            scored.emplace_back(content_id,
                                scorer.score(opp_prompt, build_content_prompt(*doc)));
        }
    }
    // canonical order regardless of candidate input order
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > n) scored.resize(n);

    rec.items.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        const ContentDoc* doc = catalog.find(scored[i].first);
        rec.items.push_back({scored[i].first, scored[i].second,
                             static_cast<int>(i + 1), doc->customer_ready});
    }
    return rec;
}

std::uint64_t count_rerank_records(std::uint64_t n_opportunities,
                                   std::uint64_t k) {
    return n_opportunities * k;
}

}  // namespace contentrec
