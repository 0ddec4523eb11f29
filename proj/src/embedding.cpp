#include "contentrec/embedding.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "contentrec/errors.hpp"
#include "contentrec/text.hpp"

namespace contentrec {

namespace {

void accumulate(std::vector<float>& acc, std::string_view feature) {
    std::uint64_t h = fnv1a64(feature);
    std::size_t idx = h % acc.size();
    float sign = (h >> 63) ? -1.0f : 1.0f;
    acc[idx] += sign;
}

void l2_normalize(std::vector<float>& v, const std::string& key) {
    double sq = 0;
    for (float x : v) sq += double(x) * x;
    if (sq == 0) throw EmptyPromptError(key);
    float inv = static_cast<float>(1.0 / std::sqrt(sq));
    for (float& x : v) x *= inv;
}

}  // namespace

std::string HashingEmbedder::name() const {
    return "hashing-embedder-v1-d" + std::to_string(dim_);
}

std::vector<EmbeddingVector> HashingEmbedder::embed_batch(
    std::span<const Prompt> prompts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(prompts.size());
    for (const Prompt& p : prompts) {
        if (p.text.empty()) throw EmptyPromptError(p.source_id);
        std::vector<float> acc(dim_, 0.0f);
        auto tokens = tokenize(p.text);
        for (const auto& t : tokens) accumulate(acc, "u:" + t);
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
            accumulate(acc, "b:" + tokens[i] + " " + tokens[i + 1]);
        l2_normalize(acc, p.source_id);
        out.push_back({std::move(acc), p.source_id, p.prompt_hash});
    }
    return out;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::size_t dim, int timeout_ms,
                           int max_retries, std::string api_key)
    : endpoint_(std::move(endpoint)),
      dim_(dim),
      timeout_ms_(timeout_ms),
      max_retries_(max_retries),
      api_key_(std::move(api_key)) {}

std::string HttpEmbedder::name() const { return "http-embedder:" + endpoint_; }

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(
    std::span<const Prompt> prompts) const {
    nlohmann::json req;
    auto& texts = req["texts"] = nlohmann::json::array();
    for (const Prompt& p : prompts) {
        if (p.text.empty()) throw EmptyPromptError(p.source_id);
        texts.push_back(p.text);
    }
    std::string body = req.dump();

    httplib::Client client(endpoint_);
    client.set_connection_timeout(0, timeout_ms_ * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(50 << attempt));
        auto res = client.Post("/embed", headers, body, "application/json");
        if (!res) {
            error = "transport error (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status != 200) {
            error = "status " + std::to_string(res->status);
            if (res->status >= 400 && res->status < 500) break;  // not retriable
            continue;
        }
        auto resp = nlohmann::json::parse(res->body, nullptr, false);
        if (resp.is_discarded() || !resp.contains("vectors"))
            throw ProviderUnavailableError("embedder returned malformed body");
        const auto& vectors = resp["vectors"];
        if (vectors.size() != prompts.size())
            throw ProviderUnavailableError("embedder returned wrong vector count");
        std::vector<EmbeddingVector> out;
        out.reserve(prompts.size());
        for (std::size_t i = 0; i < prompts.size(); ++i) {
            std::vector<float> v = vectors[i].get<std::vector<float>>();
            if (v.size() != dim_)
                throw DimensionMismatchError(v.size(), dim_);
            l2_normalize(v, prompts[i].source_id);
            out.push_back({std::move(v), prompts[i].source_id, prompts[i].prompt_hash});
        }
        return out;
    }
    throw ProviderUnavailableError("embedder unavailable: " + error);
}

double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size()) throw DimensionMismatchError(u.size(), v.size());
    double dot = 0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += double(u[i]) * v[i];
    return dot;
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    return cosine(std::span<const float>(u.values), std::span<const float>(v.values));
}

}  // namespace contentrec
