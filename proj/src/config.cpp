#include "contentrec/config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "contentrec/errors.hpp"

namespace contentrec {

namespace {

std::string api_key_from_env() {
    const char* key = std::getenv("CONTENTREC_API_KEY");
    return key ? key : "";
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfigError("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw InvalidConfigError("config file is not a JSON object: " + path);

    RunConfig c;
    c.contents_path = j.value("contents_path", c.contents_path);
    c.opportunities_path = j.value("opportunities_path", c.opportunities_path);
    c.store_path = j.value("store_path", c.store_path);
    c.watermark_path = j.value("watermark_path", c.watermark_path);
    c.recommendations_path = j.value("recommendations_path", c.recommendations_path);
    c.feedback_path = j.value("feedback_path", c.feedback_path);
    c.provider = j.value("provider", c.provider);
    c.dimension = j.value("dimension", c.dimension);
    c.endpoint = j.value("endpoint", c.endpoint);
    c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.scorer = j.value("scorer", c.scorer);
    c.scorer_endpoint = j.value("scorer_endpoint", c.scorer_endpoint);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.workers = j.value("workers", c.workers);
    c.top_k = j.value("top_k", c.top_k);
    c.top_n = j.value("top_n", c.top_n);
    c.retry_limit = j.value("retry_limit", c.retry_limit);
    c.prompt_group = j.value("prompt_group", c.prompt_group);
    c.bind_address = j.value("bind_address", c.bind_address);
    c.bind_port = j.value("bind_port", c.bind_port);

    if (c.dimension == 0) throw InvalidConfigError("dimension must be > 0");
    if (c.top_n > c.top_k)
        throw InvalidConfigError("top_n must not exceed top_k");
    if (c.provider != "hashing" && c.provider != "http")
        throw InvalidConfigError("provider must be hashing|http");
    if (c.provider == "http" && c.endpoint.empty())
        throw InvalidConfigError("http provider requires an endpoint");
    if (c.scorer != "jaccard" && c.scorer != "http")
        throw InvalidConfigError("scorer must be jaccard|http");
    if (c.scorer == "http" && c.scorer_endpoint.empty())
        throw InvalidConfigError("http scorer requires scorer_endpoint");
    return c;
}

std::unique_ptr<EmbeddingProvider> RunConfig::make_provider() const {
    if (provider == "http")
        return std::make_unique<HttpEmbedder>(endpoint, dimension, timeout_ms,
                                              max_retries, api_key_from_env());
    return std::make_unique<HashingEmbedder>(dimension);
}

std::unique_ptr<CrossScorer> RunConfig::make_scorer() const {
    if (scorer == "http")
        return std::make_unique<HttpCrossScorer>(scorer_endpoint, timeout_ms,
                                                 max_retries, api_key_from_env());
    return std::make_unique<JaccardScorer>();
}

}  // namespace contentrec
