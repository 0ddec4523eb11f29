#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "contentrec/embedding.hpp"
#include "contentrec/rerank.hpp"

namespace contentrec {

/// Run configuration, loaded from a JSON file. Unset fields keep the
/// defaults below. The external-provider API key can be overridden with
/// the CONTENTREC_API_KEY environment variable.
struct RunConfig {
    // data paths
    std::string contents_path = "contents.jsonl";
    std::string opportunities_path = "opportunities.jsonl";
    std::string store_path = "embeddings.bin";
    std::string watermark_path = "watermark.json";
    std::string recommendations_path = "recommendations.jsonl";
    std::string feedback_path = "feedback.jsonl";

    // embedding provider
    std::string provider = "hashing";  // hashing | http
    std::size_t dimension = 384;
    std::string endpoint;
    int timeout_ms = 10000;
    int max_retries = 2;

    // scoring
    std::string scorer = "jaccard";  // jaccard | http
    std::string scorer_endpoint;
    std::size_t batch_size = 64;

    // pipeline
    std::size_t workers = 1;
    std::size_t top_k = 50;
    std::size_t top_n = 5;
    int retry_limit = 2;  // per failed item
    std::string prompt_group = "A";

    // serving
    std::string bind_address = "127.0.0.1";
    int bind_port = 8080;

    static RunConfig from_file(const std::string& path);

    std::unique_ptr<EmbeddingProvider> make_provider() const;
    std::unique_ptr<CrossScorer> make_scorer() const;
};

}  // namespace contentrec
