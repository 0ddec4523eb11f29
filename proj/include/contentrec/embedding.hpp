#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "contentrec/prompt.hpp"

namespace contentrec {

/// Fixed-dimension, L2-normalized embedding keyed by record id and the
/// hash of the embedded prompt.
struct EmbeddingVector {
    std::vector<float> values;
    std::string key;
    std::uint64_t prompt_hash = 0;
};

/// Stage-1 bi-encoder contract. Implementations are stateless after
/// construction and safe to call from many workers concurrently.
class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;
    /// One unit-norm vector per prompt, order preserving.
    virtual std::vector<EmbeddingVector> embed_batch(
        std::span<const Prompt> prompts) const = 0;
};

/// Deterministic reference provider: signed feature hashing of word
/// unigrams and bigrams of the lowercased prompt into `dim` buckets,
/// then L2 normalization. Same text always yields the same vector.
class HashingEmbedder final : public EmbeddingProvider {
  public:
    explicit HashingEmbedder(std::size_t dim = 384) : dim_(dim) {}
    std::size_t dimension() const override { return dim_; }
    std::string name() const override;
    std::vector<EmbeddingVector> embed_batch(
        std::span<const Prompt> prompts) const override;

  private:
    std::size_t dim_;
};

/// Batched text-in/vectors-out call against an external HTTP endpoint.
/// POST {"texts": [...]} -> {"vectors": [[...], ...]}; bounded retry.
class HttpEmbedder final : public EmbeddingProvider {
  public:
    HttpEmbedder(std::string endpoint, std::size_t dim, int timeout_ms = 10000,
                 int max_retries = 2, std::string api_key = {});
    std::size_t dimension() const override { return dim_; }
    std::string name() const override;
    std::vector<EmbeddingVector> embed_batch(
        std::span<const Prompt> prompts) const override;

  private:
    std::string endpoint_;
    std::size_t dim_;
    int timeout_ms_;
    int max_retries_;
    std::string api_key_;
};

double cosine(std::span<const float> u, std::span<const float> v);
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

}  // namespace contentrec
