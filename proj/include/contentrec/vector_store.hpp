#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "contentrec/catalog.hpp"
#include "contentrec/embedding.hpp"

namespace contentrec {

struct StoreEntry {
    std::uint64_t prompt_hash = 0;
    std::vector<float> vec;

    bool operator==(const StoreEntry&) const = default;
};

/// One immutable version of the content embedding set. Readers hold a
/// snapshot for the duration of a batch run; refresh never mutates a
/// published snapshot in place.
struct EmbeddingStore {
    std::uint32_t dimension = 0;
    std::uint64_t version = 0;
    std::string built_at;  // ISO-8601 UTC
    std::map<std::string, StoreEntry> entries;  // content_id -> entry

    bool operator==(const EmbeddingStore&) const = default;

    /// Binary layout: magic, format version, dimension, count, store
    /// version, built_at; id table (length-prefixed UTF-8 ids + prompt
    /// hashes); count x dimension little-endian f32. Written to a temp
    /// file and renamed into place.
    void save(const std::string& path) const;
    static EmbeddingStore load(const std::string& path);
};

struct RefreshStats {
    std::size_t added = 0;
    std::size_t changed = 0;
    std::size_t unchanged = 0;
    std::size_t removed = 0;

    bool mutated() const { return added + changed + removed > 0; }
};

/// Single writer, many concurrent snapshot readers.
class VectorStore {
  public:
    explicit VectorStore(std::size_t dimension);
    explicit VectorStore(EmbeddingStore initial);

    /// Re-embeds only documents whose content-prompt hash is new or
    /// changed, drops entries absent from the catalog, and publishes a
    /// new version iff anything mutated. On provider failure the current
    /// snapshot is left untouched.
    RefreshStats refresh_contents(const ContentCatalog& catalog,
                                  const EmbeddingProvider& provider);

    std::shared_ptr<const EmbeddingStore> snapshot() const;

  private:
    mutable std::mutex mu_;
    std::shared_ptr<const EmbeddingStore> current_;
};

}  // namespace contentrec
