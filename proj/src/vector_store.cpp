#include "contentrec/vector_store.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "contentrec/prompt.hpp"
#include "contentrec/text.hpp"

namespace contentrec {

namespace {

constexpr char kMagic[8] = {'C', 'R', 'E', 'M', 'B', 'S', 'T', 'R'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>((std::uint64_t(value) >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t(buf[i]) << (8 * i);
    return static_cast<T>(v);
}

void write_string(std::ostream& out, const std::string& s) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    auto len = read_le<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

void write_f32(std::ostream& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    write_le<std::uint32_t>(out, bits);
}

float read_f32(std::istream& in) {
    auto bits = read_le<std::uint32_t>(in);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return f;
}

}  // namespace

void EmbeddingStore::save(const std::string& path) const {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write embedding store: " + tmp);
        out.write(kMagic, sizeof kMagic);
        write_le<std::uint32_t>(out, kFormatVersion);
        write_le<std::uint32_t>(out, dimension);
        write_le<std::uint64_t>(out, entries.size());
        write_le<std::uint64_t>(out, version);
        write_string(out, built_at);
        for (const auto& [id, entry] : entries) {
            write_string(out, id);
            write_le<std::uint64_t>(out, entry.prompt_hash);
        }
        for (const auto& [id, entry] : entries)
            for (float f : entry.vec) write_f32(out, f);
        if (!out) throw StorageError("short write to embedding store: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

EmbeddingStore EmbeddingStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot open embedding store: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw StorageError("not an embedding store file: " + path);
    auto format = read_le<std::uint32_t>(in);
    if (format != kFormatVersion)
        throw StorageError("unsupported store format version " + std::to_string(format));
    EmbeddingStore store;
    store.dimension = read_le<std::uint32_t>(in);
    auto count = read_le<std::uint64_t>(in);
    store.version = read_le<std::uint64_t>(in);
    store.built_at = read_string(in);
    std::vector<std::string> ids(count);
    std::vector<std::uint64_t> hashes(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        ids[i] = read_string(in);
        hashes[i] = read_le<std::uint64_t>(in);
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        StoreEntry entry;
        entry.prompt_hash = hashes[i];
        entry.vec.resize(store.dimension);
        for (auto& f : entry.vec) f = read_f32(in);
        store.entries.emplace(std::move(ids[i]), std::move(entry));
    }
    if (!in) throw StorageError("truncated embedding store: " + path);
    return store;
}

VectorStore::VectorStore(std::size_t dimension)
    : current_(std::make_shared<EmbeddingStore>()) {
    auto init = std::make_shared<EmbeddingStore>();
    init->dimension = static_cast<std::uint32_t>(dimension);
    current_ = init;
}

VectorStore::VectorStore(EmbeddingStore initial)
    : current_(std::make_shared<EmbeddingStore>(std::move(initial))) {}

RefreshStats VectorStore::refresh_contents(const ContentCatalog& catalog,
                                           const EmbeddingProvider& provider) {
    auto base = snapshot();
    if (base->dimension != provider.dimension())
        throw DimensionMismatchError(base->dimension, provider.dimension());

    RefreshStats stats;
    std::vector<Prompt> to_embed;
    std::map<std::string, StoreEntry> next;
    for (const ContentDoc& doc : catalog.docs) {
        Prompt p;
        try {
            p = build_content_prompt(doc);
        } catch (const EmptyPromptError&) {
            continue;  // nothing renderable, not embeddable
        }
        auto it = base->entries.find(doc.content_id);
        if (it != base->entries.end() && it->second.prompt_hash == p.prompt_hash) {
            next.emplace(doc.content_id, it->second);
            ++stats.unchanged;
        } else {
            it == base->entries.end() ? ++stats.added : ++stats.changed;
            to_embed.push_back(std::move(p));
        }
    }
    stats.removed = base->entries.size() - stats.unchanged - stats.changed;

    // may throw ProviderUnavailable; the current snapshot stays intact
    auto vectors = provider.embed_batch(to_embed);
    for (auto& v : vectors)
        next[v.key] = StoreEntry{v.prompt_hash, std::move(v.values)};

    if (stats.mutated()) {
        auto fresh = std::make_shared<EmbeddingStore>();
        fresh->dimension = base->dimension;
        fresh->version = base->version + 1;
        fresh->built_at = catalog.snapshot_time;
        fresh->entries = std::move(next);
        std::lock_guard lock(mu_);
        current_ = std::move(fresh);
    }
    return stats;
}

std::shared_ptr<const EmbeddingStore> VectorStore::snapshot() const {
    std::lock_guard lock(mu_);
    return current_;
}

}  // namespace contentrec
