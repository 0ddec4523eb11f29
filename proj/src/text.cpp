#include "contentrec/text.hpp"

#include <cctype>

namespace contentrec {

std::string normalize_field(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isspace(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::unordered_set<std::string> token_set(std::string_view text) {
    auto tokens = tokenize(text);
    return {tokens.begin(), tokens.end()};
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_tuple(const std::vector<std::string>& fields) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& f : fields) {
        // fixed-width length prefix keeps field boundaries unambiguous
        std::uint64_t len = f.size();
        for (int i = 0; i < 8; ++i) {
            h ^= static_cast<unsigned char>((len >> (8 * i)) & 0xff);
            h *= 0x100000001b3ULL;
        }
        for (unsigned char c : f) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace contentrec
