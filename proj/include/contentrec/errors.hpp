#pragma once

#include <stdexcept>
#include <string>

namespace contentrec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateIdError : Error {
    explicit DuplicateIdError(const std::string& id)
        : Error("duplicate record id: " + id) {}
};

struct EmptyPromptError : Error {
    explicit EmptyPromptError(const std::string& id)
        : Error("no renderable fields for record: " + id) {}
};

struct DimensionMismatchError : Error {
    DimensionMismatchError(std::size_t a, std::size_t b)
        : Error("vector dimension mismatch: " + std::to_string(a) + " vs " +
                std::to_string(b)) {}
};

struct ProviderUnavailableError : Error {
    using Error::Error;
};

struct UnknownGroupError : Error {
    explicit UnknownGroupError(const std::string& label)
        : Error("unknown feature group: " + label) {}
};

struct StorageError : Error {
    using Error::Error;
};

struct NotFoundError : Error {
    using Error::Error;
};

struct InvalidRecommendationError : Error {
    using Error::Error;
};

struct UnknownReferenceError : Error {
    using Error::Error;
};

struct DegenerateSeriesError : Error {
    using Error::Error;
};

struct LengthMismatchError : Error {
    using Error::Error;
};

struct WrongDocCountError : Error {
    explicit WrongDocCountError(std::size_t n)
        : Error("judge prompt requires exactly 5 documents, got " +
                std::to_string(n)) {}
};

struct UnparseableResponseError : Error {
    using Error::Error;
};

struct InvalidConfigError : Error {
    using Error::Error;
};

}  // namespace contentrec
