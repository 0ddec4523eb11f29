#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "contentrec/errors.hpp"

namespace contentrec {

/// Metadata record for one catalog document. Filterable fields
/// (solution_area, product, sales_stage, area) are stored normalized;
/// name and description keep their original casing for prompt rendering.
struct ContentDoc {
    std::string content_id;
    std::string name;
    std::string description;
    std::optional<std::string> solution_area;
    std::optional<std::string> product;
    std::optional<std::string> sales_stage;
    std::optional<std::string> area;
    bool customer_ready = false;
    bool published = true;
    std::string last_modified;  // ISO-8601 UTC

    bool operator==(const ContentDoc&) const = default;
};

/// Metadata record for one sales opportunity: the seven critical
/// properties plus solution_area for filtering. sales_stage_name,
/// area_name and solution_area are stored normalized.
struct Opportunity {
    std::string opportunity_id;
    std::string opportunity_name;
    std::optional<std::string> sales_play;
    std::optional<std::string> sales_stage_name;
    std::optional<std::string> primary_product;
    std::optional<std::string> segment;
    std::optional<std::string> area_name;
    std::optional<std::string> solution_area;
    std::string snapshot_time;  // ISO-8601 UTC
    /// Unknown string fields from the source record, retained verbatim.
    std::map<std::string, std::string> extra;

    bool operator==(const Opportunity&) const = default;
};

struct LoadStats {
    std::size_t read = 0;
    std::size_t dropped_unpublished = 0;  // or closed, for opportunities
    std::size_t dropped_malformed = 0;
    std::size_t dropped_missing_id = 0;
};

struct ContentCatalog {
    std::vector<ContentDoc> docs;
    std::unordered_map<std::string, std::size_t> by_id;
    std::string snapshot_time;
    std::string source_uri;
    LoadStats stats;

    const ContentDoc* find(const std::string& id) const {
        auto it = by_id.find(id);
        return it == by_id.end() ? nullptr : &docs[it->second];
    }
};

struct OpportunitySnapshot {
    std::vector<Opportunity> opportunities;
    std::unordered_map<std::string, std::size_t> by_id;
    std::string snapshot_time;
    std::string source_uri;
    LoadStats stats;

    const Opportunity* find(const std::string& id) const {
        auto it = by_id.find(id);
        return it == by_id.end() ? nullptr : &opportunities[it->second];
    }
};

/// Loads contents.jsonl. Keeps only published documents; drops and counts
/// malformed lines and records without a content_id. Duplicate ids are fatal.
ContentCatalog load_content_catalog(std::istream& in, const std::string& source_uri);
ContentCatalog load_content_catalog(const std::string& path);

/// Loads opportunities.jsonl. When a `status` field is present, only open
/// opportunities are retained. Same error contract as the content loader.
OpportunitySnapshot load_opportunity_snapshot(std::istream& in, const std::string& source_uri);
OpportunitySnapshot load_opportunity_snapshot(const std::string& path);

}  // namespace contentrec
