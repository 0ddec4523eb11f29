#include "contentrec/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "contentrec/text.hpp"

namespace contentrec {

namespace {

using nlohmann::json;

std::optional<std::string> optional_normalized(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    std::string norm = normalize_field(it->get<std::string>());
    if (norm.empty()) return std::nullopt;
    return norm;
}

std::optional<std::string> optional_raw(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    std::string v = it->get<std::string>();
    if (normalize_field(v).empty()) return std::nullopt;
    return v;
}

std::string string_or(const json& j, const char* key, const char* fallback = "") {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<std::string>();
}

void emit_load_summary(const char* kind, const std::string& source,
                       const LoadStats& s, std::size_t kept) {
    json rec{{"event", "load_summary"},
             {"kind", kind},
             {"source", source},
             {"read", s.read},
             {"kept", kept},
             {"dropped_unpublished", s.dropped_unpublished},
             {"dropped_malformed", s.dropped_malformed},
             {"dropped_missing_id", s.dropped_missing_id}};
    std::cerr << rec.dump() << "\n";
}

}  // namespace

ContentCatalog load_content_catalog(std::istream& in, const std::string& source_uri) {
    ContentCatalog cat;
    cat.source_uri = source_uri;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++cat.stats.read;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            std::cerr << "malformed content record at line " << line_no << ", skipped\n";
            ++cat.stats.dropped_malformed;
            continue;
        }
        try {
            ContentDoc doc;
            doc.content_id = string_or(j, "contentid");
            if (doc.content_id.empty()) {
                ++cat.stats.dropped_missing_id;
                ++cat.stats.dropped_malformed;
                continue;
            }
            doc.name = string_or(j, "name");
            doc.description = string_or(j, "description");
            doc.solution_area = optional_normalized(j, "solutionarea");
            doc.product = optional_normalized(j, "product");
            doc.sales_stage = optional_normalized(j, "salesstage");
            doc.area = optional_normalized(j, "area");
            doc.customer_ready = j.value("customerready", false);
            doc.published = j.value("published", true);
            doc.last_modified = string_or(j, "lastmodified");
            if (!doc.published) {
                ++cat.stats.dropped_unpublished;
                continue;
            }
            if (cat.by_id.count(doc.content_id))
                throw DuplicateIdError(doc.content_id);
            cat.snapshot_time = std::max(cat.snapshot_time, doc.last_modified);
            cat.by_id.emplace(doc.content_id, cat.docs.size());
            cat.docs.push_back(std::move(doc));
        } catch (const DuplicateIdError&) {
            throw;
        } catch (const json::exception&) {
            std::cerr << "malformed content record at line " << line_no << ", skipped\n";
            ++cat.stats.dropped_malformed;
        }
    }
    emit_load_summary("contents", source_uri, cat.stats, cat.docs.size());
    return cat;
}

ContentCatalog load_content_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open content catalog: " + path);
    return load_content_catalog(in, path);
}

OpportunitySnapshot load_opportunity_snapshot(std::istream& in,
                                              const std::string& source_uri) {
    OpportunitySnapshot snap;
    snap.source_uri = source_uri;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++snap.stats.read;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            std::cerr << "malformed opportunity record at line " << line_no << ", skipped\n";
            ++snap.stats.dropped_malformed;
            continue;
        }
        try {
            Opportunity opp;
            opp.opportunity_id = string_or(j, "opportunityid");
            if (opp.opportunity_id.empty()) {
                ++snap.stats.dropped_missing_id;
                ++snap.stats.dropped_malformed;
                continue;
            }
            // open-status filter applies only when the source carries a status
            if (auto it = j.find("status"); it != j.end() && !it->is_null() &&
                normalize_field(it->get<std::string>()) != "open") {
                ++snap.stats.dropped_unpublished;
                continue;
            }
            opp.opportunity_name = string_or(j, "opportunityname");
            opp.sales_play = optional_raw(j, "salesplay");
            opp.sales_stage_name = optional_normalized(j, "salesstagename");
            opp.primary_product = optional_raw(j, "primaryproduct");
            opp.segment = optional_raw(j, "segment");
            opp.area_name = optional_normalized(j, "areaname");
            opp.solution_area = optional_normalized(j, "solutionarea");
            opp.snapshot_time = string_or(j, "snapshottime");
            static const std::unordered_map<std::string, int> known = {
                {"opportunityid", 0}, {"opportunityname", 0}, {"salesplay", 0},
                {"salesstagename", 0}, {"primaryproduct", 0}, {"segment", 0},
                {"areaname", 0}, {"solutionarea", 0}, {"snapshottime", 0},
                {"status", 0}};
            for (auto& [key, value] : j.items()) {
                if (!known.count(key) && value.is_string())
                    opp.extra.emplace(key, value.get<std::string>());
            }
            if (snap.by_id.count(opp.opportunity_id))
                throw DuplicateIdError(opp.opportunity_id);
            snap.snapshot_time = std::max(snap.snapshot_time, opp.snapshot_time);
            snap.by_id.emplace(opp.opportunity_id, snap.opportunities.size());
            snap.opportunities.push_back(std::move(opp));
        } catch (const DuplicateIdError&) {
            throw;
        } catch (const json::exception&) {
            std::cerr << "malformed opportunity record at line " << line_no << ", skipped\n";
            ++snap.stats.dropped_malformed;
        }
    }
    emit_load_summary("opportunities", source_uri, snap.stats,
                      snap.opportunities.size());
    return snap;
}

OpportunitySnapshot load_opportunity_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open opportunity snapshot: " + path);
    return load_opportunity_snapshot(in, path);
}

}  // namespace contentrec
