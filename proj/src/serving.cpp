#include "contentrec/serving.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <httplib.h>
#include <json.hpp>

namespace contentrec {

namespace {

using nlohmann::json;

void validate(const Recommendation& rec) {
    if (rec.opportunity_id.empty())
        throw InvalidRecommendationError("empty opportunity id");
    for (std::size_t i = 0; i < rec.items.size(); ++i) {
        const auto& item = rec.items[i];
        if (item.rank != static_cast<int>(i + 1))
            throw InvalidRecommendationError(
                "non-contiguous ranks for " + rec.opportunity_id);
        if (item.content_id.empty())
            throw InvalidRecommendationError("empty content id");
        if (i > 0) {
            const auto& prev = rec.items[i - 1];
            bool ordered = prev.cross_score > item.cross_score ||
                           (prev.cross_score == item.cross_score &&
                            prev.content_id < item.content_id);
            if (!ordered)
                throw InvalidRecommendationError(
                    "items out of order for " + rec.opportunity_id);
        }
    }
}

}  // namespace

std::string recommendation_to_json(const Recommendation& rec) {
    json items = json::array();
    for (const auto& item : rec.items) {
        items.push_back({{"contentid", item.content_id},
                         {"score", item.cross_score},
                         {"rank", item.rank},
                         {"customer_ready", item.customer_ready}});
    }
    json j{{"opportunityid", rec.opportunity_id},
           {"generated_at", rec.generated_at},
           {"model_version", rec.model_version},
           {"items", std::move(items)}};
    return j.dump();
}

Recommendation recommendation_from_json(const std::string& line) {
    json j = json::parse(line);
    Recommendation rec;
    rec.opportunity_id = j.at("opportunityid").get<std::string>();
    rec.generated_at = j.value("generated_at", "");
    rec.model_version = j.value("model_version", "");
    for (const auto& item : j.at("items")) {
        rec.items.push_back({item.at("contentid").get<std::string>(),
                             item.at("score").get<double>(),
                             item.at("rank").get<int>(),
                             item.value("customer_ready", false)});
    }
    return rec;
}

RecommendationStore::RecommendationStore(std::string path)
    : path_(std::move(path)) {
    load();
}

void RecommendationStore::load() {
    std::ifstream in(path_);
    if (!in) return;  // fresh store
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Recommendation rec = recommendation_from_json(line);
        live_[rec.opportunity_id] = std::move(rec);  // latest wins
    }
}

void RecommendationStore::upsert(const Recommendation& rec) {
    validate(rec);
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::app);
    if (!out) throw StorageError("cannot append to " + path_);
    out << recommendation_to_json(rec) << "\n";
    out.flush();
    if (!out) throw StorageError("short write to " + path_);
    live_[rec.opportunity_id] = rec;
}

Recommendation RecommendationStore::get(const std::string& opportunity_id) const {
    std::lock_guard lock(mu_);
    auto it = live_.find(opportunity_id);
    if (it == live_.end())
        throw NotFoundError("no recommendation for " + opportunity_id);
    return it->second;
}

bool RecommendationStore::contains(const std::string& opportunity_id) const {
    std::lock_guard lock(mu_);
    return live_.count(opportunity_id) > 0;
}

std::size_t RecommendationStore::size() const {
    std::lock_guard lock(mu_);
    return live_.size();
}

std::vector<std::string> RecommendationStore::ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    out.reserve(live_.size());
    for (const auto& [id, rec] : live_) out.push_back(id);
    return out;
}

void RecommendationStore::compact() {
    std::lock_guard lock(mu_);
    std::string tmp = path_ + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw StorageError("cannot write " + tmp);
        for (const auto& [id, rec] : live_)
            out << recommendation_to_json(rec) << "\n";
        if (!out) throw StorageError("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path_);
}

FeedbackStore::FeedbackStore(std::string path, const RecommendationStore& recs)
    : path_(std::move(path)), recs_(recs) {
    std::ifstream in(path_);
    std::string line;
    while (in && std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        records_.push_back({j.at("opportunityid").get<std::string>(),
                            j.at("contentid").get<std::string>(),
                            j.at("verdict").get<std::string>(),
                            j.value("free_text", ""),
                            j.value("submitted_at", "")});
    }
}

void FeedbackStore::record(const FeedbackRecord& fb) {
    if (fb.verdict != "useful" && fb.verdict != "not-useful")
        throw InvalidRecommendationError("verdict must be useful|not-useful");
    bool known = false;
    if (recs_.contains(fb.opportunity_id)) {
        for (const auto& item : recs_.get(fb.opportunity_id).items)
            known = known || item.content_id == fb.content_id;
    }
    if (!known)
        throw UnknownReferenceError("feedback references unrecommended pair " +
                                    fb.opportunity_id + "/" + fb.content_id);
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::app);
    if (!out) throw StorageError("cannot append to " + path_);
    json j{{"opportunityid", fb.opportunity_id},
           {"contentid", fb.content_id},
           {"verdict", fb.verdict},
           {"free_text", fb.free_text},
           {"submitted_at", fb.submitted_at}};
    out << j.dump() << "\n";
    records_.push_back(fb);
}

std::vector<FeedbackRecord> FeedbackStore::all() const {
    std::lock_guard lock(mu_);
    return records_;
}

int serve(RecommendationStore& recs, FeedbackStore& feedback,
          const std::string& address, int port) {
    httplib::Server server;

    server.Get(R"(/recommendations/(.+))",
               [&](const httplib::Request& req, httplib::Response& res) {
                   try {
                       auto rec = recs.get(req.matches[1]);
                       res.set_content(recommendation_to_json(rec),
                                       "application/json");
                   } catch (const NotFoundError& e) {
                       res.status = 404;
                       res.set_content(json{{"error", e.what()}}.dump(),
                                       "application/json");
                   }
               });

    server.Post("/feedback", [&](const httplib::Request& req,
                                 httplib::Response& res) {
        try {
            json j = json::parse(req.body);
            FeedbackRecord fb{j.at("opportunityid").get<std::string>(),
                              j.at("contentid").get<std::string>(),
                              j.at("verdict").get<std::string>(),
                              j.value("free_text", ""),
                              j.value("submitted_at", "")};
            feedback.record(fb);
            res.set_content(json{{"status", "recorded"}}.dump(),
                            "application/json");
        } catch (const UnknownReferenceError& e) {
            res.status = 404;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    });

    std::cerr << "serving on " << address << ":" << port << "\n";
    return server.listen(address, port) ? 0 : 1;
}

}  // namespace contentrec
