#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contentrec/catalog.hpp"

namespace contentrec {

/// Seeded synthetic-corpus configuration. Scale ratios default to the
/// production shape: ~17.5% of the catalog survives the hard filters and
/// ~1.4% of opportunities mutate per simulated day.
struct SynthConfig {
    std::uint64_t seed = 42;
    std::size_t n_contents = 2000;
    std::size_t n_opportunities = 300;
    double target_pass_rate = 0.175;  // in (0, 1]
    double delta_fraction = 0.014;    // per simulated day

    std::vector<std::string> sales_plays;
    std::vector<std::string> solution_areas;
    std::vector<std::string> products;
    std::vector<std::string> areas;
    std::vector<std::string> sales_stages;

    /// Fills empty vocabularies with the built-in realistic defaults and
    /// validates ranges. Throws InvalidConfigError.
    void finalize();
};

struct SynthOutput {
    std::vector<ContentDoc> contents;
    std::vector<Opportunity> opportunities;
    /// Analytical mean filter pass-rate implied by the generator's
    /// wildcard and vocabulary choices.
    double expected_pass_rate = 0;
};

/// Deterministic for a fixed seed: same config twice yields byte-identical
/// files. Content descriptions embed sales-play vocabulary so that
/// removing "sales play" from the opportunity prompt measurably lowers
/// reference-scorer overlap.
SynthOutput generate(const SynthConfig& config);

/// Writes contents.jsonl / opportunities.jsonl plus an expected-stats
/// record (synth_stats.json) into `out_dir`.
void write_corpus(const SynthOutput& out, const std::string& out_dir);

struct DayMutation {
    std::vector<Opportunity> snapshot;
    /// Exact ids a correct delta detector must flag for this day.
    std::vector<std::string> ground_truth_delta;
};

/// Applies the configured delta fraction of critical-field edits for the
/// given day and returns the new snapshot with its oracle delta list.
/// Non-critical edits (synthetic note fields) are applied to a disjoint
/// set of opportunities and excluded from the ground truth.
DayMutation mutate_day(const std::vector<Opportunity>& opportunities,
                       const SynthConfig& config, std::uint32_t day);

std::string content_to_json(const ContentDoc& doc);
std::string opportunity_to_json(const Opportunity& opp);

}  // namespace contentrec
