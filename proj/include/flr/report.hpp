#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flr/case_file.hpp"
#include "flr/likelihood_engine.hpp"
#include "flr/population_mixture.hpp"

namespace flr {

struct PopulationResult {
    std::string group;
    std::optional<double> weight;  // census proportion when the group is listed
    double frequency;              // profile frequency at the case theta
    double lr;                     // single-test likelihood ratio, 1/frequency
};

// Closed-set analysis of the outcome.<id> individuals.
struct ClosedSetResult {
    int others = 0;
    int matched = 0;
    int excluded = 0;
    int untested = 0;
    double coincidence_frequency = 0.0;  // f assigned to each non-suspect
    double p_evidence_given_suspect = 0.0;
    std::optional<LikelihoodRatio> composite_lr;  // uniform weights over the others
    bool all_alternatives_excluded = false;
};

// Every numeric field is stored unrounded; the text rendering displays 3
// significant figures and the structured rendering round-trips full doubles.
struct MatchReport {
    bool excluded = false;
    std::vector<std::string> mismatched_loci;
    std::vector<std::string> loci;
    double theta = 0.0;

    std::vector<PopulationResult> populations;

    std::optional<double> race_blind_frequency;  // theta = 0.03 on pooled alleles
    double race_blind_theta = 0.03;

    double covered_weight = 0.0;
    double uncovered_weight = 0.0;
    std::optional<double> weighted_frequency;     // full partition only
    std::vector<SensitivityRow> sensitivity;      // incomplete partition only
    double sensitivity_reference = 0.0;

    std::optional<double> bound_lower;  // min f_j over groups
    std::optional<double> bound_upper;  // max f_j over groups
    std::optional<double> most_conservative_frequency;
    std::optional<double> sib_bound;      // largest per-group sib bound
    std::optional<double> ceiling_bound;
    double ceiling_floor = 0.05;

    std::optional<ClosedSetResult> closed_set;

    std::vector<std::string> notes;
};

// Runs every computation for a case. Profiles that mismatch at any locus
// produce an exclusion report carrying no frequency statistics.
MatchReport run_case(const CaseFile& c);

enum class ReportFormat { text, structured };

ReportFormat parse_format(std::string_view name);  // throws ValidationError on unknown names

// Text: fixed section order Match, Per-population, General-population,
// Bounds, Sensitivity, Notes. Structured: deterministic `key = value` lines
// whose doubles round-trip exactly; undefined ratios render as the literal
// token "undefined".
std::string emit_report(const MatchReport& r, ReportFormat format);

// Parses the structured rendering back into a flat key -> value map.
std::map<std::string, std::string> parse_structured_report(std::string_view text);

// Runs a simulation job and renders its deterministic text output.
std::string run_sim_job(const SimJob& job, std::uint64_t seed);

}  // namespace flr
