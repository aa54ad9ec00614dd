#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flr/errors.hpp"
#include "flr/match_stats.hpp"

namespace flr {

// A population group's share of the total population together with the
// profile frequency inside that group.
struct GroupFrequency {
    std::string group;
    double weight;     // p_j in [0,1]
    double frequency;  // f_j in (0,1]
};

using GroupFrequencySet = std::vector<GroupFrequency>;

// General-population frequency f = sum of p_j * f_j over a full partition
// (weights must sum to 1 within 1e-9; otherwise use sensitivity_table).
GenotypeFrequency weighted_frequency(const GroupFrequencySet& groups);

// (smallest f_j, largest f_j). For a full partition with positive weights the
// weighted frequency always lies inside this interval.
std::pair<double, double> frequency_bounds(const GroupFrequencySet& groups);

// One row of a what-if table for the population mass not covered by any group
// with a known frequency. total = covered contribution + this row's
// contribution, exactly.
struct SensitivityRow {
    double multiplier;              // k
    double hypothetical_frequency;  // k * reference
    double contribution;            // uncovered_weight * k * reference
    double total;                   // covered sum + contribution
};

// For each multiplier k, assumes the uncovered population mass carries
// frequency k * reference and tabulates the resulting general-population
// frequency. Covered weights plus uncovered_weight must reach 1 within 1e-3
// (census tables round); multipliers must be positive. Totals are affine in
// k: total(k) = covered sum + (uncovered_weight * reference) * k.
std::vector<SensitivityRow> sensitivity_table(const GroupFrequencySet& covered,
                                              double uncovered_weight,
                                              double reference,
                                              const std::vector<double>& multipliers);

}  // namespace flr
