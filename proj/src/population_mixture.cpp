#include "flr/population_mixture.hpp"

#include <algorithm>
#include <cmath>

namespace flr {

namespace {

constexpr double kPartitionTolerance = 1e-9;
constexpr double kCensusSlack = 1e-3;  // census tables round to one decimal

void check_groups(const GroupFrequencySet& groups) {
    for (const auto& g : groups) {
        if (g.weight < 0.0 || g.weight > 1.0) {
            throw ValidationError("weight for group '" + g.group + "' outside [0,1]");
        }
        if (!(g.frequency > 0.0) || g.frequency > 1.0) {
            throw ValidationError("frequency for group '" + g.group + "' outside (0,1]");
        }
    }
}

double weight_sum(const GroupFrequencySet& groups) {
    double sum = 0.0;
    for (const auto& g : groups) sum += g.weight;
    return sum;
}

}  // namespace

GenotypeFrequency weighted_frequency(const GroupFrequencySet& groups) {
    if (groups.empty()) throw ValidationError("no population groups given");
    check_groups(groups);
    const double sum = weight_sum(groups);
    if (std::abs(sum - 1.0) > kPartitionTolerance) {
        throw ValidationError("weights sum to " + std::to_string(sum) +
                              "; partition incomplete (use sensitivity_table)");
    }
    double f = 0.0;
    for (const auto& g : groups) f += g.weight * g.frequency;
    return {f, FreqModel::weighted, 0.0};
}

std::pair<double, double> frequency_bounds(const GroupFrequencySet& groups) {
    if (groups.empty()) throw ValidationError("no population groups given");
    check_groups(groups);
    const double sum = weight_sum(groups);
    if (std::abs(sum - 1.0) > kPartitionTolerance) {
        throw ValidationError("bounds require a full partition");
    }
    double lo = groups.front().frequency;
    double hi = groups.front().frequency;
    for (const auto& g : groups) {
        if (!(g.weight > 0.0)) {
            throw ValidationError("bounds require positive weights (group '" + g.group + "')");
        }
        lo = std::min(lo, g.frequency);
        hi = std::max(hi, g.frequency);
    }
    return {lo, hi};
}

std::vector<SensitivityRow> sensitivity_table(const GroupFrequencySet& covered,
                                              double uncovered_weight,
                                              double reference,
                                              const std::vector<double>& multipliers) {
    check_groups(covered);
    if (uncovered_weight < 0.0 || uncovered_weight > 1.0) {
        throw ValidationError("uncovered weight outside [0,1]");
    }
    if (!(reference > 0.0) || reference > 1.0) {
        throw ValidationError("reference frequency outside (0,1]");
    }
    const double total_mass = weight_sum(covered) + uncovered_weight;
    if (std::abs(total_mass - 1.0) > kCensusSlack) {
        throw ValidationError("covered weights plus uncovered mass must reach 1 within 1e-3");
    }

    double covered_sum = 0.0;
    for (const auto& g : covered) covered_sum += g.weight * g.frequency;

    // One slope keeps total(k) = covered_sum + slope*k an exact identity.
    const double slope = uncovered_weight * reference;

    std::vector<SensitivityRow> rows;
    rows.reserve(multipliers.size());
    for (double k : multipliers) {
        if (!(k > 0.0)) throw ValidationError("sensitivity multipliers must be positive");
        SensitivityRow row;
        row.multiplier = k;
        row.hypothetical_frequency = reference * k;
        row.contribution = slope * k;
        row.total = covered_sum + row.contribution;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace flr
