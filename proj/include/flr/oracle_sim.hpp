#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flr/errors.hpp"
#include "flr/match_stats.hpp"
#include "flr/population_db.hpp"

namespace flr {

// Deterministic pseudo-random stream: std::mt19937_64 (algorithm fixed by the
// C++ standard), uniform doubles taken from the top 53 bits. No library
// distribution objects are involved, so a fixed seed reproduces the exact
// byte stream anywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 gen_;
};

// splitmix64 step; used to derive independent per-block sub-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t block_index);

// Trials are split into fixed 65536-trial blocks; block b runs on its own
// stream seeded from (seed, b). Lanes pick up blocks round-robin, so the
// merged estimate is identical for any lane count.
struct SimConfig {
    std::uint64_t seed = 0;
    long trials = 100000;  // >= 1
    int lanes = 1;         // parallel lanes; <=1 runs inline
};

struct EstimateWithError {
    double estimate = 0.0;
    double std_error = 0.0;  // sqrt(p(1-p)/trials)
    long trials = 0;
};

// Draws one multi-locus genotype under Hardy-Weinberg random mating: at each
// locus two alleles sampled independently from the table's frequencies,
// renormalized to sum to 1. Genotypes come out canonically ordered.
MultiLocusProfile sample_profile(const PopulationTable& table,
                                 const std::vector<std::string>& loci,
                                 Rng& rng);

// Fraction of sampled profiles exactly equal to the target, with binomial
// standard error. Every target allele must be present in the table.
EstimateWithError estimate_match_probability(const MultiLocusProfile& target,
                                             const PopulationTable& table,
                                             const SimConfig& cfg);

// Conditional acceptance estimate of the full-sib match probability: sample a
// parent pair, draw child A by Mendelian transmission; families where A
// equals the target at all loci are accepted, and a sibling B drawn from the
// same parents is compared against the target. Fewer than 100 accepted
// families is reported as insufficient data, not a number.
struct SibEstimate {
    std::optional<EstimateWithError> estimate;  // trials = accepted families
    long accepted_families = 0;
    long attempted_families = 0;

    bool insufficient() const { return !estimate.has_value(); }
};

SibEstimate estimate_sib_match_probability(const MultiLocusProfile& target,
                                           const PopulationTable& table,
                                           const SimConfig& cfg);

// Empirical distribution of match patterns among n non-source residents of a
// closed building (the source always matches; each other resident matches
// independently with probability f). Bit i of a pattern is set when resident
// i matched; pattern 0 is the only-source-matches event, whose probability
// is (1-f)^n.
class ClosedBuildingDistribution {
public:
    ClosedBuildingDistribution(int residents, long trials, std::vector<long> counts);

    int residents() const { return residents_; }
    long trials() const { return trials_; }
    const std::vector<long>& counts() const { return counts_; }

    double pattern_frequency(std::uint32_t pattern) const;
    double only_source_frequency() const { return pattern_frequency(0); }
    EstimateWithError only_source_estimate() const;

private:
    int residents_;
    long trials_;
    std::vector<long> counts_;  // size 2^residents
};

// n in [1, 20], f in (0,1).
ClosedBuildingDistribution simulate_closed_building(int n, double f, const SimConfig& cfg);

}  // namespace flr
