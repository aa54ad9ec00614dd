#include "flr/oracle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace flr {

namespace {

constexpr long kBlockTrials = 65536;
constexpr long kMinAcceptedFamilies = 100;

// Per-locus alias of the table data in index form, with frequencies
// renormalized for sampling.
struct LocusSampler {
    std::string locus;
    std::vector<std::string> alleles;
    std::vector<double> cumulative;  // renormalized, last entry 1.0

    int sample(Rng& rng) const {
        const double u = rng.uniform();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx >= alleles.size()) idx = alleles.size() - 1;
        return static_cast<int>(idx);
    }
};

LocusSampler make_locus_sampler(const PopulationTable& table, const std::string& locus) {
    const auto& data = table.locus_data(locus);
    if (data.frequencies.empty()) {
        throw ValidationError("locus '" + locus + "' has no alleles to sample");
    }
    LocusSampler s;
    s.locus = locus;
    double total = 0.0;
    for (const auto& [allele, freq] : data.frequencies) {
        if (!(freq > 0.0)) {
            throw ValidationError("non-positive frequency at locus '" + locus + "'");
        }
        total += freq;
    }
    double running = 0.0;
    for (const auto& [allele, freq] : data.frequencies) {
        s.alleles.push_back(allele);
        running += freq / total;
        s.cumulative.push_back(running);
    }
    s.cumulative.back() = 1.0;
    return s;
}

std::vector<LocusSampler> make_samplers(const PopulationTable& table,
                                        const std::vector<std::string>& loci) {
    if (loci.empty()) throw ValidationError("no loci to sample");
    std::vector<LocusSampler> out;
    out.reserve(loci.size());
    for (const auto& locus : loci) out.push_back(make_locus_sampler(table, locus));
    return out;
}

struct IndexPair {
    int a, b;  // a <= b
};

IndexPair ordered(int x, int y) {
    return x <= y ? IndexPair{x, y} : IndexPair{y, x};
}

// Target genotype as allele indices into each sampler.
std::vector<IndexPair> index_target(const MultiLocusProfile& target,
                                    const std::vector<LocusSampler>& samplers) {
    std::vector<IndexPair> out;
    out.reserve(samplers.size());
    for (const auto& s : samplers) {
        const Genotype* g = target.find(s.locus);
        if (!g) throw ValidationError("target lacks locus '" + s.locus + "'");
        auto find_index = [&s](const std::string& allele) {
            auto it = std::find(s.alleles.begin(), s.alleles.end(), allele);
            if (it == s.alleles.end()) {
                throw ValidationError("target allele '" + allele + "' absent at locus '" + s.locus +
                                      "'");
            }
            return static_cast<int>(it - s.alleles.begin());
        };
        out.push_back(ordered(find_index(g->allele1()), find_index(g->allele2())));
    }
    return out;
}

void check_config(const SimConfig& cfg) {
    if (cfg.trials < 1) throw ValidationError("trials must be at least 1");
}

// Runs fn(block_seed, first_trial, block_trials, block_slot) for every block,
// spread across cfg.lanes threads. Block boundaries depend only on the trial
// count, and block seeds only on (seed, block index), so results never depend
// on the lane count.
template <typename BlockFn>
void run_blocks(const SimConfig& cfg, BlockFn&& fn) {
    const long blocks = (cfg.trials + kBlockTrials - 1) / kBlockTrials;
    const int lanes = std::max(1, cfg.lanes);

    auto run_lane = [&](int lane) {
        for (long b = lane; b < blocks; b += lanes) {
            const long first = b * kBlockTrials;
            const long count = std::min(kBlockTrials, cfg.trials - first);
            fn(mix_seed(cfg.seed, static_cast<std::uint64_t>(b)), first, count,
               static_cast<std::size_t>(b));
        }
    };

    if (lanes == 1 || blocks <= 1) {
        run_lane(0);
        return;
    }
    std::vector<std::thread> threads;
    const int used = static_cast<int>(std::min<long>(lanes, blocks));
    threads.reserve(static_cast<std::size_t>(used));
    for (int lane = 0; lane < used; ++lane) threads.emplace_back(run_lane, lane);
    for (auto& t : threads) t.join();
}

double binomial_se(double p, long n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny (allele counts), bias < 2^-59.
    return gen_() % n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t block_index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (block_index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

MultiLocusProfile sample_profile(const PopulationTable& table,
                                 const std::vector<std::string>& loci, Rng& rng) {
    auto samplers = make_samplers(table, loci);
    std::vector<Genotype> genotypes;
    genotypes.reserve(samplers.size());
    for (const auto& s : samplers) {
        const int x = s.sample(rng);
        const int y = s.sample(rng);
        genotypes.emplace_back(s.locus, s.alleles[static_cast<std::size_t>(x)],
                               s.alleles[static_cast<std::size_t>(y)]);
    }
    return MultiLocusProfile(std::move(genotypes));
}

EstimateWithError estimate_match_probability(const MultiLocusProfile& target,
                                             const PopulationTable& table, const SimConfig& cfg) {
    check_config(cfg);
    const auto samplers = make_samplers(table, target.loci());
    const auto target_idx = index_target(target, samplers);
    const std::size_t n_loci = samplers.size();

    const long blocks = (cfg.trials + kBlockTrials - 1) / kBlockTrials;
    std::vector<long> hits(static_cast<std::size_t>(blocks), 0);

    run_blocks(cfg, [&](std::uint64_t block_seed, long, long count, std::size_t slot) {
        Rng rng(block_seed);
        long block_hits = 0;
        for (long t = 0; t < count; ++t) {
            bool match = true;
            for (std::size_t l = 0; l < n_loci; ++l) {
                const IndexPair drawn = ordered(samplers[l].sample(rng), samplers[l].sample(rng));
                if (drawn.a != target_idx[l].a || drawn.b != target_idx[l].b) {
                    match = false;
                    // Remaining loci still consume draws so the stream shape
                    // stays fixed per trial.
                }
            }
            if (match) ++block_hits;
        }
        hits[slot] = block_hits;
    });

    long total = 0;
    for (long h : hits) total += h;
    const double p = static_cast<double>(total) / static_cast<double>(cfg.trials);
    return {p, binomial_se(p, cfg.trials), cfg.trials};
}

SibEstimate estimate_sib_match_probability(const MultiLocusProfile& target,
                                           const PopulationTable& table, const SimConfig& cfg) {
    check_config(cfg);
    const auto samplers = make_samplers(table, target.loci());
    const auto target_idx = index_target(target, samplers);
    const std::size_t n_loci = samplers.size();

    const long blocks = (cfg.trials + kBlockTrials - 1) / kBlockTrials;
    std::vector<long> accepted(static_cast<std::size_t>(blocks), 0);
    std::vector<long> matched(static_cast<std::size_t>(blocks), 0);

    run_blocks(cfg, [&](std::uint64_t block_seed, long, long count, std::size_t slot) {
        Rng rng(block_seed);
        std::vector<IndexPair> parent1(n_loci), parent2(n_loci);
        long block_accepted = 0;
        long block_matched = 0;
        for (long t = 0; t < count; ++t) {
            // Child A: one allele from each parent, per locus.
            bool accept = true;
            for (std::size_t l = 0; l < n_loci && accept; ++l) {
                parent1[l] = {samplers[l].sample(rng), samplers[l].sample(rng)};
                parent2[l] = {samplers[l].sample(rng), samplers[l].sample(rng)};
                const int from1 = rng.below(2) ? parent1[l].a : parent1[l].b;
                const int from2 = rng.below(2) ? parent2[l].a : parent2[l].b;
                const IndexPair child = ordered(from1, from2);
                accept = child.a == target_idx[l].a && child.b == target_idx[l].b;
            }
            if (!accept) continue;
            ++block_accepted;
            bool sib_matches = true;
            for (std::size_t l = 0; l < n_loci; ++l) {
                const int from1 = rng.below(2) ? parent1[l].a : parent1[l].b;
                const int from2 = rng.below(2) ? parent2[l].a : parent2[l].b;
                const IndexPair sib = ordered(from1, from2);
                if (sib.a != target_idx[l].a || sib.b != target_idx[l].b) sib_matches = false;
            }
            if (sib_matches) ++block_matched;
        }
        accepted[slot] = block_accepted;
        matched[slot] = block_matched;
    });

    SibEstimate out;
    out.attempted_families = cfg.trials;
    for (long a : accepted) out.accepted_families += a;
    long total_matched = 0;
    for (long m : matched) total_matched += m;

    if (out.accepted_families < kMinAcceptedFamilies) return out;  // insufficient data
    const double p =
        static_cast<double>(total_matched) / static_cast<double>(out.accepted_families);
    out.estimate = EstimateWithError{p, binomial_se(p, out.accepted_families),
                                     out.accepted_families};
    return out;
}

ClosedBuildingDistribution::ClosedBuildingDistribution(int residents, long trials,
                                                       std::vector<long> counts)
    : residents_(residents), trials_(trials), counts_(std::move(counts)) {}

double ClosedBuildingDistribution::pattern_frequency(std::uint32_t pattern) const {
    if (pattern >= counts_.size()) throw ValidationError("pattern out of range");
    return static_cast<double>(counts_[pattern]) / static_cast<double>(trials_);
}

EstimateWithError ClosedBuildingDistribution::only_source_estimate() const {
    const double p = only_source_frequency();
    return {p, binomial_se(p, trials_), trials_};
}

ClosedBuildingDistribution simulate_closed_building(int n, double f, const SimConfig& cfg) {
    check_config(cfg);
    if (n < 1 || n > 20) throw ValidationError("resident count must lie in [1,20]");
    if (!(f > 0.0) || !(f < 1.0)) throw ValidationError("match probability must lie in (0,1)");

    const std::size_t patterns = static_cast<std::size_t>(1) << n;
    const long blocks = (cfg.trials + kBlockTrials - 1) / kBlockTrials;
    std::vector<std::vector<long>> counts(static_cast<std::size_t>(blocks));

    run_blocks(cfg, [&](std::uint64_t block_seed, long, long count, std::size_t slot) {
        Rng rng(block_seed);
        std::vector<long> local(patterns, 0);
        for (long t = 0; t < count; ++t) {
            std::uint32_t mask = 0;
            for (int i = 0; i < n; ++i) {
                if (rng.uniform() < f) mask |= (1u << i);
            }
            ++local[mask];
        }
        counts[slot] = std::move(local);
    });

    std::vector<long> merged(patterns, 0);
    for (const auto& local : counts) {
        for (std::size_t i = 0; i < patterns; ++i) merged[i] += local[i];
    }
    return {n, cfg.trials, std::move(merged)};
}

}  // namespace flr
