#pragma once

#include <map>
#include <string>
#include <vector>

#include "flr/errors.hpp"
#include "flr/population_db.hpp"

namespace flr {

// Coancestry coefficient in [0, 1).
struct Theta {
    double value = 0.0;

    Theta() = default;
    explicit Theta(double v);
};

enum class FreqModel { hw, theta, ceiling, sib, weighted };

// A genotype or profile frequency in (0,1], tagged with the model that
// produced it. theta is meaningful only for FreqModel::theta.
struct GenotypeFrequency {
    double value = 0.0;
    FreqModel model = FreqModel::hw;
    double theta = 0.0;
};

// Unordered allele pair at a locus, stored with the smaller label first.
class Genotype {
public:
    Genotype(std::string locus, std::string a, std::string b);

    const std::string& locus() const { return locus_; }
    const std::string& allele1() const { return a1_; }
    const std::string& allele2() const { return a2_; }
    bool homozygous() const { return a1_ == a2_; }

    bool operator==(const Genotype&) const = default;

private:
    std::string locus_;
    std::string a1_, a2_;  // a1_ <= a2_
};

// One genotype per distinct locus; never empty.
class MultiLocusProfile {
public:
    explicit MultiLocusProfile(std::vector<Genotype> genotypes);

    const std::vector<Genotype>& genotypes() const { return genotypes_; }
    const Genotype* find(const std::string& locus) const;
    std::vector<std::string> loci() const;
    std::size_t size() const { return genotypes_.size(); }

    bool operator==(const MultiLocusProfile&) const = default;

private:
    std::vector<Genotype> genotypes_;
};

using AlleleFrequencies = std::map<std::string, double>;

// Hardy-Weinberg single-locus genotype frequency: p_i^2 for a homozygote,
// 2 p_i p_j for a heterozygote.
GenotypeFrequency hw_genotype_freq(const Genotype& g, const AlleleFrequencies& freqs);

// Theta-corrected single-locus match probability under the Beta allele-
// frequency mixture with mean p and variance theta*p*(1-p):
//   homozygote    [2t + (1-t)p][3t + (1-t)p] / [(1+t)(1+2t)]
//   heterozygote  2[t + (1-t)p_i][t + (1-t)p_j]
// Both reduce exactly to Hardy-Weinberg at theta = 0 and never fall below it
// while any involved allele frequency is below 1.
GenotypeFrequency theta_genotype_freq(const Genotype& g, const AlleleFrequencies& freqs, Theta theta);

// Product of per-locus frequencies across the profile (theta-corrected when
// theta > 0); loci are treated as independent.
GenotypeFrequency profile_frequency(const MultiLocusProfile& profile,
                                    const PopulationTable& table,
                                    Theta theta);

// Conservative profile frequency: per allele, take the largest 95% upper
// confidence bound across the given tables, never below `floor`
//   upper95(p) = min(1, p + 1.96 * sqrt(p(1-p)/2N))   (p itself when 2N unknown)
// then Hardy-Weinberg per locus and the product across loci.
GenotypeFrequency ceiling_profile_frequency(const MultiLocusProfile& profile,
                                            const std::vector<PopulationTable>& tables,
                                            double floor);

// Full-sibling conditional match probability, the standard upper bound on the
// match probability for close relatives:
//   heterozygote  (1 + p_i + p_j + 2 p_i p_j) / 4
//   homozygote    (1 + p_i)^2 / 4
// multiplied across loci. Computed at theta = 0.
GenotypeFrequency sib_match_probability(const MultiLocusProfile& profile,
                                        const PopulationTable& table);

}  // namespace flr
