#include "flr/match_stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace flr {

namespace {

double lookup_positive(const AlleleFrequencies& freqs, const std::string& allele,
                       const std::string& locus) {
    auto it = freqs.find(allele);
    if (it == freqs.end()) {
        throw ValidationError("allele '" + allele + "' missing from frequencies at locus '" + locus +
                              "'");
    }
    if (!(it->second > 0.0)) {
        throw ValidationError("allele '" + allele + "' has non-positive frequency at locus '" +
                              locus + "'");
    }
    return it->second;
}

double clamp_unit(double v) {
    return std::min(v, 1.0);
}

double theta_locus_value(const Genotype& g, const AlleleFrequencies& freqs, double t) {
    const double p = lookup_positive(freqs, g.allele1(), g.locus());
    if (g.homozygous()) {
        const double a = 2.0 * t + (1.0 - t) * p;
        const double b = 3.0 * t + (1.0 - t) * p;
        return clamp_unit(a * b / ((1.0 + t) * (1.0 + 2.0 * t)));
    }
    const double q = lookup_positive(freqs, g.allele2(), g.locus());
    return clamp_unit(2.0 * ((t + (1.0 - t) * p) * (t + (1.0 - t) * q)));
}

double hw_locus_value(const Genotype& g, const AlleleFrequencies& freqs) {
    const double p = lookup_positive(freqs, g.allele1(), g.locus());
    if (g.homozygous()) return p * p;
    const double q = lookup_positive(freqs, g.allele2(), g.locus());
    return clamp_unit(2.0 * (p * q));
}

double sib_locus_value(const Genotype& g, const AlleleFrequencies& freqs) {
    const double p = lookup_positive(freqs, g.allele1(), g.locus());
    if (g.homozygous()) {
        const double s = 1.0 + p;
        return clamp_unit(s * s / 4.0);
    }
    const double q = lookup_positive(freqs, g.allele2(), g.locus());
    return clamp_unit((1.0 + p + q + 2.0 * p * q) / 4.0);
}

}  // namespace

Theta::Theta(double v) : value(v) {
    if (!(v >= 0.0) || v >= 1.0) {
        throw ValidationError("theta must lie in [0,1)");
    }
}

Genotype::Genotype(std::string locus, std::string a, std::string b)
    : locus_(std::move(locus)), a1_(std::move(a)), a2_(std::move(b)) {
    if (locus_.empty()) throw ValidationError("empty locus name");
    if (a1_.empty() || a2_.empty()) throw ValidationError("empty allele label at locus '" + locus_ + "'");
    if (a2_ < a1_) std::swap(a1_, a2_);
}

MultiLocusProfile::MultiLocusProfile(std::vector<Genotype> genotypes)
    : genotypes_(std::move(genotypes)) {
    if (genotypes_.empty()) throw ValidationError("profile has no loci");
    std::set<std::string> seen;
    for (const auto& g : genotypes_) {
        if (!seen.insert(g.locus()).second) {
            throw ValidationError("duplicate locus '" + g.locus() + "' in profile");
        }
    }
}

const Genotype* MultiLocusProfile::find(const std::string& locus) const {
    for (const auto& g : genotypes_) {
        if (g.locus() == locus) return &g;
    }
    return nullptr;
}

std::vector<std::string> MultiLocusProfile::loci() const {
    std::vector<std::string> out;
    out.reserve(genotypes_.size());
    for (const auto& g : genotypes_) out.push_back(g.locus());
    return out;
}

GenotypeFrequency hw_genotype_freq(const Genotype& g, const AlleleFrequencies& freqs) {
    return {hw_locus_value(g, freqs), FreqModel::hw, 0.0};
}

GenotypeFrequency theta_genotype_freq(const Genotype& g, const AlleleFrequencies& freqs,
                                      Theta theta) {
    return {theta_locus_value(g, freqs, theta.value), FreqModel::theta, theta.value};
}

GenotypeFrequency profile_frequency(const MultiLocusProfile& profile, const PopulationTable& table,
                                    Theta theta) {
    double product = 1.0;
    for (const auto& g : profile.genotypes()) {
        const auto& freqs = table.locus_data(g.locus()).frequencies;
        product *= theta.value > 0.0 ? theta_locus_value(g, freqs, theta.value)
                                     : hw_locus_value(g, freqs);
    }
    const FreqModel model = theta.value > 0.0 ? FreqModel::theta : FreqModel::hw;
    return {product, model, theta.value};
}

GenotypeFrequency ceiling_profile_frequency(const MultiLocusProfile& profile,
                                            const std::vector<PopulationTable>& tables,
                                            double floor) {
    if (tables.empty()) throw ValidationError("ceiling requires at least one table");
    if (!(floor > 0.0) || floor > 1.0) throw ValidationError("ceiling floor must lie in (0,1]");

    auto ceiling_allele = [&](const std::string& locus, const std::string& allele) {
        double best = 0.0;
        bool found = false;
        for (const auto& t : tables) {
            auto p = t.allele_frequency(locus, allele);
            if (!p) continue;
            found = true;
            double upper = *p;
            if (auto two_n = t.two_n(locus)) {
                upper += 1.96 * std::sqrt(*p * (1.0 - *p) / static_cast<double>(*two_n));
            }
            best = std::max(best, std::min(upper, 1.0));
        }
        if (!found) {
            throw ValidationError("allele '" + allele + "' at locus '" + locus +
                                  "' absent from all tables");
        }
        return std::max(floor, best);
    };

    double product = 1.0;
    for (const auto& g : profile.genotypes()) {
        const double p = ceiling_allele(g.locus(), g.allele1());
        double locus_value;
        if (g.homozygous()) {
            locus_value = p * p;
        } else {
            const double q = ceiling_allele(g.locus(), g.allele2());
            locus_value = clamp_unit(2.0 * (p * q));
        }
        product *= locus_value;
    }
    return {product, FreqModel::ceiling, 0.0};
}

GenotypeFrequency sib_match_probability(const MultiLocusProfile& profile,
                                        const PopulationTable& table) {
    double product = 1.0;
    for (const auto& g : profile.genotypes()) {
        product *= sib_locus_value(g, table.locus_data(g.locus()).frequencies);
    }
    return {product, FreqModel::sib, 0.0};
}

}  // namespace flr
