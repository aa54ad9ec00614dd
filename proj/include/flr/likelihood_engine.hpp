#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flr/errors.hpp"

namespace flr {

enum class Outcome { matched, excluded, untested };

struct TestOutcome {
    std::string id;
    Outcome outcome;
};

// DNA test outcomes for a set of individuals, one of whom is the designated
// suspect, plus each individual's coincidence frequency f: the probability
// that an unrelated non-source would nevertheless match the evidence profile.
// Individuals are assumed independent.
class EvidenceRecord {
public:
    // Per-individual frequencies; every listed individual needs one, each in (0,1).
    EvidenceRecord(std::vector<TestOutcome> outcomes,
                   std::string suspect_id,
                   std::map<std::string, double> frequencies);

    // Common coincidence frequency for everyone.
    EvidenceRecord(std::vector<TestOutcome> outcomes, std::string suspect_id, double common_frequency);

    const std::vector<TestOutcome>& outcomes() const { return outcomes_; }
    const std::string& suspect_id() const { return suspect_id_; }
    double frequency(const std::string& id) const;
    Outcome outcome(const std::string& id) const;
    bool contains(const std::string& id) const;

    // n: individuals other than the suspect.
    std::size_t alternatives() const { return outcomes_.size() - 1; }

private:
    void validate() const;

    std::vector<TestOutcome> outcomes_;
    std::string suspect_id_;
    std::map<std::string, double> frequencies_;
};

// The assertion that a particular individual is the source of the evidence DNA.
struct Hypothesis {
    std::string source_id;
};

// Ratio of two evidence likelihoods under extended arithmetic: finite when the
// denominator is positive, infinite when only the numerator is, and undefined
// when both are zero. Undefined is a first-class state, never coerced to a
// number.
class LikelihoodRatio {
public:
    LikelihoodRatio(double numerator, double denominator);

    double numerator() const { return numerator_; }
    double denominator() const { return denominator_; }

    bool undefined() const { return numerator_ == 0.0 && denominator_ == 0.0; }
    bool infinite() const { return denominator_ == 0.0 && numerator_ > 0.0; }

    // Finite ratio or +infinity; throws ValidationError when undefined.
    double value() const;

private:
    double numerator_;
    double denominator_;
};

// P(E | h): product over individuals, where the hypothesized source
// contributes 1 if matched, 0 if excluded, 1 if untested, and every other
// individual contributes f if matched, 1-f if excluded, 1 if untested.
// Accumulates in log space when the record holds more than 50 alternatives;
// a product with at most one non-unit factor is returned exactly.
double evidence_likelihood(const EvidenceRecord& e, const Hypothesis& h);

// P(E | suspect is source) / P(E | alternative is source). The alternative
// must name a non-suspect individual in the record. In the single-test case
// (suspect matched, everyone else untested) this is exactly 1/f.
LikelihoodRatio likelihood_ratio(const EvidenceRecord& e, const Hypothesis& alternative);

// Aggregates the per-individual alternatives into one composite alternative:
// denominator = sum of w_i * P(E | I_i) over non-suspect individuals, with
// weights summing to 1.
LikelihoodRatio composite_alternative_lr(const EvidenceRecord& e,
                                         const std::vector<std::pair<std::string, double>>& weights);

enum class Relevance { tends_to_prove, tends_to_disprove, neutral, undefined };

// Evidence tends to prove the source hypothesis exactly when LR > 1.
Relevance relevance_indicator(const LikelihoodRatio& lr);

}  // namespace flr
