#include "flr/likelihood_engine.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace flr {

namespace {

constexpr std::size_t kLogSpaceThreshold = 50;  // alternatives beyond which products run in logs
constexpr double kWeightSumTolerance = 1e-9;

}  // namespace

EvidenceRecord::EvidenceRecord(std::vector<TestOutcome> outcomes, std::string suspect_id,
                               std::map<std::string, double> frequencies)
    : outcomes_(std::move(outcomes)),
      suspect_id_(std::move(suspect_id)),
      frequencies_(std::move(frequencies)) {
    validate();
}

EvidenceRecord::EvidenceRecord(std::vector<TestOutcome> outcomes, std::string suspect_id,
                               double common_frequency)
    : outcomes_(std::move(outcomes)), suspect_id_(std::move(suspect_id)) {
    for (const auto& t : outcomes_) frequencies_[t.id] = common_frequency;
    validate();
}

void EvidenceRecord::validate() const {
    if (outcomes_.empty()) throw ValidationError("evidence record holds no individuals");
    std::set<std::string> ids;
    for (const auto& t : outcomes_) {
        if (t.id.empty()) throw ValidationError("empty individual id");
        if (!ids.insert(t.id).second) {
            throw ValidationError("individual '" + t.id + "' listed more than once");
        }
        auto f = frequencies_.find(t.id);
        if (f == frequencies_.end()) {
            throw ValidationError("no coincidence frequency for individual '" + t.id + "'");
        }
        if (!(f->second > 0.0) || !(f->second < 1.0)) {
            throw ValidationError("coincidence frequency for '" + t.id + "' outside (0,1)");
        }
    }
    if (!ids.contains(suspect_id_)) {
        throw ValidationError("suspect '" + suspect_id_ + "' not among the tested individuals");
    }
}

double EvidenceRecord::frequency(const std::string& id) const {
    auto it = frequencies_.find(id);
    if (it == frequencies_.end()) throw ValidationError("unknown individual '" + id + "'");
    return it->second;
}

Outcome EvidenceRecord::outcome(const std::string& id) const {
    for (const auto& t : outcomes_) {
        if (t.id == id) return t.outcome;
    }
    throw ValidationError("unknown individual '" + id + "'");
}

bool EvidenceRecord::contains(const std::string& id) const {
    for (const auto& t : outcomes_) {
        if (t.id == id) return true;
    }
    return false;
}

LikelihoodRatio::LikelihoodRatio(double numerator, double denominator)
    : numerator_(numerator), denominator_(denominator) {
    if (!(numerator >= 0.0) || numerator > 1.0 || !(denominator >= 0.0) || denominator > 1.0) {
        throw ValidationError("likelihoods must lie in [0,1]");
    }
}

double LikelihoodRatio::value() const {
    if (undefined()) {
        throw ValidationError("likelihood ratio is undefined (0/0); check undefined() first");
    }
    if (infinite()) return std::numeric_limits<double>::infinity();
    return numerator_ / denominator_;
}

double evidence_likelihood(const EvidenceRecord& e, const Hypothesis& h) {
    if (!e.contains(h.source_id)) {
        throw ValidationError("hypothesized source '" + h.source_id + "' not in the record");
    }

    double product = 1.0;
    double log_sum = 0.0;
    std::size_t non_unit = 0;
    double last_non_unit = 1.0;

    for (const auto& t : e.outcomes()) {
        double factor;
        if (t.id == h.source_id) {
            // The source matches with certainty; an excluded source makes the
            // evidence impossible.
            if (t.outcome == Outcome::excluded) return 0.0;
            factor = 1.0;
        } else {
            switch (t.outcome) {
                case Outcome::matched: factor = e.frequency(t.id); break;
                case Outcome::excluded: factor = 1.0 - e.frequency(t.id); break;
                case Outcome::untested: factor = 1.0; break;
                default: factor = 1.0; break;
            }
        }
        if (factor == 0.0) return 0.0;
        if (factor != 1.0) {
            ++non_unit;
            last_non_unit = factor;
            product *= factor;
            log_sum += std::log(factor);
        }
    }

    if (non_unit == 0) return 1.0;
    if (non_unit == 1) return last_non_unit;  // exact; keeps single-test LRs lossless
    return e.alternatives() > kLogSpaceThreshold ? std::exp(log_sum) : product;
}

LikelihoodRatio likelihood_ratio(const EvidenceRecord& e, const Hypothesis& alternative) {
    if (alternative.source_id == e.suspect_id()) {
        throw ValidationError("alternative hypothesis names the suspect");
    }
    const double num = evidence_likelihood(e, Hypothesis{e.suspect_id()});
    const double den = evidence_likelihood(e, alternative);
    return {num, den};
}

LikelihoodRatio composite_alternative_lr(const EvidenceRecord& e,
                                         const std::vector<std::pair<std::string, double>>& weights) {
    if (weights.empty()) throw ValidationError("no alternative hypotheses given");
    double sum = 0.0;
    std::set<std::string> seen;
    for (const auto& [id, w] : weights) {
        if (id == e.suspect_id()) throw ValidationError("composite alternative includes the suspect");
        if (!e.contains(id)) throw ValidationError("unknown individual '" + id + "' in weights");
        if (!seen.insert(id).second) throw ValidationError("individual '" + id + "' weighted twice");
        if (!(w >= 0.0)) throw ValidationError("negative weight for '" + id + "'");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        throw ValidationError("alternative weights must sum to 1");
    }

    double den = 0.0;
    for (const auto& [id, w] : weights) {
        if (w == 0.0) continue;
        den += w * evidence_likelihood(e, Hypothesis{id});
    }
    const double num = evidence_likelihood(e, Hypothesis{e.suspect_id()});
    return {num, den};
}

Relevance relevance_indicator(const LikelihoodRatio& lr) {
    if (lr.undefined()) return Relevance::undefined;
    if (lr.infinite()) return Relevance::tends_to_prove;
    const double v = lr.value();
    if (v > 1.0) return Relevance::tends_to_prove;
    if (v < 1.0) return Relevance::tends_to_disprove;
    return Relevance::neutral;
}

}  // namespace flr
