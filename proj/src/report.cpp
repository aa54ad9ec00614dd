#include "flr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "flr/oracle_sim.hpp"
#include "flr/population_db.hpp"

namespace flr {

namespace {

constexpr double kPartitionTolerance = 1e-9;
const char* kSuspectId = "suspect";

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::vector<LocusAllele> profile_alleles(const MultiLocusProfile& profile) {
    std::vector<LocusAllele> out;
    for (const auto& g : profile.genotypes()) {
        out.push_back({g.locus(), g.allele1()});
        if (!g.homozygous()) out.push_back({g.locus(), g.allele2()});
    }
    return out;
}

// Census-weighted pooled allele frequencies over the groups that carry both a
// table and a census weight; the race-blind theta figure runs on this table.
PopulationTable pool_tables(const std::vector<std::pair<std::string, PopulationTable>>& tables,
                            const CensusWeights& census,
                            const MultiLocusProfile& profile) {
    PopulationTable pooled("pooled");
    for (const auto& g : profile.genotypes()) {
        std::map<std::string, double> sums;
        double mass = 0.0;
        for (const auto& [group, table] : tables) {
            auto w = census.proportion(group);
            if (!w || !(*w > 0.0)) continue;
            mass += *w;
            for (const auto& [allele, freq] : table.locus_data(g.locus()).frequencies) {
                sums[allele] += *w * freq;
            }
        }
        if (!(mass > 0.0)) {
            throw ValidationError("no census-weighted group covers locus '" + g.locus() + "'");
        }
        for (const auto& [allele, sum] : sums) {
            pooled.set_frequency(g.locus(), allele, sum / mass);
        }
    }
    return pooled;
}

double single_test_lr(double frequency) {
    if (frequency >= 1.0) return 1.0;
    // Single-test record: the suspect matched, one unknown alternative untested.
    EvidenceRecord record({{kSuspectId, Outcome::matched}, {"unknown", Outcome::untested}},
                          kSuspectId, frequency);
    return likelihood_ratio(record, Hypothesis{"unknown"}).value();
}

struct SectionWriter {
    std::ostringstream os;

    void section(const char* name) { os << "\n== " << name << " ==\n"; }
    void line(const std::string& s) { os << s << '\n'; }
};

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::matched: return "matched";
        case Outcome::excluded: return "excluded";
        case Outcome::untested: return "untested";
    }
    return "untested";
}

}  // namespace

MatchReport run_case(const CaseFile& c) {
    MatchReport report;
    report.theta = c.theta;
    report.ceiling_floor = c.ceiling_floor;
    report.loci = c.evidence.loci();

    // Evidence and suspect must type the same loci.
    {
        auto ev = c.evidence.loci();
        auto su = c.suspect.loci();
        std::sort(ev.begin(), ev.end());
        std::sort(su.begin(), su.end());
        if (ev != su) {
            throw ValidationError("evidence and suspect profiles cover different loci");
        }
    }

    for (const auto& g : c.evidence.genotypes()) {
        const Genotype* s = c.suspect.find(g.locus());
        if (!(*s == g)) report.mismatched_loci.push_back(g.locus());
    }
    if (!report.mismatched_loci.empty()) {
        report.excluded = true;
        report.notes.push_back("suspect excluded: profiles differ at " +
                               std::to_string(report.mismatched_loci.size()) + " of " +
                               std::to_string(report.loci.size()) +
                               " loci; no match statistics are computed");
        return report;
    }

    const CensusWeights census = parse_census_weights(read_file(c.census_path));

    // Per-group frequencies, either computed from allele tables or given directly.
    std::vector<std::pair<std::string, PopulationTable>> floored_tables;
    std::vector<std::pair<std::string, double>> group_freqs;
    const bool allele_mode = !c.allele_files.empty();

    if (allele_mode) {
        const auto evidence_alleles = profile_alleles(c.evidence);
        for (const auto& [group, path] : c.allele_files) {
            auto tables = parse_allele_tables(read_file(path));
            const PopulationTable* found = nullptr;
            for (const auto& t : tables) {
                if (t.population() == group) found = &t;
            }
            if (!found) {
                throw ValidationError("population '" + group + "' not present in '" + path + "'");
            }
            ValidationReport v = validate_table(*found);
            if (!v.ok()) {
                throw ValidationError("table for '" + group + "' fails validation:\n" +
                                      v.to_string());
            }
            PopulationTable floored = apply_min_allele_floor(*found, evidence_alleles);
            const double f = profile_frequency(c.evidence, floored, Theta(c.theta)).value;
            floored_tables.emplace_back(group, std::move(floored));
            group_freqs.emplace_back(group, f);
        }
    } else {
        group_freqs = c.direct_frequencies;
    }

    // Census-listed groups first, in census order; the rest keep case order.
    std::vector<std::pair<std::string, double>> ordered;
    for (const auto& entry : census.entries()) {
        for (const auto& gf : group_freqs) {
            if (gf.first == entry.group) ordered.push_back(gf);
        }
    }
    for (const auto& gf : group_freqs) {
        if (!census.proportion(gf.first)) ordered.push_back(gf);
    }

    for (const auto& [group, f] : ordered) {
        PopulationResult r;
        r.group = group;
        r.weight = census.proportion(group);
        r.frequency = f;
        r.lr = single_test_lr(f);
        report.populations.push_back(std::move(r));
    }

    // General-population figure: full partition -> weighted sum, otherwise a
    // sensitivity table over the uncovered mass.
    GroupFrequencySet covered;
    for (const auto& r : report.populations) {
        if (r.weight) covered.push_back({r.group, *r.weight, r.frequency});
    }
    if (covered.empty()) {
        throw ValidationError("no case population group appears in the census table");
    }
    double covered_weight = 0.0;
    for (const auto& g : covered) covered_weight += g.weight;
    report.covered_weight = covered_weight;
    report.uncovered_weight = std::max(0.0, 1.0 - covered_weight);

    double max_freq = report.populations.front().frequency;
    double min_freq = max_freq;
    for (const auto& r : report.populations) {
        max_freq = std::max(max_freq, r.frequency);
        min_freq = std::min(min_freq, r.frequency);
    }
    report.bound_lower = min_freq;
    report.bound_upper = max_freq;
    report.most_conservative_frequency = max_freq;

    if (report.uncovered_weight <= kPartitionTolerance) {
        report.weighted_frequency = weighted_frequency(covered).value;
    } else {
        report.sensitivity_reference = max_freq;
        report.sensitivity =
            sensitivity_table(covered, report.uncovered_weight, max_freq, c.multipliers);
    }

    if (allele_mode) {
        PopulationTable pooled = pool_tables(floored_tables, census, c.evidence);
        report.race_blind_frequency =
            profile_frequency(c.evidence, pooled, Theta(report.race_blind_theta)).value;

        double sib_max = 0.0;
        for (const auto& [group, table] : floored_tables) {
            sib_max = std::max(sib_max, sib_match_probability(c.evidence, table).value);
        }
        report.sib_bound = sib_max;

        std::vector<PopulationTable> all_tables;
        for (const auto& [group, table] : floored_tables) all_tables.push_back(table);
        report.ceiling_bound =
            ceiling_profile_frequency(c.evidence, all_tables, c.ceiling_floor).value;
    } else {
        report.notes.push_back(
            "race-blind theta-adjusted figure, sib bound and ceiling bound require "
            "allele-level tables; this case supplies profile-level frequencies");
    }

    // Closed-set analysis of the other tested individuals.
    if (!c.outcomes.empty()) {
        const double f_closed = report.weighted_frequency
                                    ? *report.weighted_frequency
                                    : *report.most_conservative_frequency;
        std::vector<TestOutcome> all{{kSuspectId, Outcome::matched}};
        std::vector<std::pair<std::string, double>> weights;
        const double w = 1.0 / static_cast<double>(c.outcomes.size());
        ClosedSetResult cs;
        cs.others = static_cast<int>(c.outcomes.size());
        cs.coincidence_frequency = f_closed;
        for (const auto& t : c.outcomes) {
            if (t.id == kSuspectId) {
                throw ValidationError("individual id 'suspect' is reserved");
            }
            all.push_back(t);
            weights.emplace_back(t.id, w);
            switch (t.outcome) {
                case Outcome::matched: ++cs.matched; break;
                case Outcome::excluded: ++cs.excluded; break;
                case Outcome::untested: ++cs.untested; break;
            }
        }
        EvidenceRecord record(std::move(all), kSuspectId, f_closed);
        cs.p_evidence_given_suspect = evidence_likelihood(record, Hypothesis{kSuspectId});
        cs.composite_lr = composite_alternative_lr(record, weights);
        cs.all_alternatives_excluded = cs.excluded == cs.others;
        if (cs.all_alternatives_excluded) {
            report.notes.push_back(
                "all alternatives excluded — evidence impossible under every non-suspect "
                "hypothesis");
        }
        report.closed_set = std::move(cs);
    }

    report.notes.push_back(
        "per-group frequencies estimate how probable it is that an unknown, unrelated "
        "individual would coincidentally carry the evidence profile; the smaller the "
        "frequency, the more surprising a coincidental match");
    if (allele_mode) {
        report.notes.push_back("the sib-method bound is computed at theta = 0");
    }
    return report;
}

ReportFormat parse_format(std::string_view name) {
    if (name == "text") return ReportFormat::text;
    if (name == "structured") return ReportFormat::structured;
    throw ValidationError("unknown format '" + std::string(name) + "' (expected text or structured)");
}

namespace {

std::string emit_text(const MatchReport& r) {
    SectionWriter w;
    w.os << "forensic-lr match report\n";

    w.section("Match");
    w.line(std::string("status: ") + (r.excluded ? "exclusion" : "match"));
    w.line("theta: " + fmt3(r.theta));
    w.line("loci (" + std::to_string(r.loci.size()) + "): " + join(r.loci, ", "));
    if (r.excluded) {
        w.line("mismatched loci: " + join(r.mismatched_loci, ", "));
    }

    w.section("Per-population");
    if (r.excluded) {
        w.line("not computed (exclusion)");
    } else {
        for (const auto& p : r.populations) {
            std::string line = p.group + ": frequency " + fmt3(p.frequency) + ", LR " + fmt3(p.lr);
            if (p.weight) line += ", census weight " + fmt3(*p.weight);
            w.line(line);
        }
        if (r.race_blind_frequency) {
            w.line("race-blind frequency (theta = " + fmt3(r.race_blind_theta) +
                   "): " + fmt3(*r.race_blind_frequency) + ", LR " +
                   fmt3(1.0 / *r.race_blind_frequency));
        }
    }

    w.section("General-population");
    if (r.excluded) {
        w.line("not computed (exclusion)");
    } else {
        w.line("covered census mass: " + fmt3(r.covered_weight));
        w.line("uncovered mass: " + fmt3(r.uncovered_weight));
        if (r.weighted_frequency) {
            w.line("weighted frequency: " + fmt3(*r.weighted_frequency) + ", LR " +
                   fmt3(1.0 / *r.weighted_frequency));
        } else {
            w.line("partition incomplete; see sensitivity table");
        }
        if (r.closed_set) {
            const auto& cs = *r.closed_set;
            w.line("closed set: " + std::to_string(cs.others) + " other individuals (" +
                   std::to_string(cs.matched) + " matched, " + std::to_string(cs.excluded) +
                   " excluded, " + std::to_string(cs.untested) + " untested), f " +
                   fmt3(cs.coincidence_frequency));
            w.line("closed set P(E|suspect): " + fmt3(cs.p_evidence_given_suspect));
            const auto& lr = *cs.composite_lr;
            if (lr.undefined()) {
                w.line("closed set composite LR: undefined");
            } else if (lr.infinite()) {
                w.line("closed set composite LR: infinite (all alternatives excluded)");
            } else {
                w.line("closed set composite LR: " + fmt3(lr.value()));
            }
        }
    }

    w.section("Bounds");
    if (r.excluded) {
        w.line("not computed (exclusion)");
    } else {
        w.line("per-group frequency range: [" + fmt3(*r.bound_lower) + ", " + fmt3(*r.bound_upper) +
               "]");
        w.line("most conservative (largest) per-group frequency: " +
               fmt3(*r.most_conservative_frequency));
        if (r.sib_bound) w.line("sib-method upper bound: " + fmt3(*r.sib_bound));
        if (r.ceiling_bound) {
            w.line("ceiling bound (allele floor " + fmt3(r.ceiling_floor) +
                   "): " + fmt3(*r.ceiling_bound));
        }
    }

    w.section("Sensitivity");
    if (r.excluded) {
        w.line("not computed (exclusion)");
    } else if (r.sensitivity.empty()) {
        w.line("not needed: census partition is complete");
    } else {
        w.line("reference frequency (largest per-group): " + fmt3(r.sensitivity_reference));
        w.line("k | assumed uncovered frequency | contribution | total");
        for (const auto& row : r.sensitivity) {
            w.line(fmt3(row.multiplier) + " | " + fmt3(row.hypothetical_frequency) + " | " +
                   fmt3(row.contribution) + " | " + fmt3(row.total));
        }
    }

    w.section("Notes");
    for (const auto& note : r.notes) w.line("- " + note);
    return w.os.str();
}

std::string emit_structured(const MatchReport& r) {
    std::ostringstream os;
    auto kv = [&os](const std::string& key, const std::string& value) {
        os << key << " = " << value << '\n';
    };
    kv("format", "forensic-lr.report.v1");
    kv("status", r.excluded ? "exclusion" : "match");
    kv("theta", fmt_full(r.theta));
    kv("loci", join(r.loci, ","));
    if (r.excluded) {
        kv("mismatched_loci", join(r.mismatched_loci, ","));
    }
    for (std::size_t i = 0; i < r.populations.size(); ++i) {
        const auto& p = r.populations[i];
        const std::string prefix = "population." + std::to_string(i);
        kv(prefix + ".group", p.group);
        if (p.weight) kv(prefix + ".weight", fmt_full(*p.weight));
        kv(prefix + ".frequency", fmt_full(p.frequency));
        kv(prefix + ".lr", fmt_full(p.lr));
    }
    if (r.race_blind_frequency) {
        kv("race_blind.theta", fmt_full(r.race_blind_theta));
        kv("race_blind.frequency", fmt_full(*r.race_blind_frequency));
    }
    if (!r.excluded) {
        kv("general.covered_weight", fmt_full(r.covered_weight));
        kv("general.uncovered_weight", fmt_full(r.uncovered_weight));
        if (r.weighted_frequency) kv("general.weighted_frequency", fmt_full(*r.weighted_frequency));
        if (r.bound_lower) kv("bounds.lower", fmt_full(*r.bound_lower));
        if (r.bound_upper) kv("bounds.upper", fmt_full(*r.bound_upper));
        if (r.most_conservative_frequency) {
            kv("bounds.most_conservative", fmt_full(*r.most_conservative_frequency));
        }
        if (r.sib_bound) kv("bounds.sib", fmt_full(*r.sib_bound));
        if (r.ceiling_bound) {
            kv("bounds.ceiling", fmt_full(*r.ceiling_bound));
            kv("bounds.ceiling_floor", fmt_full(r.ceiling_floor));
        }
        if (!r.sensitivity.empty()) {
            kv("sensitivity.reference", fmt_full(r.sensitivity_reference));
            for (std::size_t i = 0; i < r.sensitivity.size(); ++i) {
                const auto& row = r.sensitivity[i];
                const std::string prefix = "sensitivity." + std::to_string(i);
                kv(prefix + ".k", fmt_full(row.multiplier));
                kv(prefix + ".frequency", fmt_full(row.hypothetical_frequency));
                kv(prefix + ".contribution", fmt_full(row.contribution));
                kv(prefix + ".total", fmt_full(row.total));
            }
        }
        if (r.closed_set) {
            const auto& cs = *r.closed_set;
            kv("closed_set.others", std::to_string(cs.others));
            kv("closed_set.matched", std::to_string(cs.matched));
            kv("closed_set.excluded", std::to_string(cs.excluded));
            kv("closed_set.untested", std::to_string(cs.untested));
            kv("closed_set.coincidence_frequency", fmt_full(cs.coincidence_frequency));
            kv("closed_set.p_evidence_given_suspect", fmt_full(cs.p_evidence_given_suspect));
            const auto& lr = *cs.composite_lr;
            kv("closed_set.lr_numerator", fmt_full(lr.numerator()));
            kv("closed_set.lr_denominator", fmt_full(lr.denominator()));
            if (lr.undefined()) {
                kv("closed_set.lr", "undefined");
            } else if (lr.infinite()) {
                kv("closed_set.lr", "infinite");
            } else {
                kv("closed_set.lr", fmt_full(lr.value()));
            }
        }
    }
    for (std::size_t i = 0; i < r.notes.size(); ++i) {
        kv("note." + std::to_string(i), r.notes[i]);
    }
    return os.str();
}

}  // namespace

std::string emit_report(const MatchReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::text: return emit_text(r);
        case ReportFormat::structured: return emit_structured(r);
    }
    throw ValidationError("unknown report format");
}

std::map<std::string, std::string> parse_structured_report(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, nl - pos);
        if (!line.empty()) {
            std::size_t sep = line.find(" = ");
            if (sep == std::string_view::npos) {
                throw ParseError("structured report line lacks ' = ': " + std::string(line));
            }
            out.emplace(std::string(line.substr(0, sep)), std::string(line.substr(sep + 3)));
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

std::string run_sim_job(const SimJob& job, std::uint64_t seed) {
    SimConfig cfg{seed, job.trials, job.lanes};
    std::ostringstream os;
    auto kv = [&os](const std::string& key, const std::string& value) {
        os << key << " = " << value << '\n';
    };
    kv("seed", std::to_string(seed));
    kv("trials", std::to_string(job.trials));

    auto load_table = [&job]() {
        auto tables = parse_allele_tables(read_file(job.alleles_path));
        if (job.population.empty()) {
            if (tables.size() != 1) {
                throw ValidationError("alleles file holds several populations; set population = ...");
            }
            return tables.front();
        }
        for (auto& t : tables) {
            if (t.population() == job.population) return t;
        }
        throw ValidationError("population '" + job.population + "' not present in '" +
                              job.alleles_path + "'");
    };

    switch (job.mode) {
        case SimJob::Mode::match: {
            kv("mode", "match");
            auto est = estimate_match_probability(*job.target, load_table(), cfg);
            kv("estimate", fmt_full(est.estimate));
            kv("std_error", fmt_full(est.std_error));
            break;
        }
        case SimJob::Mode::sib: {
            kv("mode", "sib");
            auto est = estimate_sib_match_probability(*job.target, load_table(), cfg);
            kv("accepted_families", std::to_string(est.accepted_families));
            if (est.insufficient()) {
                kv("estimate", "insufficient-data");
            } else {
                kv("estimate", fmt_full(est.estimate->estimate));
                kv("std_error", fmt_full(est.estimate->std_error));
            }
            break;
        }
        case SimJob::Mode::building: {
            kv("mode", "building");
            kv("n", std::to_string(job.building_n));
            kv("f", fmt_full(job.building_f));
            auto dist = simulate_closed_building(job.building_n, job.building_f, cfg);
            auto est = dist.only_source_estimate();
            kv("p_only_source", fmt_full(est.estimate));
            kv("std_error", fmt_full(est.std_error));
            break;
        }
    }
    return os.str();
}

}  // namespace flr
