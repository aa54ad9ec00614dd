#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flr/errors.hpp"

namespace flr {

// Allele-frequency estimates for one population group.
//
// Frequencies are point estimates in (0,1]. two_n, when known, is the number
// of sampled allele copies (2N) behind a locus's estimates; it drives the
// 5/(2N) rare-allele floor and the 95% upper confidence bound used by the
// ceiling computation.
//
// Tables are treated as immutable once built: every operation in the library
// takes them by const reference and returns modified copies, so a table can
// be shared freely across threads.
class PopulationTable {
public:
    struct LocusData {
        std::map<std::string, double> frequencies;  // allele label -> frequency
        std::optional<long> two_n;                  // sampled allele copies, > 0

        bool operator==(const LocusData&) const = default;
    };

    PopulationTable() = default;
    explicit PopulationTable(std::string population) : population_(std::move(population)) {}

    const std::string& population() const { return population_; }

    bool has_locus(const std::string& locus) const;
    std::optional<double> allele_frequency(const std::string& locus, const std::string& allele) const;
    std::optional<long> two_n(const std::string& locus) const;

    std::vector<std::string> loci() const;
    // Throws ValidationError when the locus is absent.
    const LocusData& locus_data(const std::string& locus) const;

    void set_frequency(const std::string& locus, const std::string& allele, double frequency);
    void set_two_n(const std::string& locus, long two_n);

    bool empty() const { return loci_.empty(); }
    const std::map<std::string, LocusData>& data() const { return loci_; }

    bool operator==(const PopulationTable&) const = default;

private:
    std::string population_;
    std::map<std::string, LocusData> loci_;
};

// Census population-group proportions, ordered as given.
// Each proportion lies in [0,1]; the total never exceeds 1 (+1e-9); a total
// below 1 means part of the population is not covered by any listed group.
class CensusWeights {
public:
    struct Entry {
        std::string group;
        double proportion;

        bool operator==(const Entry&) const = default;
    };

    CensusWeights() = default;

    // Throws ValidationError on duplicate labels, out-of-range proportions,
    // or a total above 1 + 1e-9.
    void add(std::string group, double proportion);

    const std::vector<Entry>& entries() const { return entries_; }
    std::optional<double> proportion(const std::string& group) const;
    double covered_total() const;
    bool empty() const { return entries_.empty(); }

    bool operator==(const CensusWeights&) const = default;

private:
    std::vector<Entry> entries_;
};

enum class Severity { warning, error };

struct Finding {
    Severity severity;
    std::string locus;
    std::string message;
};

// Findings are data, not failures; error findings block downstream use.
struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const;
    std::size_t error_count() const;
    std::string to_string() const;
};

struct LocusAllele {
    std::string locus;
    std::string allele;

    auto operator<=>(const LocusAllele&) const = default;
};

// CSV schema (UTF-8, comma-separated, '#' comment lines ignored):
//   population,locus,allele,frequency,two_n
// one row per (population, locus, allele); frequency decimal in (0,1];
// two_n optional positive integer, consistent across a locus's rows.
//
// parse_allele_tables accepts any number of population labels and returns one
// table per label in first-appearance order. parse_allele_table requires
// exactly one label.
std::vector<PopulationTable> parse_allele_tables(std::string_view csv_text);
PopulationTable parse_allele_table(std::string_view csv_text);
std::string serialize_allele_table(const PopulationTable& table);
std::string serialize_allele_tables(const std::vector<PopulationTable>& tables);

// Error finding when any per-locus frequency sum exceeds 1 + 1e-9 or any
// frequency is non-positive; warning when a per-locus sum falls below 0.9
// (probable missing rare alleles). Nothing else is flagged.
ValidationReport validate_table(const PopulationTable& table);

// Returns a copy in which every listed evidence allele has frequency at least
// 5/(2N) for its locus: alleles absent from the table, or observed below the
// floor, are raised to it. Entries not named in evidence_alleles are never
// touched. An allele that is present but whose locus lacks two_n is left as
// observed; an absent allele with unknown two_n is an error, as is a locus
// missing from the table entirely.
PopulationTable apply_min_allele_floor(const PopulationTable& table,
                                       const std::vector<LocusAllele>& evidence_alleles);

// Census CSV schema: header `group,percent`; percent decimal in [0,100].
// Percentages are converted to proportions; order is preserved.
CensusWeights parse_census_weights(std::string_view csv_text);
std::string serialize_census_weights(const CensusWeights& weights);

}  // namespace flr
