#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flr/errors.hpp"
#include "flr/likelihood_engine.hpp"
#include "flr/match_stats.hpp"

namespace flr {

// A case description, parsed from a flat key-value file:
//
//   evidence.<locus> = a1/a2        genotype of the crime-scene profile
//   suspect.<locus>  = a1/a2        genotype of the reference profile
//   outcome.<id>     = matched|excluded|untested   other tested individuals
//   alleles.<group>  = <csv-path>   per-group allele-frequency table
//   frequency.<group> = <f>         per-group profile frequency, given directly
//   census           = <csv-path>   group,percent table
//   theta            = <v>          coancestry coefficient, default 0
//   multipliers      = k1,k2,...    sensitivity multipliers, default 1,10,100,1000
//   floor            = <v>          ceiling-bound allele floor, default 0.05
//
// '#' comment lines and blank lines are ignored. Relative paths resolve
// against the case file's directory. alleles.* and frequency.* keys cannot be
// mixed in one case.
struct CaseFile {
    MultiLocusProfile evidence;
    MultiLocusProfile suspect;
    std::vector<TestOutcome> outcomes;                            // non-suspect individuals
    std::vector<std::pair<std::string, std::string>> allele_files;  // group -> path
    std::vector<std::pair<std::string, double>> direct_frequencies; // group -> f
    std::string census_path;
    double theta = 0.0;
    std::vector<double> multipliers{1.0, 10.0, 100.0, 1000.0};
    double ceiling_floor = 0.05;
};

CaseFile parse_case_file(const std::string& path);
CaseFile parse_case_file_text(std::string_view text, const std::string& base_dir);

// A simulation request for the `simulate` subcommand, parsed from the same
// key-value syntax:
//
//   mode    = match | sib | building
//   trials  = <n>
//   lanes   = <n>                       optional, default 1
//   alleles = <csv-path>                match|sib modes
//   population = <group>                selects the table when the file has several
//   target.<locus> = a1/a2              match|sib modes
//   n = <count>   f = <prob>            building mode
struct SimJob {
    enum class Mode { match, sib, building };

    Mode mode = Mode::match;
    long trials = 100000;
    int lanes = 1;
    std::string alleles_path;
    std::string population;
    std::optional<MultiLocusProfile> target;
    int building_n = 1;
    double building_f = 0.5;
};

SimJob parse_sim_job(const std::string& path);
SimJob parse_sim_job_text(std::string_view text, const std::string& base_dir);

// Low-level key-value reader shared by the formats above: returns (key,
// value) pairs in file order. Throws ParseError on lines without '='.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

// "a1/a2" -> Genotype at the given locus.
Genotype parse_genotype(const std::string& locus, std::string_view value);

std::string read_file(const std::string& path);  // throws IoError

}  // namespace flr
