#include "flr/case_file.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace flr {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double to_double(std::string_view v, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError("non-numeric value '" + std::string(v) + "' for key '" + key + "'");
    }
    return out;
}

long to_long(std::string_view v, const std::string& key) {
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError("non-integer value '" + std::string(v) + "' for key '" + key + "'");
    }
    return out;
}

std::vector<double> to_multipliers(std::string_view v, const std::string& key) {
    std::vector<double> out;
    std::size_t start = 0;
    const std::string s(v);
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string_view field = trim(std::string_view(s).substr(
            start, comma == std::string::npos ? std::string::npos : comma - start));
        if (field.empty()) throw ParseError("empty entry in '" + key + "'");
        out.push_back(to_double(field, key));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ParseError("no values for key '" + key + "'");
    return out;
}

std::string resolve(const std::string& base_dir, std::string_view path) {
    std::filesystem::path p{std::string(path)};
    if (p.is_absolute() || base_dir.empty()) return p.string();
    return (std::filesystem::path(base_dir) / p).string();
}

Outcome parse_outcome(std::string_view v, const std::string& key) {
    if (v == "matched") return Outcome::matched;
    if (v == "excluded") return Outcome::excluded;
    if (v == "untested") return Outcome::untested;
    throw ParseError("outcome for '" + key + "' must be matched, excluded or untested");
}

MultiLocusProfile build_profile(const std::vector<Genotype>& genotypes, const char* which) {
    if (genotypes.empty()) {
        throw ValidationError(std::string("case file defines no ") + which + " profile");
    }
    return MultiLocusProfile(genotypes);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, nl - pos);
        ++line_no;
        std::string_view t = trim(line);
        if (!t.empty() && t.front() != '#') {
            std::size_t eq = t.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
            }
            std::string key{trim(t.substr(0, eq))};
            std::string value{trim(t.substr(eq + 1))};
            if (key.empty()) {
                throw ParseError("line " + std::to_string(line_no) + ": empty key");
            }
            out.emplace_back(std::move(key), std::move(value));
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

Genotype parse_genotype(const std::string& locus, std::string_view value) {
    std::size_t slash = value.find('/');
    if (slash == std::string_view::npos) {
        throw ParseError("genotype for locus '" + locus + "' must look like a1/a2");
    }
    std::string a{trim(value.substr(0, slash))};
    std::string b{trim(value.substr(slash + 1))};
    if (a.empty() || b.empty()) {
        throw ParseError("genotype for locus '" + locus + "' must look like a1/a2");
    }
    return {locus, std::move(a), std::move(b)};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path + "'");
    return os.str();
}

CaseFile parse_case_file(const std::string& path) {
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_case_file_text(read_file(path), dir);
}

CaseFile parse_case_file_text(std::string_view text, const std::string& base_dir) {
    std::vector<Genotype> evidence, suspect;
    std::vector<TestOutcome> outcomes;
    std::vector<std::pair<std::string, std::string>> allele_files;
    std::vector<std::pair<std::string, double>> direct_frequencies;
    std::string census_path;
    double theta = 0.0;
    std::vector<double> multipliers{1.0, 10.0, 100.0, 1000.0};
    double ceiling_floor = 0.05;

    for (const auto& [key, value] : parse_key_values(text)) {
        if (key.starts_with("evidence.")) {
            evidence.push_back(parse_genotype(key.substr(9), value));
        } else if (key.starts_with("suspect.")) {
            suspect.push_back(parse_genotype(key.substr(8), value));
        } else if (key.starts_with("outcome.")) {
            outcomes.push_back({key.substr(8), parse_outcome(value, key)});
        } else if (key.starts_with("alleles.")) {
            allele_files.emplace_back(key.substr(8), resolve(base_dir, value));
        } else if (key.starts_with("frequency.")) {
            double f = to_double(value, key);
            if (!(f > 0.0) || f > 1.0) {
                throw ValidationError("frequency for '" + key + "' outside (0,1]");
            }
            direct_frequencies.emplace_back(key.substr(10), f);
        } else if (key == "census") {
            census_path = resolve(base_dir, value);
        } else if (key == "theta") {
            theta = Theta(to_double(value, key)).value;
        } else if (key == "multipliers") {
            multipliers = to_multipliers(value, key);
        } else if (key == "floor") {
            ceiling_floor = to_double(value, key);
            if (!(ceiling_floor > 0.0) || ceiling_floor > 1.0) {
                throw ValidationError("floor outside (0,1]");
            }
        } else {
            throw ParseError("unknown case-file key '" + key + "'");
        }
    }

    if (!allele_files.empty() && !direct_frequencies.empty()) {
        throw ValidationError("a case cannot mix alleles.<group> and frequency.<group> keys");
    }
    if (allele_files.empty() && direct_frequencies.empty()) {
        throw ValidationError("case file names no population data (alleles.* or frequency.*)");
    }
    if (census_path.empty()) {
        throw ValidationError("case file names no census table");
    }

    CaseFile c{build_profile(evidence, "evidence"),
               build_profile(suspect, "suspect"),
               std::move(outcomes),
               std::move(allele_files),
               std::move(direct_frequencies),
               std::move(census_path),
               theta,
               std::move(multipliers),
               ceiling_floor};
    return c;
}

SimJob parse_sim_job(const std::string& path) {
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_sim_job_text(read_file(path), dir);
}

SimJob parse_sim_job_text(std::string_view text, const std::string& base_dir) {
    SimJob job;
    bool mode_set = false;
    std::vector<Genotype> target;

    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "mode") {
            mode_set = true;
            if (value == "match") {
                job.mode = SimJob::Mode::match;
            } else if (value == "sib") {
                job.mode = SimJob::Mode::sib;
            } else if (value == "building") {
                job.mode = SimJob::Mode::building;
            } else {
                throw ParseError("mode must be match, sib or building");
            }
        } else if (key == "trials") {
            job.trials = to_long(value, key);
        } else if (key == "lanes") {
            job.lanes = static_cast<int>(to_long(value, key));
        } else if (key == "alleles") {
            job.alleles_path = resolve(base_dir, value);
        } else if (key == "population") {
            job.population = value;
        } else if (key.starts_with("target.")) {
            target.push_back(parse_genotype(key.substr(7), value));
        } else if (key == "n") {
            job.building_n = static_cast<int>(to_long(value, key));
        } else if (key == "f") {
            job.building_f = to_double(value, key);
        } else {
            throw ParseError("unknown sim-config key '" + key + "'");
        }
    }

    if (!mode_set) throw ValidationError("sim config names no mode");
    if (job.trials < 1) throw ValidationError("trials must be at least 1");
    if (job.mode == SimJob::Mode::building) {
        if (!target.empty()) throw ValidationError("building mode takes no target");
    } else {
        if (job.alleles_path.empty()) throw ValidationError("match/sib modes need an alleles table");
        if (target.empty()) throw ValidationError("match/sib modes need target.<locus> keys");
        job.target = MultiLocusProfile(std::move(target));
    }
    return job;
}

}  // namespace flr
