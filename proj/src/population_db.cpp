#include "flr/population_db.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace flr {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kLowSumWarning = 0.9;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

bool is_comment_or_blank(std::string_view line) {
    std::string_view t = trim(line);
    return t.empty() || t.front() == '#';
}

double parse_double(std::string_view field, int line_no, const char* what) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric " + what + " '" +
                         std::string(field) + "'");
    }
    return v;
}

long parse_long(std::string_view field, int line_no, const char* what) {
    long v = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("line " + std::to_string(line_no) + ": non-integer " + what + " '" +
                         std::string(field) + "'");
    }
    return v;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Yields (line_no, content) for each non-comment line.
std::vector<std::pair<int, std::string_view>> content_lines(std::string_view text) {
    std::vector<std::pair<int, std::string_view>> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, nl - pos);
        ++line_no;
        if (!is_comment_or_blank(line)) out.emplace_back(line_no, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

void expect_header(const std::vector<std::string_view>& fields,
                   const std::vector<std::string_view>& expected, int line_no) {
    bool ok = fields.size() == expected.size();
    for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = fields[i] == expected[i];
    if (!ok) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) want += ',';
            want += expected[i];
        }
        throw ParseError("line " + std::to_string(line_no) + ": expected header '" + want + "'");
    }
}

}  // namespace

bool PopulationTable::has_locus(const std::string& locus) const {
    return loci_.contains(locus);
}

std::optional<double> PopulationTable::allele_frequency(const std::string& locus,
                                                        const std::string& allele) const {
    auto it = loci_.find(locus);
    if (it == loci_.end()) return std::nullopt;
    auto jt = it->second.frequencies.find(allele);
    if (jt == it->second.frequencies.end()) return std::nullopt;
    return jt->second;
}

std::optional<long> PopulationTable::two_n(const std::string& locus) const {
    auto it = loci_.find(locus);
    if (it == loci_.end()) return std::nullopt;
    return it->second.two_n;
}

std::vector<std::string> PopulationTable::loci() const {
    std::vector<std::string> out;
    out.reserve(loci_.size());
    for (const auto& [name, _] : loci_) out.push_back(name);
    return out;
}

const PopulationTable::LocusData& PopulationTable::locus_data(const std::string& locus) const {
    auto it = loci_.find(locus);
    if (it == loci_.end()) {
        throw ValidationError("locus '" + locus + "' absent from table '" + population_ + "'");
    }
    return it->second;
}

void PopulationTable::set_frequency(const std::string& locus, const std::string& allele,
                                    double frequency) {
    loci_[locus].frequencies[allele] = frequency;
}

void PopulationTable::set_two_n(const std::string& locus, long two_n) {
    if (two_n <= 0) throw ValidationError("sample size must be positive for locus '" + locus + "'");
    loci_[locus].two_n = two_n;
}

void CensusWeights::add(std::string group, double proportion) {
    if (group.empty()) throw ValidationError("empty census group label");
    if (proportion < 0.0 || proportion > 1.0) {
        throw ValidationError("census proportion for '" + group + "' outside [0,1]");
    }
    for (const auto& e : entries_) {
        if (e.group == group) throw ValidationError("duplicate census group '" + group + "'");
    }
    if (covered_total() + proportion > 1.0 + kSumTolerance) {
        throw ValidationError("census proportions sum above 1");
    }
    entries_.push_back({std::move(group), proportion});
}

std::optional<double> CensusWeights::proportion(const std::string& group) const {
    for (const auto& e : entries_) {
        if (e.group == group) return e.proportion;
    }
    return std::nullopt;
}

double CensusWeights::covered_total() const {
    double total = 0.0;
    for (const auto& e : entries_) total += e.proportion;
    return total;
}

bool ValidationReport::ok() const {
    return error_count() == 0;
}

std::size_t ValidationReport::error_count() const {
    std::size_t n = 0;
    for (const auto& f : findings) {
        if (f.severity == Severity::error) ++n;
    }
    return n;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& f : findings) {
        os << (f.severity == Severity::error ? "error" : "warning") << " [" << f.locus
           << "]: " << f.message << '\n';
    }
    return os.str();
}

std::vector<PopulationTable> parse_allele_tables(std::string_view csv_text) {
    auto lines = content_lines(csv_text);
    if (lines.empty()) throw ParseError("empty allele table");
    expect_header(split_fields(lines.front().second),
                  {"population", "locus", "allele", "frequency", "two_n"}, lines.front().first);

    std::vector<PopulationTable> tables;
    auto table_for = [&tables](std::string_view population) -> PopulationTable& {
        for (auto& t : tables) {
            if (t.population() == population) return t;
        }
        tables.emplace_back(std::string(population));
        return tables.back();
    };

    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [line_no, line] = lines[i];
        auto f = split_fields(line);
        if (f.size() != 4 && f.size() != 5) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 4 or 5 fields, got " +
                             std::to_string(f.size()));
        }
        if (f[0].empty() || f[1].empty() || f[2].empty()) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": population, locus and allele must be non-empty");
        }
        double freq = parse_double(f[3], line_no, "frequency");
        if (!(freq > 0.0) || freq > 1.0) {
            throw ParseError("line " + std::to_string(line_no) + ": frequency outside (0,1]");
        }
        if (!seen.insert({std::string(f[0]), std::string(f[1]), std::string(f[2])}).second) {
            throw ParseError("line " + std::to_string(line_no) + ": duplicate allele row (" +
                             std::string(f[0]) + "," + std::string(f[1]) + "," + std::string(f[2]) +
                             ")");
        }
        PopulationTable& t = table_for(f[0]);
        t.set_frequency(std::string(f[1]), std::string(f[2]), freq);
        if (f.size() == 5 && !f[4].empty()) {
            long two_n = parse_long(f[4], line_no, "two_n");
            if (two_n <= 0) {
                throw ParseError("line " + std::to_string(line_no) + ": two_n must be positive");
            }
            auto prev = t.two_n(std::string(f[1]));
            if (prev && *prev != two_n) {
                throw ParseError("line " + std::to_string(line_no) + ": inconsistent two_n for locus '" +
                                 std::string(f[1]) + "'");
            }
            t.set_two_n(std::string(f[1]), two_n);
        }
    }
    if (tables.empty()) throw ParseError("allele table has a header but no rows");
    return tables;
}

PopulationTable parse_allele_table(std::string_view csv_text) {
    auto tables = parse_allele_tables(csv_text);
    if (tables.size() != 1) {
        throw ValidationError("expected a single population, found " + std::to_string(tables.size()));
    }
    return std::move(tables.front());
}

std::string serialize_allele_table(const PopulationTable& table) {
    return serialize_allele_tables({table});
}

std::string serialize_allele_tables(const std::vector<PopulationTable>& tables) {
    std::ostringstream os;
    os << "population,locus,allele,frequency,two_n\n";
    for (const auto& t : tables) {
        for (const auto& [locus, data] : t.data()) {
            for (const auto& [allele, freq] : data.frequencies) {
                os << t.population() << ',' << locus << ',' << allele << ',' << fmt_full(freq) << ',';
                if (data.two_n) os << *data.two_n;
                os << '\n';
            }
        }
    }
    return os.str();
}

ValidationReport validate_table(const PopulationTable& table) {
    ValidationReport report;
    for (const auto& [locus, data] : table.data()) {
        double sum = 0.0;
        bool nonpositive = false;
        for (const auto& [allele, freq] : data.frequencies) {
            sum += freq;
            if (!(freq > 0.0)) {
                nonpositive = true;
                report.findings.push_back({Severity::error, locus,
                                           "non-positive frequency for allele '" + allele + "'"});
            }
        }
        if (sum > 1.0 + kSumTolerance) {
            report.findings.push_back(
                {Severity::error, locus, "allele frequencies sum to " + fmt_full(sum) + " > 1"});
        } else if (!nonpositive && sum < kLowSumWarning) {
            report.findings.push_back({Severity::warning, locus,
                                       "allele frequencies sum to " + fmt_full(sum) +
                                           " < 0.9; rare alleles may be missing"});
        }
    }
    return report;
}

PopulationTable apply_min_allele_floor(const PopulationTable& table,
                                       const std::vector<LocusAllele>& evidence_alleles) {
    PopulationTable out = table;
    for (const auto& ev : evidence_alleles) {
        if (!out.has_locus(ev.locus)) {
            throw ValidationError("locus '" + ev.locus + "' absent from table '" +
                                  table.population() + "'");
        }
        auto observed = out.allele_frequency(ev.locus, ev.allele);
        auto two_n = out.two_n(ev.locus);
        if (!two_n) {
            if (!observed) {
                throw ValidationError("allele '" + ev.allele + "' absent at locus '" + ev.locus +
                                      "' and sample size unknown; no floor can be applied");
            }
            continue;  // observed estimate stands; no floor is computable
        }
        const double floor = 5.0 / static_cast<double>(*two_n);
        const double base = observed.value_or(0.0);
        out.set_frequency(ev.locus, ev.allele, std::max(base, floor));
    }
    return out;
}

CensusWeights parse_census_weights(std::string_view csv_text) {
    auto lines = content_lines(csv_text);
    if (lines.empty()) throw ParseError("empty census table");
    expect_header(split_fields(lines.front().second), {"group", "percent"}, lines.front().first);

    CensusWeights weights;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [line_no, line] = lines[i];
        auto f = split_fields(line);
        if (f.size() != 2) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 2 fields, got " +
                             std::to_string(f.size()));
        }
        if (f[0].empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty group label");
        }
        double percent = parse_double(f[1], line_no, "percent");
        if (percent < 0.0) {
            throw ParseError("line " + std::to_string(line_no) + ": negative percentage");
        }
        if (percent > 100.0) {
            throw ParseError("line " + std::to_string(line_no) + ": percentage above 100");
        }
        try {
            weights.add(std::string(f[0]), percent / 100.0);
        } catch (const ValidationError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (weights.empty()) throw ParseError("census table has a header but no rows");
    return weights;
}

std::string serialize_census_weights(const CensusWeights& weights) {
    std::ostringstream os;
    os << "group,percent\n";
    for (const auto& e : weights.entries()) {
        os << e.group << ',' << fmt_full(e.proportion * 100.0) << '\n';
    }
    return os.str();
}

}  // namespace flr
