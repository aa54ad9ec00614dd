#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "flr/case_file.hpp"
#include "flr/report.hpp"

using namespace flr;

namespace {

namespace fs = std::filesystem;

struct Workspace {
    fs::path dir;

    Workspace() {
        dir = fs::temp_directory_path() / "flr_case_report_tests";
        fs::create_directories(dir);
    }

    std::string write(const std::string& name, const std::string& content) const {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << content;
        return p.string();
    }
};

const char* kAlleles =
    "population,locus,allele,frequency,two_n\n"
    "CEPH,L1,a,0.2,400\n"
    "CEPH,L1,b,0.1,400\n"
    "CEPH,L1,c,0.7,400\n"
    "CEPH,L2,d,0.1,400\n"
    "CEPH,L2,e,0.3,400\n"
    "CEPH,L2,f,0.6,400\n";

const char* kCensusSingle = "group,percent\nCEPH,100\n";

const char* kKernCensus =
    "group,percent\n"
    "White,49.5\n"
    "Hispanic,38.4\n"
    "Black,6.0\n";

std::string toy_case(const Workspace& ws, const std::string& extra = "") {
    ws.write("alleles.csv", kAlleles);
    ws.write("census.csv", kCensusSingle);
    return std::string("# toy case\n"
                       "evidence.L1 = a/a\n"
                       "evidence.L2 = d/e\n"
                       "suspect.L1 = a/a\n"
                       "suspect.L2 = d/e\n"
                       "alleles.CEPH = alleles.csv\n"
                       "census = census.csv\n") +
           extra;
}

double num(const std::map<std::string, std::string>& kv, const std::string& key) {
    REQUIRE(kv.contains(key));
    return std::strtod(kv.at(key).c_str(), nullptr);
}

}  // namespace

TEST_CASE("toy two-locus case reports LR near 416.7") {
    Workspace ws;
    CaseFile c = parse_case_file_text(toy_case(ws), ws.dir.string());
    MatchReport r = run_case(c);

    CHECK_FALSE(r.excluded);
    REQUIRE(r.populations.size() == 1);
    CHECK(r.populations[0].group == "CEPH");
    CHECK(r.populations[0].frequency == doctest::Approx(0.0024));
    CHECK(r.populations[0].lr == doctest::Approx(416.6667).epsilon(1e-6));
    REQUIRE(r.weighted_frequency.has_value());
    CHECK(*r.weighted_frequency == doctest::Approx(0.0024));
    CHECK(r.sensitivity.empty());
    CHECK(r.race_blind_frequency.has_value());
    CHECK(r.sib_bound.has_value());
    CHECK(r.ceiling_bound.has_value());
    CHECK(*r.sib_bound >= r.populations[0].frequency);
}

TEST_CASE("profile mismatch short-circuits to an exclusion report") {
    Workspace ws;
    std::string text = toy_case(ws);
    const std::string from = "suspect.L2 = d/e";
    text.replace(text.find(from), from.size(), "suspect.L2 = d/f");
    CaseFile c = parse_case_file_text(text, ws.dir.string());
    MatchReport r = run_case(c);

    CHECK(r.excluded);
    CHECK(r.mismatched_loci == std::vector<std::string>{"L2"});
    CHECK(r.populations.empty());
    CHECK_FALSE(r.weighted_frequency.has_value());
    CHECK(r.sensitivity.empty());

    const std::string structured = emit_report(r, ReportFormat::structured);
    auto kv = parse_structured_report(structured);
    CHECK(kv.at("status") == "exclusion");
    for (const auto& [key, value] : kv) {
        CHECK_FALSE(key.starts_with("population."));
        CHECK_FALSE(key.starts_with("bounds."));
        CHECK_FALSE(key.starts_with("general."));
    }
}

TEST_CASE("per-population LRs follow census order and invert the given frequencies") {
    Workspace ws;
    ws.write("kern.csv", kKernCensus);
    const std::string text =
        "evidence.L1 = a/b\n"
        "suspect.L1 = a/b\n"
        "frequency.Black = 1.10e-13\n"     // case order differs from census order
        "frequency.White = 5.26e-13\n"
        "frequency.Hispanic = 3.85e-13\n"
        "census = kern.csv\n";
    CaseFile c = parse_case_file_text(text, ws.dir.string());
    MatchReport r = run_case(c);

    REQUIRE(r.populations.size() == 3);
    CHECK(r.populations[0].group == "White");
    CHECK(r.populations[1].group == "Hispanic");
    CHECK(r.populations[2].group == "Black");
    CHECK(r.populations[0].lr == doctest::Approx(1.9011e12).epsilon(1e-4));
    CHECK(r.populations[1].lr == doctest::Approx(2.5974e12).epsilon(1e-4));
    CHECK(r.populations[2].lr == doctest::Approx(9.0909e12).epsilon(1e-4));

    CHECK(r.covered_weight == doctest::Approx(0.939));
    CHECK(r.uncovered_weight == doctest::Approx(0.061));
    CHECK_FALSE(r.weighted_frequency.has_value());
    REQUIRE(r.sensitivity.size() == 4);  // default multipliers 1, 10, 100, 1000
    CHECK(r.sensitivity_reference == 5.26e-13);
    CHECK(r.bound_lower == 1.10e-13);
    CHECK(r.bound_upper == 5.26e-13);
    CHECK(r.most_conservative_frequency == 5.26e-13);

    // Profile-level mode cannot produce allele-dependent statistics.
    CHECK_FALSE(r.race_blind_frequency.has_value());
    CHECK_FALSE(r.sib_bound.has_value());
    CHECK_FALSE(r.ceiling_bound.has_value());
}

TEST_CASE("structured output round-trips every unrounded value") {
    Workspace ws;
    CaseFile c = parse_case_file_text(toy_case(ws, "theta = 0.01\n"), ws.dir.string());
    MatchReport r = run_case(c);
    auto kv = parse_structured_report(emit_report(r, ReportFormat::structured));

    CHECK(num(kv, "theta") == r.theta);
    CHECK(num(kv, "population.0.frequency") == r.populations[0].frequency);
    CHECK(num(kv, "population.0.lr") == r.populations[0].lr);
    CHECK(num(kv, "general.weighted_frequency") == *r.weighted_frequency);
    CHECK(num(kv, "race_blind.frequency") == *r.race_blind_frequency);
    CHECK(num(kv, "bounds.sib") == *r.sib_bound);
    CHECK(num(kv, "bounds.ceiling") == *r.ceiling_bound);
    CHECK(num(kv, "bounds.most_conservative") == *r.most_conservative_frequency);
}

TEST_CASE("report emission is deterministic") {
    Workspace ws;
    const std::string text = toy_case(ws, "outcome.neighbor = excluded\n");
    CaseFile c1 = parse_case_file_text(text, ws.dir.string());
    CaseFile c2 = parse_case_file_text(text, ws.dir.string());
    CHECK(emit_report(run_case(c1), ReportFormat::structured) ==
          emit_report(run_case(c2), ReportFormat::structured));
    CHECK(emit_report(run_case(c1), ReportFormat::text) ==
          emit_report(run_case(c2), ReportFormat::text));
}

TEST_CASE("text sections appear in the fixed order") {
    Workspace ws;
    CaseFile c = parse_case_file_text(toy_case(ws), ws.dir.string());
    const std::string text = emit_report(run_case(c), ReportFormat::text);
    const char* sections[] = {"== Match ==",   "== Per-population ==", "== General-population ==",
                              "== Bounds ==",  "== Sensitivity ==",    "== Notes =="};
    std::size_t last = 0;
    for (const char* s : sections) {
        const std::size_t pos = text.find(s);
        REQUIRE(pos != std::string::npos);
        CHECK(pos > last);
        last = pos;
    }
    // A per-population LR never appears without a general-population figure.
    CHECK(text.find("weighted frequency:") != std::string::npos);
}

TEST_CASE("closed-set outcomes feed the composite alternative") {
    Workspace ws;
    const std::string text = toy_case(ws,
                                      "outcome.r1 = excluded\n"
                                      "outcome.r2 = excluded\n"
                                      "outcome.r3 = untested\n");
    CaseFile c = parse_case_file_text(text, ws.dir.string());
    MatchReport r = run_case(c);

    REQUIRE(r.closed_set.has_value());
    const auto& cs = *r.closed_set;
    CHECK(cs.others == 3);
    CHECK(cs.excluded == 2);
    CHECK(cs.untested == 1);
    CHECK_FALSE(cs.all_alternatives_excluded);
    CHECK(cs.coincidence_frequency == *r.weighted_frequency);
    // Composite denominator: only the untested alternative contributes,
    // weight 1/3, likelihood f * (1-f)^2.
    const double f = cs.coincidence_frequency;
    const double expected_num = (1.0 - f) * (1.0 - f);
    const double expected_den = (1.0 / 3.0) * f * expected_num;
    REQUIRE(cs.composite_lr.has_value());
    CHECK(cs.composite_lr->numerator() == doctest::Approx(expected_num).epsilon(1e-12));
    CHECK(cs.composite_lr->denominator() == doctest::Approx(expected_den).epsilon(1e-12));
}

TEST_CASE("all alternatives excluded prints the impossibility phrasing") {
    Workspace ws;
    const std::string text = toy_case(ws,
                                      "outcome.r1 = excluded\n"
                                      "outcome.r2 = excluded\n");
    CaseFile c = parse_case_file_text(text, ws.dir.string());
    MatchReport r = run_case(c);

    REQUIRE(r.closed_set.has_value());
    CHECK(r.closed_set->all_alternatives_excluded);
    CHECK(r.closed_set->composite_lr->infinite());

    const std::string rendered = emit_report(r, ReportFormat::text);
    CHECK(rendered.find("all alternatives excluded — evidence impossible under every "
                        "non-suspect hypothesis") != std::string::npos);
    auto kv = parse_structured_report(emit_report(r, ReportFormat::structured));
    CHECK(kv.at("closed_set.lr") == "infinite");
}

TEST_CASE("an undefined ratio renders as the literal token, never NaN") {
    MatchReport r;
    r.loci = {"L1"};
    r.theta = 0.0;
    r.populations.push_back({"X", 1.0, 0.5, 2.0});
    r.bound_lower = 0.5;
    r.bound_upper = 0.5;
    r.most_conservative_frequency = 0.5;
    r.covered_weight = 1.0;
    r.uncovered_weight = 0.0;
    r.weighted_frequency = 0.5;
    ClosedSetResult cs;
    cs.others = 1;
    cs.excluded = 1;
    cs.coincidence_frequency = 0.5;
    cs.p_evidence_given_suspect = 0.0;
    cs.composite_lr = LikelihoodRatio(0.0, 0.0);
    r.closed_set = cs;

    for (auto format : {ReportFormat::text, ReportFormat::structured}) {
        const std::string rendered = emit_report(r, format);
        CHECK(rendered.find("undefined") != std::string::npos);
        CHECK(rendered.find("nan") == std::string::npos);
        CHECK(rendered.find("NaN") == std::string::npos);
    }
    auto kv = parse_structured_report(emit_report(r, ReportFormat::structured));
    CHECK(kv.at("closed_set.lr") == "undefined");
}

TEST_CASE("case-file validation") {
    Workspace ws;
    SUBCASE("unknown key") {
        CHECK_THROWS_AS(parse_case_file_text("bogus = 1\n", ""), ParseError);
    }
    SUBCASE("missing census") {
        const std::string text =
            "evidence.L1 = a/a\nsuspect.L1 = a/a\nfrequency.X = 0.1\n";
        CHECK_THROWS_WITH_AS(parse_case_file_text(text, ""), doctest::Contains("census"),
                             ValidationError);
    }
    SUBCASE("mixing alleles and direct frequencies") {
        const std::string text =
            "evidence.L1 = a/a\nsuspect.L1 = a/a\n"
            "alleles.X = t.csv\nfrequency.Y = 0.1\ncensus = c.csv\n";
        CHECK_THROWS_WITH_AS(parse_case_file_text(text, ""), doctest::Contains("mix"),
                             ValidationError);
    }
    SUBCASE("no population data at all") {
        const std::string text = "evidence.L1 = a/a\nsuspect.L1 = a/a\ncensus = c.csv\n";
        CHECK_THROWS_AS(parse_case_file_text(text, ""), ValidationError);
    }
    SUBCASE("bad genotype syntax") {
        CHECK_THROWS_AS(parse_case_file_text("evidence.L1 = ab\n", ""), ParseError);
    }
    SUBCASE("theta out of range") {
        const std::string text = toy_case(ws, "theta = 1.0\n");
        CHECK_THROWS_AS(parse_case_file_text(text, ws.dir.string()), ValidationError);
    }
    SUBCASE("loci mismatch between evidence and suspect") {
        std::string text = toy_case(ws);
        text += "evidence.L3 = q/q\n";
        CaseFile c = parse_case_file_text(text + "suspect.L3 = q/q\n", ws.dir.string());
        CHECK_NOTHROW(run_case(c));
        CaseFile bad = parse_case_file_text(text, ws.dir.string());
        CHECK_THROWS_WITH_AS(run_case(bad), doctest::Contains("different loci"), ValidationError);
    }
    SUBCASE("reserved individual id") {
        const std::string text = toy_case(ws, "outcome.suspect = excluded\n");
        CaseFile c = parse_case_file_text(text, ws.dir.string());
        CHECK_THROWS_WITH_AS(run_case(c), doctest::Contains("reserved"), ValidationError);
    }
    SUBCASE("missing referenced file is an IoError") {
        const std::string text =
            "evidence.L1 = a/a\nsuspect.L1 = a/a\n"
            "frequency.X = 0.1\ncensus = nowhere.csv\n";
        CaseFile c = parse_case_file_text(text, ws.dir.string());
        CHECK_THROWS_AS(run_case(c), IoError);
    }
    SUBCASE("census must intersect the case groups") {
        ws.write("other_census.csv", "group,percent\nElsewhere,100\n");
        const std::string text =
            "evidence.L1 = a/a\nsuspect.L1 = a/a\n"
            "frequency.X = 0.1\ncensus = other_census.csv\n";
        CaseFile c = parse_case_file_text(text, ws.dir.string());
        CHECK_THROWS_AS(run_case(c), ValidationError);
    }
}

TEST_CASE("multipliers and floor keys are honored") {
    Workspace ws;
    ws.write("kern.csv", kKernCensus);
    const std::string text =
        "evidence.L1 = a/b\n"
        "suspect.L1 = a/b\n"
        "frequency.White = 5.26e-13\n"
        "frequency.Hispanic = 3.85e-13\n"
        "frequency.Black = 1.10e-13\n"
        "census = kern.csv\n"
        "multipliers = 1,5,25\n";
    CaseFile c = parse_case_file_text(text, ws.dir.string());
    CHECK(c.multipliers == std::vector<double>{1.0, 5.0, 25.0});
    MatchReport r = run_case(c);
    REQUIRE(r.sensitivity.size() == 3);
    CHECK(r.sensitivity[2].multiplier == 25.0);

    CaseFile with_floor = parse_case_file_text(toy_case(ws, "floor = 0.2\n"), ws.dir.string());
    CHECK(with_floor.ceiling_floor == 0.2);
    MatchReport r2 = run_case(with_floor);
    // Floor 0.2 dominates every ceiling allele: (0.2^2) * (2 * 0.2 * 0.3...)
    CHECK(*r2.ceiling_bound >= 0.2 * 0.2 * 2.0 * 0.2 * 0.2);
}

TEST_CASE("unknown report format is rejected") {
    CHECK(parse_format("text") == ReportFormat::text);
    CHECK(parse_format("structured") == ReportFormat::structured);
    CHECK_THROWS_AS(parse_format("yaml"), ValidationError);
}

TEST_CASE("sim jobs parse and run deterministically") {
    Workspace ws;
    ws.write("alleles.csv", kAlleles);
    const std::string cfg =
        "mode = match\n"
        "trials = 200000\n"
        "alleles = alleles.csv\n"
        "population = CEPH\n"
        "target.L1 = a/a\n";
    SimJob job = parse_sim_job_text(cfg, ws.dir.string());
    CHECK(job.mode == SimJob::Mode::match);
    CHECK(job.trials == 200000);

    const std::string out1 = run_sim_job(job, 99);
    const std::string out2 = run_sim_job(job, 99);
    CHECK(out1 == out2);
    CHECK(out1.find("estimate = ") != std::string::npos);

    auto kv = parse_structured_report(out1);
    const double est = std::strtod(kv.at("estimate").c_str(), nullptr);
    CHECK(est == doctest::Approx(0.04).epsilon(0.05));  // p^2 at p = 0.2

    SUBCASE("building job") {
        const std::string bcfg = "mode = building\ntrials = 100000\nn = 3\nf = 0.5\n";
        SimJob b = parse_sim_job_text(bcfg, "");
        const std::string out = run_sim_job(b, 7);
        auto bkv = parse_structured_report(out);
        CHECK(std::strtod(bkv.at("p_only_source").c_str(), nullptr) ==
              doctest::Approx(0.125).epsilon(0.05));
    }
    SUBCASE("sim config validation") {
        CHECK_THROWS_AS(parse_sim_job_text("trials = 10\n", ""), ValidationError);
        CHECK_THROWS_AS(parse_sim_job_text("mode = warp\n", ""), ParseError);
        CHECK_THROWS_AS(parse_sim_job_text("mode = match\ntrials = 10\n", ""), ValidationError);
        CHECK_THROWS_AS(
            parse_sim_job_text("mode = building\ntrials = 10\ntarget.L1 = a/a\n", ""),
            ValidationError);
    }
}
