#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <string>

#include "flr/population_db.hpp"

using namespace flr;

namespace {

const char* kHeader = "population,locus,allele,frequency,two_n\n";

std::string with_header(const std::string& rows) {
    return kHeader + rows;
}

}  // namespace

TEST_CASE("single row parses to a one-allele table") {
    auto t = parse_allele_table(with_header("CEPH,D3S1358,15,0.25,400"));
    CHECK(t.population() == "CEPH");
    CHECK(t.loci() == std::vector<std::string>{"D3S1358"});
    CHECK(t.allele_frequency("D3S1358", "15") == 0.25);
    CHECK(t.two_n("D3S1358") == 400);
}

TEST_CASE("over-full locus parses; validation flags it later") {
    auto t = parse_allele_table(with_header("X,L1,a,0.6,\nX,L1,b,0.6,"));
    CHECK(t.allele_frequency("L1", "a") == 0.6);
    auto report = validate_table(t);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].severity == Severity::error);
    CHECK(report.findings[0].locus == "L1");
}

TEST_CASE("out-of-range frequencies are parse errors") {
    CHECK_THROWS_WITH_AS(parse_allele_table(with_header("X,L1,a,-0.1,")),
                         doctest::Contains("frequency outside (0,1]"), ParseError);
    CHECK_THROWS_AS(parse_allele_table(with_header("X,L1,a,0,")), ParseError);
    CHECK_THROWS_AS(parse_allele_table(with_header("X,L1,a,1.5,")), ParseError);
}

TEST_CASE("malformed rows are parse errors") {
    CHECK_THROWS_AS(parse_allele_table(with_header("X,L1,a")), ParseError);
    CHECK_THROWS_AS(parse_allele_table(with_header("X,L1,a,zero,")), ParseError);
    CHECK_THROWS_AS(parse_allele_table(with_header("X,L1,a,0.2,400,extra")), ParseError);
    CHECK_THROWS_AS(parse_allele_table(with_header("X,,a,0.2,")), ParseError);
    CHECK_THROWS_AS(parse_allele_table("locus,allele\nL1,a\n"), ParseError);
    CHECK_THROWS_AS(parse_allele_table(""), ParseError);
    CHECK_THROWS_AS(parse_allele_table(kHeader), ParseError);
}

TEST_CASE("duplicate (population, locus, allele) rows are rejected") {
    CHECK_THROWS_WITH_AS(parse_allele_table(with_header("X,L1,a,0.2,\nX,L1,a,0.3,")),
                         doctest::Contains("duplicate"), ParseError);
}

TEST_CASE("inconsistent two_n within a locus is rejected") {
    CHECK_THROWS_WITH_AS(parse_allele_table(with_header("X,L1,a,0.2,400\nX,L1,b,0.3,500")),
                         doctest::Contains("two_n"), ParseError);
    CHECK_THROWS_AS(parse_allele_table(with_header("X,L1,a,0.2,-4")), ParseError);
}

TEST_CASE("comments and blank lines are ignored") {
    auto t = parse_allele_table("# FBI sample\n\n" + std::string(kHeader) +
                                "X,L1,a,0.2,400\n# mid comment\nX,L1,b,0.8,400\n");
    CHECK(t.allele_frequency("L1", "b") == 0.8);
}

TEST_CASE("a file may hold several populations") {
    auto tables = parse_allele_tables(with_header("A,L1,a,0.2,\nB,L1,a,0.4,\nA,L1,b,0.8,"));
    REQUIRE(tables.size() == 2);
    CHECK(tables[0].population() == "A");  // first-appearance order
    CHECK(tables[1].population() == "B");
    CHECK(tables[0].allele_frequency("L1", "b") == 0.8);
    CHECK_THROWS_AS(parse_allele_table(with_header("A,L1,a,0.2,\nB,L1,a,0.4,")), ValidationError);
}

TEST_CASE("validation thresholds") {
    PopulationTable t("X");

    SUBCASE("exact simplex point is clean") {
        t.set_frequency("L1", "a", 0.5);
        t.set_frequency("L1", "b", 0.5);
        CHECK(validate_table(t).findings.empty());
    }
    SUBCASE("sum 1.1 is an error") {
        t.set_frequency("L1", "a", 0.5);
        t.set_frequency("L1", "b", 0.6);
        auto r = validate_table(t);
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].severity == Severity::error);
        CHECK_FALSE(r.ok());
    }
    SUBCASE("sum 0.7 is a warning") {
        t.set_frequency("L1", "a", 0.4);
        t.set_frequency("L1", "b", 0.3);
        auto r = validate_table(t);
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].severity == Severity::warning);
        CHECK(r.ok());
    }
    SUBCASE("non-positive programmatic frequency is an error") {
        t.set_frequency("L1", "a", 0.0);
        t.set_frequency("L1", "b", 0.95);
        auto r = validate_table(t);
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].severity == Severity::error);
    }
    SUBCASE("only violating loci are flagged") {
        t.set_frequency("L1", "a", 1.0);
        t.set_frequency("L2", "a", 0.5);
        t.set_frequency("L2", "b", 0.6);
        t.set_frequency("L3", "a", 0.2);
        auto r = validate_table(t);
        REQUIRE(r.findings.size() == 2);
        CHECK(r.findings[0].locus == "L2");
        CHECK(r.findings[1].locus == "L3");
    }
}

TEST_CASE("minimum allele floor") {
    PopulationTable t("X");
    t.set_frequency("L1", "a", 0.001);
    t.set_frequency("L1", "b", 0.25);
    t.set_two_n("L1", 400);
    t.set_frequency("L2", "a", 0.5);
    t.set_two_n("L2", 200);
    t.set_frequency("L3", "a", 0.4);  // no two_n

    SUBCASE("below-floor allele is raised to 5/(2N)") {
        auto out = apply_min_allele_floor(t, {{"L1", "a"}});
        CHECK(out.allele_frequency("L1", "a") == 5.0 / 400.0);
        CHECK(out.allele_frequency("L1", "b") == 0.25);  // untouched
    }
    SUBCASE("above-floor allele is unchanged") {
        auto out = apply_min_allele_floor(t, {{"L1", "b"}});
        CHECK(out.allele_frequency("L1", "b") == 0.25);
    }
    SUBCASE("absent allele is inserted at the floor") {
        auto out = apply_min_allele_floor(t, {{"L2", "q"}});
        CHECK(out.allele_frequency("L2", "q") == 0.025);
    }
    SUBCASE("absent locus is an error") {
        CHECK_THROWS_AS(apply_min_allele_floor(t, {{"L9", "a"}}), ValidationError);
    }
    SUBCASE("absent allele with unknown sample size is an error") {
        CHECK_THROWS_WITH_AS(apply_min_allele_floor(t, {{"L3", "q"}}),
                             doctest::Contains("sample size unknown"), ValidationError);
    }
    SUBCASE("present allele with unknown sample size stands as observed") {
        auto out = apply_min_allele_floor(t, {{"L3", "a"}});
        CHECK(out.allele_frequency("L3", "a") == 0.4);
    }
}

TEST_CASE("floored evidence alleles always reach 5/(2N)") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> freq(1e-5, 0.3);
    std::uniform_int_distribution<int> copies(50, 1000);
    for (int trial = 0; trial < 200; ++trial) {
        PopulationTable t("X");
        std::vector<LocusAllele> evidence;
        for (int l = 0; l < 3; ++l) {
            const std::string locus = "L" + std::to_string(l);
            t.set_frequency(locus, "a", freq(gen));
            t.set_frequency(locus, "b", freq(gen));
            t.set_two_n(locus, copies(gen));
            evidence.push_back({locus, "a"});
            evidence.push_back({locus, gen() % 2 ? "b" : "c"});
        }
        auto out = apply_min_allele_floor(t, evidence);
        for (const auto& ev : evidence) {
            const double floor = 5.0 / static_cast<double>(*out.two_n(ev.locus));
            CHECK(*out.allele_frequency(ev.locus, ev.allele) >= floor);
        }
    }
}

TEST_CASE("census weights parse") {
    SUBCASE("Kern County rows") {
        auto w = parse_census_weights("group,percent\nWhite,49.5\nHispanic,38.4\nBlack,6.0\n");
        REQUIRE(w.entries().size() == 3);
        CHECK(w.entries()[0].proportion == doctest::Approx(0.495));
        CHECK(w.entries()[1].proportion == doctest::Approx(0.384));
        CHECK(w.entries()[2].proportion == doctest::Approx(0.060));
        CHECK(w.covered_total() == doctest::Approx(0.939));
    }
    SUBCASE("USA rows") {
        auto w = parse_census_weights("group,percent\nWhite,69.1\nHispanic,12.5\nBlack,12.3\n");
        CHECK(w.covered_total() == doctest::Approx(0.939));
    }
    SUBCASE("single full-coverage row") {
        auto w = parse_census_weights("group,percent\nEveryone,100\n");
        REQUIRE(w.entries().size() == 1);
        CHECK(w.entries()[0].proportion == 1.0);
    }
    SUBCASE("negative entry") {
        CHECK_THROWS_AS(parse_census_weights("group,percent\nA,-3\n"), ParseError);
    }
    SUBCASE("sum above 100") {
        CHECK_THROWS_AS(parse_census_weights("group,percent\nA,60\nB,50\n"), ParseError);
    }
    SUBCASE("duplicate group") {
        CHECK_THROWS_AS(parse_census_weights("group,percent\nA,30\nA,30\n"), ParseError);
    }
    SUBCASE("order preserved") {
        auto w = parse_census_weights("group,percent\nZ,10\nA,20\n");
        CHECK(w.entries()[0].group == "Z");
        CHECK(w.entries()[1].group == "A");
    }
}

TEST_CASE("serialize then parse is the identity") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> freq(0.01, 0.45);
    std::uniform_int_distribution<int> copies(100, 900);
    for (int trial = 0; trial < 50; ++trial) {
        PopulationTable t("pop" + std::to_string(trial));
        const int n_loci = 1 + static_cast<int>(gen() % 4);
        for (int l = 0; l < n_loci; ++l) {
            const std::string locus = "L" + std::to_string(l);
            const int n_alleles = 1 + static_cast<int>(gen() % 4);
            for (int a = 0; a < n_alleles; ++a) {
                t.set_frequency(locus, "a" + std::to_string(a), freq(gen));
            }
            if (gen() % 2) t.set_two_n(locus, copies(gen));
        }
        CHECK(parse_allele_table(serialize_allele_table(t)) == t);
    }

    CensusWeights w;
    w.add("White", 0.495);
    w.add("Hispanic", 0.384);
    w.add("Black", 0.060);
    CHECK(parse_census_weights(serialize_census_weights(w)) == w);
}
