// forensic-lr: DNA match-statistics reports, table validation, and Monte
// Carlo cross-checks from the command line.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flr/case_file.hpp"
#include "flr/population_db.hpp"
#include "flr/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int run_evaluate(const std::string& case_path, const std::string& format,
                 const std::vector<double>& theta_override,
                 const std::vector<double>& floor_override,
                 const std::vector<double>& multipliers_override) {
    flr::CaseFile c = flr::parse_case_file(case_path);
    if (!theta_override.empty()) c.theta = flr::Theta(theta_override.back()).value;
    if (!floor_override.empty()) {
        const double floor = floor_override.back();
        if (!(floor > 0.0) || floor > 1.0) throw flr::ValidationError("floor outside (0,1]");
        c.ceiling_floor = floor;
    }
    if (!multipliers_override.empty()) c.multipliers = multipliers_override;

    const flr::MatchReport report = flr::run_case(c);
    std::cout << flr::emit_report(report, flr::parse_format(format));
    return kExitOk;
}

int run_validate(const std::string& alleles_path) {
    const auto tables = flr::parse_allele_tables(flr::read_file(alleles_path));
    bool any_error = false;
    for (const auto& table : tables) {
        const flr::ValidationReport report = flr::validate_table(table);
        std::cout << "population " << table.population() << ": " << table.data().size()
                  << " loci, " << report.findings.size() << " findings\n";
        std::cout << report.to_string();
        if (!report.ok()) any_error = true;
    }
    return any_error ? kExitValidation : kExitOk;
}

int run_simulate(const std::string& config_path, std::uint64_t seed) {
    std::cout << flr::run_sim_job(flr::parse_sim_job(config_path), seed);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forensic DNA match-statistics toolkit"};
    app.require_subcommand(1);

    std::string case_path;
    std::string format = "text";
    std::vector<double> theta_override, floor_override, multipliers_override;
    CLI::App* evaluate = app.add_subcommand("evaluate", "run a case file and print the report");
    evaluate->add_option("--case", case_path, "case file path")->required();
    evaluate->add_option("--format", format, "text or structured");
    evaluate->add_option("--theta", theta_override, "override the case theta");
    evaluate->add_option("--floor", floor_override, "override the ceiling allele floor");
    evaluate->add_option("--multipliers", multipliers_override, "override sensitivity multipliers")
        ->delimiter(',');

    std::string alleles_path;
    CLI::App* validate = app.add_subcommand("validate", "check an allele-frequency CSV");
    validate->add_option("--alleles", alleles_path, "allele table path")->required();

    std::string config_path;
    std::uint64_t seed = 0;
    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo job");
    simulate->add_option("--config", config_path, "sim config path")->required();
    simulate->add_option("--seed", seed, "64-bit stream seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (evaluate->parsed()) {
            return run_evaluate(case_path, format, theta_override, floor_override,
                                multipliers_override);
        }
        if (validate->parsed()) return run_validate(alleles_path);
        if (simulate->parsed()) return run_simulate(config_path, seed);
    } catch (const flr::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const flr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}
