// Command-line driver: runs one named verification suite and reports one
// pass/fail line per check, with an optional machine-readable JSON report.
//
//   gerbecalc <command> [--seed N] [--resolution N] [--level K]
//             [--report PATH] [--tolerance-scale X] [--config PATH]
//
// The command may come from the positional argument, the --command flag, or
// the config file (flags override the file).  Exit codes: 0 when every
// check passes, 1 on check failures, 2 on usage errors (unknown or missing
// command), 3 on file errors.  The environment variable GERBECALC_THREADS
// caps quadrature parallelism inside the integration layer.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gerbecalc/suites.hpp"

namespace {

std::string joined_names() {
    std::string out;
    for (const auto& n : gerbecalc::suite_names()) {
        if (!out.empty()) out += " | ";
        out += n;
    }
    return out;
}

// Applies config-file values underneath any flags the user passed.
void merge_config_file(const std::string& path, const CLI::App& app,
                       std::string& command, std::string& report_path,
                       gerbecalc::RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    if (command.empty() && j.contains("command"))
        command = j.at("command").get<std::string>();
    if (app.count("--seed") == 0 && j.contains("seed"))
        cfg.seed = j.at("seed").get<unsigned>();
    if (app.count("--resolution") == 0 && j.contains("resolution"))
        cfg.resolution = j.at("resolution").get<int>();
    if (app.count("--level") == 0 && j.contains("level"))
        cfg.level = j.at("level").get<int>();
    if (app.count("--tolerance-scale") == 0 && j.contains("tolerance_scale"))
        cfg.tolerance_scale = j.at("tolerance_scale").get<double>();
    if (report_path.empty() && j.contains("report"))
        report_path = j.at("report").get<std::string>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "gerbecalc: verification suites for multiplicative gerbe calculus"};
    std::string command, command_flag, config_path, report_path;
    gerbecalc::RunConfig cfg;

    app.add_option("suite", command, "suite to run: " + joined_names());
    app.add_option("--command", command_flag,
                   "suite to run (alternative to the positional)");
    app.add_option("--config", config_path,
                   "JSON file with the same keys as the flags");
    app.add_option("--seed", cfg.seed, "random seed (default 7)");
    app.add_option("--resolution", cfg.resolution,
                   "sample count / mesh level / cover size (0 = default)");
    app.add_option("--level", cfg.level, "pairing level k (default 1)");
    app.add_option("--report", report_path, "write the JSON report here");
    app.add_option("--tolerance-scale", cfg.tolerance_scale,
                   "multiply every numeric tolerance (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (command.empty()) command = command_flag;

    try {
        if (!config_path.empty())
            merge_config_file(config_path, app, command, report_path, cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    }

    if (command.empty()) {
        std::cerr << "missing command; expected one of: " << joined_names()
                  << "\n";
        return 2;
    }
    cfg.command = command;

    gerbecalc::SuiteReport report;
    try {
        report = gerbecalc::run_suite(cfg);
    } catch (const gerbecalc::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    for (const auto& c : report.checks)
        std::printf("[%s] %-55s defect %.3e  tol %.3e  (%.2fs)\n",
                    c.pass ? "pass" : "FAIL", c.name.c_str(), c.defect,
                    c.tolerance, c.seconds);
    std::printf("%s: %zu/%zu checks passed\n", cfg.command.c_str(),
                static_cast<std::size_t>(
                    std::count_if(report.checks.begin(), report.checks.end(),
                                  [](const auto& c) { return c.pass; })),
                report.checks.size());

    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) {
            std::cerr << "cannot write report: " << report_path << "\n";
            return 3;
        }
        out << gerbecalc::report_json(report);
        if (!out) {
            std::cerr << "cannot write report: " << report_path << "\n";
            return 3;
        }
    }
    return report.all_pass() ? 0 : 1;
}
