// simulate: run a decay scenario, write its time series and check report.
//
//   simulate <config.json> [--out DIR] [--method rk4|exact] [--t-max X]
//            [--dt X] [--checks LIST] [--seed N]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 config/parse/I-O error,
// 3 numerical error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opendecay/errors.hpp"
#include "opendecay/scenario.hpp"

namespace sc = opendecay::scenario;

namespace {

std::vector<std::string> split_list(const std::string& list)
{
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulate an open quantum system with unstable states on the enlarged space"};
    std::string config_path;
    std::string out_dir;
    std::string method;
    double t_max = -1.0;
    double dt = -1.0;
    std::string checks;
    std::uint64_t seed = 0;

    app.add_option("config", config_path, "Scenario configuration (JSON)")->required();
    auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides \"output\")");
    auto* method_opt = app.add_option("--method", method, "Integrator: rk4 or exact")
                           ->check(CLI::IsMember({"rk4", "exact"}));
    auto* tmax_opt = app.add_option("--t-max", t_max, "Final time");
    auto* dt_opt = app.add_option("--dt", dt, "Integrator step");
    auto* checks_opt = app.add_option("--checks", checks, "Comma-separated check list");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for a random model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sc::kExitConfigError;
    }

    try {
        sc::ScenarioConfig cfg = sc::parse_config_file(config_path);
        if (*out_opt) cfg.output = out_dir;
        if (*method_opt) {
            cfg.integrator.method = method == "exact" ? opendecay::evolution::Method::exact
                                                      : opendecay::evolution::Method::rk4;
        }
        if (*tmax_opt) cfg.integrator.t_max = t_max;
        if (*dt_opt) cfg.integrator.dt = dt;
        if (*checks_opt) cfg.checks = split_list(checks);
        if (*seed_opt) {
            auto* params = std::get_if<opendecay::random::RandomModelParams>(&cfg.model);
            if (params == nullptr) throw opendecay::ValidationError("--seed requires a \"random\" model");
            params->seed = seed;
        }
        sc::validate_config(cfg);

        const auto result = sc::run_scenario(cfg);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

        const std::string base = cfg.output + "/" + cfg.name;
        sc::write_timeseries(result, base + "_timeseries.csv");
        sc::write_report(result, base + "_report.csv");

        for (const auto& r : result.reports) {
            std::cout << r.name << ": " << (r.passed() ? "pass" : "FAIL") << " (measured "
                      << sc::format_double(r.measured) << ", tolerance " << sc::format_double(r.tolerance)
                      << ")\n";
        }
        return result.exit_status;
    } catch (const opendecay::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return sc::kExitConfigError;
    } catch (const opendecay::ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return sc::kExitConfigError;
    } catch (const opendecay::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return sc::kExitConfigError;
    } catch (const opendecay::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return sc::kExitNumericalError;
    } catch (const opendecay::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sc::kExitNumericalError;
    }
}
