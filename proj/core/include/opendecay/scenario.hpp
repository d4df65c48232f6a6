// scenario.hpp: Scenario configuration, batch runner and output files used by
// the `simulate` tool.
//
// Config schema (JSON; complex numbers are [re, im], matrices are row-major
// arrays of rows). Unknown keys are rejected at every level.
//
//   {
//     "name": "single-decay",
//     "system": {                      // exactly one of "system" / "random"
//       "d_s": 1, "d_f": 1,
//       "H": [[[1.0, 0.0]]],
//       "Gamma": [[[1.0, 0.0]]],
//       "lindblad": []                 // optional, list of d_s x d_s matrices
//     },
//     "random": { "seed": 42, "d_s": 2, "n_lindblad": 1,
//                 "gamma_rank": 0, "d_f": 0 },   // only seed and d_s required
//     "rho_ss0": [[[1.0, 0.0]]],       // optional, defaults to |e_1><e_1|
//     "integrator": { "dt": 0.001, "t_max": 10.0,
//                     "sample_stride": 10, "method": "rk4" },
//     "checks": ["trace", "positivity"],         // optional
//     "output": "out"                            // optional, directory
//   }

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opendecay/analysis.hpp"
#include "opendecay/evolution.hpp"
#include "opendecay/linalg.hpp"
#include "opendecay/model.hpp"
#include "opendecay/random.hpp"

namespace opendecay::scenario {

using linalg::ComplexMatrix;

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitConfigError = 2,
    kExitNumericalError = 3,
};

// Names accepted in "checks".
inline constexpr std::string_view kKnownChecks[] = {
    "trace", "positivity", "equivalence", "decoupling", "cp", "asymptotics", "quadrature",
};

struct ScenarioConfig {
    std::string name;
    std::variant<model::SystemSpec, random::RandomModelParams> model;
    std::optional<ComplexMatrix> rho_ss0;
    evolution::IntegratorConfig integrator;
    std::vector<std::string> checks;
    std::string output = ".";

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Strict JSON parse followed by validate_config. ParseError for malformed text,
// missing or unknown fields; ValidationError for physically invalid content.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig parse_config_file(const std::string& path);

// Re-checks a (possibly overridden) config: the system, the initial state
// (hermitian, PSD, unit trace within 1e-9), the integrator and the check list.
void validate_config(const ScenarioConfig& cfg);

std::string serialize_config(const ScenarioConfig& cfg);

// The explicit or generated system.
model::SystemSpec resolve_spec(const ScenarioConfig& cfg);
// rho_ss(0), defaulting to |e_1><e_1|.
ComplexMatrix initial_state(const ScenarioConfig& cfg, std::size_t d_s);

struct TimeseriesRow {
    double t = 0.0;
    double tr_rho_ss = 0.0;
    double tr_rho_ff = 0.0;
    double tr_total = 0.0;
    double delta = 0.0;   // Tr rho^2 on the enlarged space
    double min_eig = 0.0; // smallest eigenvalue of rho
};

struct RunResult {
    std::string name;
    evolution::Trajectory enlarged;
    evolution::Trajectory wwa;
    std::vector<TimeseriesRow> rows;
    std::vector<analysis::VerificationReport> reports;
    std::vector<std::string> warnings;
    int exit_status = kExitOk;
};

/// Runs the non-hermitian evolution on H_s and the enlarged evolution from
/// diag(rho_ss(0), 0), then every requested check. exit_status is 0 iff all
/// checks pass. Does not touch the filesystem.
RunResult run_scenario(const ScenarioConfig& cfg);

// "t,tr_rho_ss,tr_rho_ff,tr_total,delta,min_eig" followed by one row per sample,
// 17 significant digits, LF endings. Written atomically (temp file + rename).
void write_timeseries(const RunResult& result, const std::string& path);
// One line per check: <name>,<pass|fail>,<measured>,<tolerance>
void write_report(const RunResult& result, const std::string& path);

std::string format_timeseries(const RunResult& result);
std::string format_report(const RunResult& result);

// 17 significant digits, as printf("%.17g").
std::string format_double(double x);

} // namespace opendecay::scenario
