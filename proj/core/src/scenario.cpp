// scenario.cpp: Config parsing, scenario runner and output writers

#include "opendecay/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "opendecay/errors.hpp"

namespace opendecay::scenario {

using json = nlohmann::json;
using linalg::Complex;

namespace {

constexpr double kStateTolerance = 1e-9;

// Tolerances of the per-run checks.
constexpr double kTraceTolerance = 1e-8;
constexpr double kPositivityTolerance = 1e-8;
constexpr double kEquivalenceTolerance = 1e-8;
constexpr double kDecouplingTolerance = 1e-10;
constexpr double kCpToleranceRk4 = 1e-8;
constexpr double kCpToleranceExact = 1e-10;
constexpr double kQuadratureTolerance = 1e-6;
constexpr double kCpTimes[] = {0.1, 1.0, 5.0};
constexpr std::size_t kAsymptoticSamples = 2000;

// ---------------------------------------------------------------------------
// Parsing helpers

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

void require_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ParseError(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known) throw ParseError(join(path, it.key()), "unknown key");
    }
}

const json& field(const json& j, const std::string& path, const char* key)
{
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(join(path, key), "missing required field");
    return *it;
}

std::string get_string(const json& j, const std::string& path)
{
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

double get_double(const json& j, const std::string& path)
{
    if (!j.is_number()) throw ParseError(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ParseError(path, "expected a finite number");
    return x;
}

std::uint64_t get_uint(const json& j, const std::string& path)
{
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        if (j.get<std::int64_t>() < 0) throw ParseError(path, "expected a non-negative integer");
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    throw ParseError(path, "expected a non-negative integer");
}

Complex get_complex(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2) throw ParseError(path, "expected a complex number [re, im]");
    return {get_double(j[0], index(path, 0)), get_double(j[1], index(path, 1))};
}

ComplexMatrix get_matrix(const json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) throw ParseError(path, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    std::vector<Complex> entries;
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = j[i];
        const std::string rpath = index(path, i);
        if (!row.is_array() || row.empty()) throw ParseError(rpath, "expected a non-empty row");
        if (i == 0) cols = row.size();
        if (row.size() != cols) throw ParseError(rpath, "ragged matrix row");
        for (std::size_t c = 0; c < cols; ++c) entries.push_back(get_complex(row[c], index(rpath, c)));
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

json matrix_to_json(const ComplexMatrix& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(json::array({m(i, c).real(), m(i, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

model::SystemSpec parse_system(const json& j, const std::string& path)
{
    require_keys(j, path, {"d_s", "d_f", "H", "Gamma", "lindblad"});
    model::SystemSpec spec;
    spec.d_s = get_uint(field(j, path, "d_s"), join(path, "d_s"));
    spec.d_f = get_uint(field(j, path, "d_f"), join(path, "d_f"));
    spec.H = get_matrix(field(j, path, "H"), join(path, "H"));
    spec.Gamma = get_matrix(field(j, path, "Gamma"), join(path, "Gamma"));
    if (auto it = j.find("lindblad"); it != j.end()) {
        const std::string lpath = join(path, "lindblad");
        if (!it->is_array()) throw ParseError(lpath, "expected an array of matrices");
        for (std::size_t k = 0; k < it->size(); ++k) spec.lindblad.push_back(get_matrix((*it)[k], index(lpath, k)));
    }
    return spec;
}

random::RandomModelParams parse_random(const json& j, const std::string& path)
{
    require_keys(j, path, {"seed", "d_s", "n_lindblad", "gamma_rank", "d_f"});
    random::RandomModelParams p;
    p.seed = get_uint(field(j, path, "seed"), join(path, "seed"));
    p.d_s = get_uint(field(j, path, "d_s"), join(path, "d_s"));
    if (j.contains("n_lindblad")) p.n_lindblad = get_uint(j["n_lindblad"], join(path, "n_lindblad"));
    if (j.contains("gamma_rank")) p.gamma_rank = get_uint(j["gamma_rank"], join(path, "gamma_rank"));
    if (j.contains("d_f")) p.d_f = get_uint(j["d_f"], join(path, "d_f"));
    return p;
}

evolution::IntegratorConfig parse_integrator(const json& j, const std::string& path)
{
    require_keys(j, path, {"dt", "t_max", "sample_stride", "method"});
    evolution::IntegratorConfig cfg;
    cfg.dt = get_double(field(j, path, "dt"), join(path, "dt"));
    cfg.t_max = get_double(field(j, path, "t_max"), join(path, "t_max"));
    if (j.contains("sample_stride")) cfg.sample_stride = get_uint(j["sample_stride"], join(path, "sample_stride"));
    if (j.contains("method")) {
        const std::string m = get_string(j["method"], join(path, "method"));
        if (m == "rk4") {
            cfg.method = evolution::Method::rk4;
        } else if (m == "exact") {
            cfg.method = evolution::Method::exact;
        } else {
            throw ParseError(join(path, "method"), "expected \"rk4\" or \"exact\", got \"" + m + "\"");
        }
    }
    return cfg;
}

const char* method_name(evolution::Method m)
{
    return m == evolution::Method::exact ? "exact" : "rk4";
}

// ---------------------------------------------------------------------------
// Checks

double max_blockwise(const evolution::Trajectory& traj,
                     const std::function<double(std::size_t)>& measure)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) worst = std::max(worst, measure(i));
    return worst;
}

analysis::VerificationReport run_cp_check(const model::EnlargedModel& model,
                                          const evolution::IntegratorConfig& integ)
{
    const double tol = integ.method == evolution::Method::exact ? kCpToleranceExact : kCpToleranceRk4;
    double worst = -std::numeric_limits<double>::infinity();
    for (const double t : kCpTimes) {
        const auto restricted = analysis::choi_matrix(
            analysis::restricted_map(model, t, integ.method, integ.dt), model.d_s, t);
        const auto full = analysis::choi_matrix(
            analysis::enlarged_map(model, t, integ.method, integ.dt), model.d_tot, t);
        worst = std::max({worst, analysis::check_cp(restricted, tol).measured,
                          analysis::check_cp(full, tol).measured});
    }
    auto report = analysis::make_report("cp", worst, tol);
    report.samples = std::size(kCpTimes);
    report.t_begin = kCpTimes[0];
    report.t_end = kCpTimes[std::size(kCpTimes) - 1];
    return report;
}

analysis::VerificationReport run_asymptotics_check(const model::SystemSpec& spec,
                                                   const model::GammaDecomposition& dec,
                                                   const model::EnlargedModel& model,
                                                   const ComplexMatrix& rho0, double t_max)
{
    if (dec.n0 != 0) return analysis::asymptotics_check({}, dec, spec);
    const double gamma0 = *std::min_element(dec.gammas.begin(), dec.gammas.end());
    evolution::IntegratorConfig cfg;
    cfg.method = evolution::Method::exact;
    cfg.t_max = std::max(t_max, analysis::kAsymptoticHorizon / gamma0);
    cfg.dt = cfg.t_max / static_cast<double>(kAsymptoticSamples);
    cfg.sample_stride = 1;
    const auto traj = evolution::evolve_enlarged(model, rho0, cfg);
    return analysis::asymptotics_check(traj, dec, spec);
}

void write_atomically(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + target.parent_path().string() + ": " + ec.message());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

} // namespace

// ---------------------------------------------------------------------------

std::string format_double(double x)
{
    if (x == 0.0) x = 0.0; // drop the sign of negative zero
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

ScenarioConfig parse_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("", e.what());
    }
    require_keys(root, "", {"name", "system", "random", "rho_ss0", "integrator", "checks", "output"});

    ScenarioConfig cfg;
    cfg.name = get_string(field(root, "", "name"), "name");
    if (cfg.name.empty()) throw ParseError("name", "must not be empty");

    const bool has_system = root.contains("system");
    const bool has_random = root.contains("random");
    if (has_system == has_random) throw ParseError("", "exactly one of \"system\" or \"random\" is required");
    if (has_system) {
        cfg.model = parse_system(root["system"], "system");
    } else {
        cfg.model = parse_random(root["random"], "random");
    }

    if (root.contains("rho_ss0")) cfg.rho_ss0 = get_matrix(root["rho_ss0"], "rho_ss0");
    cfg.integrator = parse_integrator(field(root, "", "integrator"), "integrator");

    if (root.contains("checks")) {
        const json& checks = root["checks"];
        if (!checks.is_array()) throw ParseError("checks", "expected an array of check names");
        for (std::size_t i = 0; i < checks.size(); ++i) cfg.checks.push_back(get_string(checks[i], index("checks", i)));
    }
    if (root.contains("output")) cfg.output = get_string(root["output"], "output");

    validate_config(cfg);
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

model::SystemSpec resolve_spec(const ScenarioConfig& cfg)
{
    if (const auto* spec = std::get_if<model::SystemSpec>(&cfg.model)) return *spec;
    return random::random_model(std::get<random::RandomModelParams>(cfg.model));
}

ComplexMatrix initial_state(const ScenarioConfig& cfg, std::size_t d_s)
{
    if (cfg.rho_ss0) return *cfg.rho_ss0;
    ComplexMatrix rho(d_s, d_s);
    rho(0, 0) = 1.0;
    return rho;
}

void validate_config(const ScenarioConfig& cfg)
{
    model::SystemSpec spec;
    try {
        spec = resolve_spec(cfg);
        model::validate_spec(spec);
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(std::string("invalid system: ") + e.what());
    }

    const ComplexMatrix rho = initial_state(cfg, spec.d_s);
    if (rho.rows() != spec.d_s || rho.cols() != spec.d_s) {
        throw ValidationError("rho_ss0 must be " + std::to_string(spec.d_s) + "x" + std::to_string(spec.d_s));
    }
    if (!linalg::all_finite(rho)) throw ValidationError("rho_ss0 has non-finite entries");
    if (linalg::hermiticity_defect(rho) > kStateTolerance) throw ValidationError("rho_ss0 is not hermitian");
    if (linalg::min_eigenvalue_hermitian(linalg::hermitian_part(rho)) < -kStateTolerance) {
        throw ValidationError("rho_ss0 is not positive semidefinite");
    }
    if (std::abs(linalg::trace(rho) - 1.0) > kStateTolerance) throw ValidationError("rho_ss0 must have unit trace");

    cfg.integrator.validate();

    for (const auto& check : cfg.checks) {
        const bool known = std::find(std::begin(kKnownChecks), std::end(kKnownChecks), check) != std::end(kKnownChecks);
        if (!known) throw ValidationError("unknown check \"" + check + "\"");
    }
    const bool wants_asymptotics = std::find(cfg.checks.begin(), cfg.checks.end(), "asymptotics") != cfg.checks.end();
    if (wants_asymptotics && model::decompose_gamma(spec.Gamma).n0 != 0) {
        throw ValidationError("the asymptotics check requires a non-singular Gamma");
    }
}

std::string serialize_config(const ScenarioConfig& cfg)
{
    json root = json::object();
    root["name"] = cfg.name;
    if (const auto* spec = std::get_if<model::SystemSpec>(&cfg.model)) {
        json lindblad = json::array();
        for (const auto& a : spec->lindblad) lindblad.push_back(matrix_to_json(a));
        root["system"] = {{"d_s", spec->d_s}, {"d_f", spec->d_f}, {"H", matrix_to_json(spec->H)},
                          {"Gamma", matrix_to_json(spec->Gamma)}, {"lindblad", lindblad}};
    } else {
        const auto& p = std::get<random::RandomModelParams>(cfg.model);
        root["random"] = {{"seed", p.seed}, {"d_s", p.d_s}, {"n_lindblad", p.n_lindblad},
                          {"gamma_rank", p.gamma_rank}, {"d_f", p.d_f}};
    }
    if (cfg.rho_ss0) root["rho_ss0"] = matrix_to_json(*cfg.rho_ss0);
    root["integrator"] = {{"dt", cfg.integrator.dt}, {"t_max", cfg.integrator.t_max},
                          {"sample_stride", cfg.integrator.sample_stride},
                          {"method", method_name(cfg.integrator.method)}};
    root["checks"] = cfg.checks;
    root["output"] = cfg.output;
    return root.dump(2) + "\n";
}

RunResult run_scenario(const ScenarioConfig& cfg)
{
    const model::SystemSpec spec = resolve_spec(cfg);
    model::validate_spec(spec);
    const auto dec = model::decompose_gamma(spec.Gamma);
    const auto decay = model::build_B(dec, spec.d_f);
    const auto enlarged_model = model::embed_operators(spec, decay);

    const ComplexMatrix rho_ss0 = initial_state(cfg, spec.d_s);
    const ComplexMatrix rho0 = evolution::embed_system_state(rho_ss0, spec.d_f);

    RunResult result;
    result.name = cfg.name;

    const double scale = evolution::generator_scale(model::assemble_liouvillian(enlarged_model));
    if (!evolution::step_within_recommendation(cfg.integrator, scale)) {
        result.warnings.push_back("dt * generator scale = " + format_double(cfg.integrator.dt * scale) +
                                  " exceeds the recommended 0.1 for rk4");
    }

    result.enlarged = evolution::evolve_enlarged(enlarged_model, rho0, cfg.integrator);
    result.wwa = evolution::evolve_wwa(spec, rho_ss0, cfg.integrator);

    for (std::size_t i = 0; i < result.enlarged.size(); ++i) {
        const ComplexMatrix& rho = result.enlarged.states[i];
        const auto b = result.enlarged.blocks(i);
        TimeseriesRow row;
        row.t = result.enlarged.times[i];
        row.tr_rho_ss = linalg::trace(b.rho_ss).real();
        row.tr_rho_ff = linalg::trace(b.rho_ff).real();
        row.tr_total = linalg::trace(rho).real();
        row.delta = analysis::mixedness(linalg::hermitian_part(rho));
        row.min_eig = linalg::min_eigenvalue_hermitian(linalg::hermitian_part(rho));
        result.rows.push_back(row);
    }

    const auto& traj = result.enlarged;
    for (const auto& check : cfg.checks) {
        if (check == "trace") {
            result.reports.push_back(analysis::check_trace(traj, kTraceTolerance));
        } else if (check == "positivity") {
            result.reports.push_back(analysis::check_positivity(traj, kPositivityTolerance));
        } else if (check == "equivalence") {
            const double worst = max_blockwise(traj, [&](std::size_t i) {
                return linalg::frobenius_norm(traj.system_block(i) - result.wwa.states[i]);
            });
            result.reports.push_back(analysis::make_report("equivalence", worst, kEquivalenceTolerance, &traj));
        } else if (check == "decoupling") {
            const double worst = max_blockwise(traj, [&](std::size_t i) {
                return linalg::frobenius_norm(traj.blocks(i).rho_sf);
            });
            result.reports.push_back(analysis::make_report("decoupling", worst, kDecouplingTolerance, &traj));
        } else if (check == "quadrature") {
            const auto integrated = evolution::rho_ff_quadrature(decay, traj);
            const double worst = max_blockwise(traj, [&](std::size_t i) {
                return linalg::frobenius_norm(integrated[i] - traj.blocks(i).rho_ff);
            });
            result.reports.push_back(analysis::make_report("quadrature", worst, kQuadratureTolerance, &traj));
        } else if (check == "cp") {
            result.reports.push_back(run_cp_check(enlarged_model, cfg.integrator));
        } else if (check == "asymptotics") {
            result.reports.push_back(
                run_asymptotics_check(spec, dec, enlarged_model, rho0, cfg.integrator.t_max));
        } else {
            throw ValidationError("unknown check \"" + check + "\"");
        }
    }

    const bool all_pass = std::all_of(result.reports.begin(), result.reports.end(),
                                      [](const auto& r) { return r.passed(); });
    result.exit_status = all_pass ? kExitOk : kExitCheckFailed;
    return result;
}

std::string format_timeseries(const RunResult& result)
{
    std::string out = "t,tr_rho_ss,tr_rho_ff,tr_total,delta,min_eig\n";
    for (const auto& r : result.rows) {
        out += format_double(r.t) + ',' + format_double(r.tr_rho_ss) + ',' + format_double(r.tr_rho_ff) + ',' +
               format_double(r.tr_total) + ',' + format_double(r.delta) + ',' + format_double(r.min_eig) + '\n';
    }
    return out;
}

std::string format_report(const RunResult& result)
{
    std::string out;
    for (const auto& r : result.reports) {
        out += r.name + ',' + (r.passed() ? "pass" : "fail") + ',' + format_double(r.measured) + ',' +
               format_double(r.tolerance) + '\n';
    }
    return out;
}

void write_timeseries(const RunResult& result, const std::string& path)
{
    write_atomically(path, format_timeseries(result));
}

void write_report(const RunResult& result, const std::string& path)
{
    write_atomically(path, format_report(result));
}

} // namespace opendecay::scenario
