#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kOut = fs::temp_directory_path() / "opendecay-cli-test";

std::string scenario(const std::string& name)
{
    return std::string(OPENDECAY_SCENARIO_DIR) + "/" + name + ".json";
}

int run(const std::string& args)
{
    const std::string cmd = std::string("\"") + OPENDECAY_SIMULATE_BIN + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text)
{
    fs::create_directories(kOut);
    const fs::path p = kOut / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("successful run writes both files")
{
    fs::remove_all(kOut);
    CHECK(run(scenario("single-decay") + " --out " + kOut.string()) == 0);
    const std::string ts = slurp(kOut / "single-decay_timeseries.csv");
    CHECK(ts.rfind("t,tr_rho_ss,tr_rho_ff,tr_total,delta,min_eig\n", 0) == 0);
    const std::string report = slurp(kOut / "single-decay_report.csv");
    CHECK(report.find("trace,pass,") != std::string::npos);
    CHECK(report.find(",fail,") == std::string::npos);
}

TEST_CASE("overrides")
{
    fs::remove_all(kOut);
    CHECK(run(scenario("single-decay") + " --out " + kOut.string() + " --method exact --t-max 2 --dt 0.01 --checks trace,positivity") == 0);
    const std::string report = slurp(kOut / "single-decay_report.csv");
    CHECK(std::count(report.begin(), report.end(), '\n') == 2);
    const std::string ts = slurp(kOut / "single-decay_timeseries.csv");
    CHECK(ts.find("\n2,") != std::string::npos);

    CHECK(run(scenario("random") + " --out " + kOut.string() + " --seed 7 --t-max 1 --checks trace") == 0);
    CHECK(run(scenario("single-decay") + " --out " + kOut.string() + " --seed 7") == 2);
}

TEST_CASE("failed check exits 1")
{
    CHECK(run(scenario("single-decay") + " --out " + kOut.string() + " --dt 0.5 --checks quadrature") == 1);
}

TEST_CASE("config errors exit 2")
{
    CHECK(run("") == 2);
    CHECK(run(scenario("missing")) == 2);
    CHECK(run(scenario("single-decay") + " --method euler") == 2);
    CHECK(run(scenario("single-decay") + " --checks sparkle") == 2);
    CHECK(run(scenario("single-decay") + " --dt -1") == 2);
    const auto bad = write_config("bad.json", R"({"name": "bad", "system": {"d_s": 1, "d_f": 1,
        "H": [[[1, 0]]], "Gamma": [[[-1, 0]]]}, "integrator": {"dt": 0.01, "t_max": 1}})");
    CHECK(run(bad.string()) == 2);
    const auto typo = write_config("typo.json", R"({"name": "typo", "sytem": {}})");
    CHECK(run(typo.string()) == 2);
}

TEST_CASE("numerical failure exits 3")
{
    // A step far beyond the stability region of rk4 overflows to infinity.
    const auto stiff = write_config("stiff.json", R"({"name": "stiff", "system": {"d_s": 1, "d_f": 1,
        "H": [[[0, 0]]], "Gamma": [[[1000, 0]]]}, "integrator": {"dt": 1.0, "t_max": 400},
        "checks": ["trace"], "output": ")" + kOut.string() + R"("})");
    CHECK(run(stiff.string()) == 3);
    fs::remove_all(kOut);
}
