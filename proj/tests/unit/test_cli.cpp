#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace mrwp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("mrwp_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "mrwp");
    args.push_back("-q");
    std::vector<char*> argv;
    for (std::string& a : args) {
        argv.push_back(a.data());
    }
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& s)
{
    std::ofstream f(p);
    f << s;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("config resolution")
{
    const cli::json cfg = cli::resolve_config(std::nullopt, {"n=400", "constants.c1=2", "source=cz", "sweep.eta=10"});
    CHECK(cfg["n"] == 400);
    CHECK(cfg["L"].get<double>() == doctest::Approx(20.0));
    CHECK(cfg["R"].get<double>() == doctest::Approx(radius_threshold(400, 20.0, 2.0)));
    CHECK(cfg["v"].get<double>() == doctest::Approx(cfg["R"].get<double>() / kDefaultC2));
    CHECK(cfg["sweep"]["eta"] == 10);
    CHECK(cfg["sweep"]["points"] == 20);
    CHECK(cfg["constants"]["a"] == 18.0);

    const WorldParams p = cli::params_from(cfg);
    CHECK(p.n == 400);
    CHECK(p.c1 == 2.0);

    CHECK_THROWS_AS(cli::resolve_config(std::nullopt, {"bogus=1"}), cli::ConfigError);
    CHECK_THROWS_AS(cli::resolve_config(std::nullopt, {"noequals"}), cli::ConfigError);
    CHECK_THROWS_AS(cli::resolve_config(std::nullopt, {"init=sideways"}), cli::ConfigError);
    CHECK_THROWS_AS(cli::resolve_config(cli::json{{"constants", {{"zzz", 1}}}}, {}), cli::ConfigError);
    CHECK_THROWS_AS(cli::init_from(cli::resolve_config(std::nullopt, {"warmup_steps=0"})), cli::ConfigError);
    CHECK_THROWS_AS(cli::params_from(cli::resolve_config(std::nullopt, {"v=-1"})), cli::ConfigError);

    // overrides win over the file
    const cli::json file{{"n", 900}, {"seed", 5}};
    const cli::json merged = cli::resolve_config(file, {"seed=6"});
    CHECK(merged["n"] == 900);
    CHECK(merged["seed"] == 6);
}

TEST_CASE("flood output is byte-identical across repeats and thread counts")
{
    const fs::path dir = scratch("flood");
    write_text(dir / "cfg.json", R"({"n": 300, "seed": 9, "constants": {"c1": 2.0}, "source": "cz"})");
    const std::string cfg = (dir / "cfg.json").string();
    REQUIRE(run_cli({"flood", "-c", cfg, "-o", (dir / "a").string()}) == 0);
    REQUIRE(run_cli({"flood", "-c", cfg, "-o", (dir / "b").string()}) == 0);
    REQUIRE(run_cli({"flood", "-c", cfg, "-o", (dir / "c").string(), "-j", "4"}) == 0);
    for (const char* name : {"flood_summary.json", "flood_progress.csv"}) {
        const std::string a = slurp(dir / "a" / name);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(dir / "b" / name));
        CHECK(a == slurp(dir / "c" / name));
    }
    const cli::json summary = cli::json::parse(slurp(dir / "a" / "flood_summary.json"));
    CHECK(summary["meta"]["version"] == "0.1.0");
    CHECK(summary["meta"]["rng_algorithm"] == RngStream::algorithm_id);
    CHECK(summary["meta"]["seed"] == 9);
    CHECK(summary["meta"]["config"]["n"] == 300);
    CHECK(summary["status"] == "COMPLETE");
    CHECK(slurp(dir / "a" / "flood_progress.csv").rfind("# {", 0) == 0);
}

TEST_CASE("zones with an empty suburb")
{
    const fs::path dir = scratch("zones");
    REQUIRE(run_cli({"zones", "-s", "n=500", "-s", "L=10", "-s", "R=8", "-o", dir.string()}) == 0);
    const cli::json z = cli::json::parse(slurp(dir / "zones.json"));
    CHECK(z["suburb_size"] == 0);
    const std::string svg = slurp(dir / "zones.svg");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<metadata>") != std::string::npos);
    CHECK(svg.find("#d62728") == std::string::npos); // no suburb outlines
}

TEST_CASE("heatmap and simulate outputs")
{
    const fs::path dir = scratch("heatmap");
    REQUIRE(run_cli({"heatmap", "-s", "resolution=40", "-s", "origin=[3,20]", "-o", dir.string()}) == 0);
    const std::string density = slurp(dir / "heatmap_density.svg");
    CHECK(density.find("#000000") != std::string::npos); // black marks the maximum
    CHECK(fs::exists(dir / "heatmap_destination.svg"));
    CHECK(run_cli({"heatmap", "-s", "origin=[0,0]", "-o", dir.string()}) == 2);

    REQUIRE(run_cli({"simulate", "-s", "n=50", "-s", "steps=5", "-s", "agents=3", "-s", "init=approx-stationary",
                     "-o", dir.string()}) == 0);
    const std::string traj = slurp(dir / "trajectories.csv");
    CHECK(std::count(traj.begin(), traj.end(), '\n') == 2 + 6 * 3);
}

TEST_CASE("error exits")
{
    const fs::path dir = scratch("errors");
    CHECK(run_cli({"teleport"}) == 2);
    CHECK(run_cli({"flood", "-c", (dir / "missing.json").string(), "-o", dir.string()}) == 2);
    write_text(dir / "broken.json", "{\"n\": ");
    CHECK(run_cli({"flood", "-c", (dir / "broken.json").string(), "-o", dir.string()}) == 2);
    CHECK(run_cli({"flood", "-s", "nn=3", "-o", dir.string()}) == 2);
    write_text(dir / "file", "x");
    CHECK(run_cli({"zones", "-o", (dir / "file" / "sub").string()}) == 2);
}

TEST_CASE("environment overrides the configured output directory")
{
    const fs::path dir = scratch("env");
    setenv("MRWP_OUTPUT_DIR", (dir / "from_env").string().c_str(), 1);
    const int code = run_cli({"zones", "-s", "n=200", "-s", "constants.c1=2"});
    unsetenv("MRWP_OUTPUT_DIR");
    CHECK(code == 0);
    CHECK(fs::exists(dir / "from_env" / "zones.csv"));
}

TEST_CASE("lemma sweep negative control exits with a violation")
{
    const fs::path dir = scratch("sweep");
    CHECK(run_cli({"lemma-sweep", "-s", "sweep.eta=10", "-s", "sweep.points=2", "-s", "sweep.density_horizon=2",
                   "-s", "sweep.turn_agents=5", "-o", dir.string()}) == 1);
    const cli::json rep = cli::json::parse(slurp(dir / "lemma_sweep.json"));
    CHECK(rep["density_violations"].get<std::int64_t>() > 0);
    CHECK(rep["rows"].size() == 2);
}

TEST_CASE("expansion check")
{
    const fs::path dir = scratch("expansion");
    CHECK(run_cli({"expansion-check", "-s", "n=1274", "-s", "constants.c1=8", "-o", dir.string()}) == 0);
    const cli::json rep = cli::json::parse(slurp(dir / "expansion.json"));
    CHECK(rep["mode"] == "exhaustive");
    CHECK(rep["violation_count"] == 0);
}

}
