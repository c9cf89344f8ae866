#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qprobe/experiments.hpp"
#include "qprobe/util.hpp"

using namespace qprobe;

namespace {

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::filesystem::path fresh_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "qprobe_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("config parsing: defaults, unknown keys, bad types, bad values")
{
    const ExperimentConfig cfg = parse_config(R"({"kind": "fisher-sweep"})");
    CHECK(cfg.a1 == 0.4);
    CHECK(cfg.s_grid == 41);
    CHECK(cfg.seed == 12345);

    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"([1, 2, 3])"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kind": "fisher-sweep", "bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kind": "fisher-sweep", "a1": "strong"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kind": "unknown-kind"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kind": "fisher-sweep", "a1": -1.0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kind": "optimize-sweep", "objective": "nope"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kind": "flows", "tags": "lambda,nope"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kind": "flows", "panels": "diptych"})"), ConfigError);
}

TEST_CASE("fisher sweep appends the exact special cells")
{
    ModelParams m{0.4, 0.6, 5.0, 1.0, 0.0, 1.0};
    const FisherSweepResult result =
        fisher_sweep(m, linspace(-1.0, 1.0, 5), linspace(0.0, 3.14159265358979, 3), 200, 0);
    REQUIRE(result.s.size() == 5 * 3 + 2);
    CHECK(result.cell_kind[result.subradiant_cell] == CellKind::subradiant);
    CHECK(result.cell_kind[result.superradiant_cell] == CellKind::superradiant);
    CHECK(result.s[result.superradiant_cell] == doctest::Approx(0.3846153846));
    // Stationary cell: no information about the interaction or environment.
    CHECK(result.f_tot.at(ParamTag::time)[result.subradiant_cell] < 1e-8);
    CHECK(result.f_tot.at(ParamTag::width)[result.subradiant_cell] < 1e-8);
    CHECK(result.f_tot.at(ParamTag::phase)[result.subradiant_cell] > 1e-4);
}

TEST_CASE("run_experiment writes CSV plus manifest, and dry-run writes nothing")
{
    const auto dir = fresh_dir("fisher_small");
    ExperimentConfig cfg = parse_config(R"({
        "kind": "fisher-sweep", "horizon": 1.0, "grid_points": 150,
        "s_grid": 3, "phi_grid": 2
    })");

    const auto dry = run_experiment(cfg, dir.string(), 1, true);
    CHECK(dry.empty());
    CHECK_FALSE(std::filesystem::exists(dir / "manifest.json"));

    const auto written = run_experiment(cfg, dir.string(), 1, false);
    CHECK(std::filesystem::exists(dir / "fisher_sweep.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    CHECK(written.size() == 2);

    const std::string csv = slurp(dir / "fisher_sweep.csv");
    CHECK(csv.rfind("s,phi,tag,f_tot\r\n", 0) == 0);
    // (3*2 + 2 specials) cells x 4 tags rows + header.
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 8 * 4 + 1);

    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"kind\": \"fisher-sweep\"") != std::string::npos);
    CHECK(manifest.find("\"version\"") != std::string::npos);
}

TEST_CASE("identical configs produce byte-identical outputs, also threaded")
{
    ExperimentConfig cfg = parse_config(R"({
        "kind": "optimize-sweep", "rabi": 10.0, "horizon": 1.0, "grid_points": 200,
        "s_grid": 3, "phi_grid": 1, "segments": 3, "restarts": 2, "seed": 4242
    })");
    // Keep the optimizer short for the unit suite.
    const auto dir_a = fresh_dir("det_a");
    const auto dir_b = fresh_dir("det_b");
    const auto dir_c = fresh_dir("det_c");
    run_experiment(cfg, dir_a.string(), 1, false);
    run_experiment(cfg, dir_b.string(), 1, false);
    run_experiment(cfg, dir_c.string(), 2, false);
    CHECK(slurp(dir_a / "optimize_sweep.csv") == slurp(dir_b / "optimize_sweep.csv"));
    CHECK(slurp(dir_a / "optimize_sweep.csv") == slurp(dir_c / "optimize_sweep.csv"));
}

TEST_CASE("flows report: subradiant start produces empty flow sets without error")
{
    ExperimentConfig cfg = parse_config(R"({
        "kind": "flows", "rabi": 10.0, "horizon": 1.0, "grid_points": 400,
        "s": -0.3846153846153846, "phi": 3.14159265358979323846,
        "tags": "lambda", "panels": "uncontrolled", "pair_grid": 5
    })");
    const FlowsReport report = flows_report(cfg, 0);
    REQUIRE(report.panels.size() == 1);
    const FlowsPanel& panel = report.panels.front();
    CHECK(panel.flows.at("qfi_lambda").intervals.empty());
    // The BLP pair search still finds revivals among other states.
    CHECK(panel.curves.at("distinguishability").size() == panel.times.size());
}

TEST_CASE("qsl sweep emits saturation flags and traveled lengths")
{
    ModelParams m{0.4, 0.6, 5.0, 1.0, 0.0, 1.0};
    const QslSweepResult result = qsl_sweep(m, {-0.5, 0.0, 0.5}, {0.0}, 0.78539816339744831,
                                            300, 4.0, 0);
    REQUIRE(result.s.size() == 3 + 2);
    CHECK(result.tau_fisher[result.subradiant_cell].saturated);
    CHECK(result.tau_opnorm[result.subradiant_cell].saturated);
    CHECK(result.tau_opnorm[result.subradiant_cell].traveled < 1e-8);
    CHECK_FALSE(result.tau_opnorm[result.superradiant_cell].saturated);
}

TEST_SUITE_END();
