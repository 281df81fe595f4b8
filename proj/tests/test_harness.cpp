#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spinsync/harness.hpp"

using namespace spinsync;
namespace fs = std::filesystem;

namespace {

Json small_run() {
  return Json::parse(R"({
    "name": "small", "engine": "bloch", "seed": 7,
    "physics": {"N": 6, "gamma_over_omega": 2.0, "beta": 0.7,
                "tilt": {"theta_y": {"mean": "pi/5", "sigma": 0.2}, "phi_y": {"mean": 0.3, "sigma": 0.1}},
                "omega_spread": 0.05, "coupling": {"kind": "random"}},
    "numerics": {"t_end": 20, "sample_dt": 0.1},
    "analysis": {"modes": true, "sync": true}
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spinsync_test_" + name);
  fs::remove_all(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPINSYNC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("angle expressions") {
  CHECK(parse_angle(Json("pi/8"), "a") == doctest::Approx(kPi / 8));
  CHECK(parse_angle(Json("-2pi/3"), "a") == doctest::Approx(-2 * kPi / 3));
  CHECK(parse_angle(Json("0.5*pi"), "a") == doctest::Approx(kPi / 2));
  CHECK(parse_angle(Json("pi"), "a") == doctest::Approx(kPi));
  CHECK(parse_angle(Json(0.25), "a") == 0.25);
  CHECK(parse_angle(Json("0.25"), "a") == 0.25);
  CHECK_THROWS_AS(parse_angle(Json("tau/2"), "a"), ValidationError);
  CHECK_THROWS_AS(parse_angle(Json(true), "a"), ValidationError);
}

TEST_CASE("run config validation names the field") {
  Json j = small_run();
  j["physics"]["gamma"] = 2.0;
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("gamma"), ValidationError);

  j = small_run();
  j["physics"]["colour"] = "red";
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("colour"), ValidationError);

  j = small_run();
  j["physics"]["I"] = 1.5;
  CHECK_THROWS_AS(RunConfig::from_json(j), ValidationError);
  j["engine"] = "master";
  CHECK_NOTHROW(RunConfig::from_json(j));

  j = small_run();
  j["engine"] = "warp";
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("engine"), ValidationError);

  j = small_run();
  j["numerics"]["sample_dt"] = -1;
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("sample_dt"), ValidationError);
}

TEST_CASE("manifest reproduces the resolved config") {
  const RunConfig a = RunConfig::from_json(small_run());
  const Json manifest = a.to_json();
  const RunConfig b = RunConfig::from_json(manifest);
  CHECK(b.to_json() == manifest);
  CHECK(b.physics.gamma_value() == doctest::Approx(2.0));
  CHECK(a.mode_window_start() == doctest::Approx(5.0));
}

TEST_CASE("runs are deterministic and seeds matter") {
  const RunConfig cfg = RunConfig::from_json(small_run());
  const RunResult a = run(cfg);
  const RunResult b = run(cfg);
  CHECK(trajectory_csv(a) == trajectory_csv(b));
  CHECK(a.analysis.dump() == b.analysis.dump());
  CHECK(a.drift < 1e-8);

  RunConfig other = cfg;
  other.seed = 8;
  CHECK(trajectory_csv(run(other)) != trajectory_csv(a));
}

TEST_CASE("trajectory csv layout") {
  Json j = small_run();
  j["output"]["atoms"] = 2;
  const RunResult r = run(RunConfig::from_json(j));
  const std::string csv = trajectory_csv(r);
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header.rfind("t,mean_Sx,", 0) == 0);
  CHECK(header.find("atom1_Az") != std::string::npos);
  CHECK(header.find("atom2_") == std::string::npos);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == static_cast<long>(r.traj.size()) + 1);
}

TEST_CASE("every engine runs from config") {
  for (const char* engine : {"bloch", "meanfield", "tops", "master"}) {
    CAPTURE(engine);
    Json j = small_run();
    j["engine"] = engine;
    j["numerics"]["t_end"] = 10;
    if (std::string(engine) == "master") j["physics"]["mean_field"] = false;
    const RunResult r = run(RunConfig::from_json(j));
    CHECK(r.traj.size() == 101);
    CHECK(r.f_initial > 0.0);
  }
}

TEST_CASE("write_run artifacts") {
  const fs::path dir = scratch("run");
  Json j = small_run();
  j["engine"] = "master";
  j["physics"]["mean_field"] = false;
  j["physics"]["N"] = 3;
  j["numerics"]["t_end"] = 5;
  j["output"]["density_snapshots"] = true;
  const RunResult r = run(RunConfig::from_json(j));
  write_run(r, dir);
  for (const char* f : {"trajectory.csv", "analysis.json", "manifest.json", "sync.csv", "density.txt"}) {
    CHECK(fs::exists(dir / f));
  }
  const RunConfig again = RunConfig::from_json(load_json_file((dir / "manifest.json").string()));
  CHECK(trajectory_csv(run(again)) == slurp(dir / "trajectory.csv"));
  fs::remove_all(dir);
}

TEST_CASE("sweeps") {
  Json base = small_run();
  base["numerics"]["t_end"] = 10;
  Json sj = {{"kind", "sweep"}, {"axis", "physics.gamma_over_omega"}, {"values", Json::array()},
             {"base", base}};

  SUBCASE("empty axis gives a header only") {
    const SweepConfig cfg = SweepConfig::from_json(sj);
    const auto rows = sweep(cfg);
    CHECK(rows.empty());
    const std::string csv = sweep_csv(cfg, rows);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
  }

  SUBCASE("a failing point is reported and the rest continue") {
    sj["values"] = {0.5, 1.0, 2.0};
    SweepConfig cfg = SweepConfig::from_json(sj);
    // A negative rate is rejected by the point's own validation.
    cfg.values = {0.5, -1.0, 2.0};
    const auto rows = sweep(cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].status == "ok");
    CHECK(rows[1].status == "validation_error");
    CHECK(rows[1].message.find("gamma") != std::string::npos);
    CHECK(rows[2].status == "ok");
  }

  SUBCASE("worker count does not change results") {
    sj["values"] = {{"linspace", {{"start", 0.5}, {"stop", 2.0}, {"count", 4}}}};
    SweepConfig cfg = SweepConfig::from_json(sj);
    REQUIRE(cfg.values.size() == 4);
    cfg.workers = 1;
    const std::string one = sweep_csv(cfg, sweep(cfg));
    cfg.workers = 3;
    CHECK(sweep_csv(cfg, sweep(cfg)) == one);
  }

  SUBCASE("axis must be numeric") {
    sj["axis"] = "engine";
    CHECK_THROWS_AS(SweepConfig::from_json(sj), ValidationError);
    sj["axis"] = "seed";
    CHECK_THROWS_AS(SweepConfig::from_json(sj), ValidationError);
    sj["axis"] = "physics.nothing";
    CHECK_THROWS_AS(SweepConfig::from_json(sj), ValidationError);
  }
}

TEST_CASE("budget config and report") {
  const BudgetConfig cfg = BudgetConfig::from_json(load_json_file(preset_path("budget").string()));
  CHECK(cfg.vapor.T == doctest::Approx(893.15));
  CHECK(cfg.vapor.provenance.at("T").find("config override") != std::string::npos);
  const Json report = budget_report(cfg);
  CHECK(report["rates"]["R_SE"]["value"].get<double>() == doctest::Approx(2.55e9));
  CHECK(report["inputs"]["L"]["unit"] == "cm");
  CHECK(report["pumping"]["polarization"].get<double>() < 0.5);
  Json bad = {{"kind", "budget"}, {"vapor", {{"n_K", -1.0}}}};
  CHECK_THROWS_AS(budget_report(BudgetConfig::from_json(bad)), ValidationError);
}

TEST_CASE("shipped presets parse") {
  const auto names = preset_names();
  CHECK(names.size() >= 6);
  for (const auto& name : names) {
    CAPTURE(name);
    const Json j = load_json_file(preset_path(name).string());
    const std::string kind = config_kind(j);
    if (kind == "run") CHECK_NOTHROW(RunConfig::from_json(j));
    if (kind == "sweep") CHECK_NOTHROW(SweepConfig::from_json(j));
    if (kind == "budget") CHECK_NOTHROW(BudgetConfig::from_json(j));
  }
  CHECK_THROWS_AS(preset_path("no_such_preset"), ValidationError);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  CHECK(run_cli("presets list") == 0);
  CHECK(run_cli("budget --preset budget --out-dir " + (dir / "b").string()) == 0);
  CHECK(fs::exists(dir / "b" / "budget.json"));

  Json j = small_run();
  j["numerics"]["t_end"] = 2;
  std::ofstream(dir / "ok.json") << j.dump();
  CHECK(run_cli("run --config " + (dir / "ok.json").string() + " --out-dir " + (dir / "r").string()) == 0);

  j["physics"]["N"] = 0;
  std::ofstream(dir / "bad.json") << j.dump();
  CHECK(run_cli("run --config " + (dir / "bad.json").string()) == 1);
  CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 1);

  // An absurdly tight step floor forces a numerical failure.
  j = small_run();
  j["numerics"]["rtol"] = 1e-300;
  j["numerics"]["atol"] = 1e-300;
  std::ofstream(dir / "stiff.json") << j.dump();
  CHECK(run_cli("run --config " + (dir / "stiff.json").string() + " --out-dir " + (dir / "s").string()) == 2);
  fs::remove_all(dir);
}
