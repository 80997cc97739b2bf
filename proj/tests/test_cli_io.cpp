#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ebcm/commands.hpp"
#include "ebcm/config.hpp"
#include "ebcm/csv_io.hpp"
#include "ebcm/errors.hpp"

using namespace ebcm;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ebcm_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  int skipped = 0;
  while (std::getline(in, line)) {
    if (skipped < 2) {
      ++skipped;
      continue;
    }
    out.push_back(line);
  }
  return out;
}

constexpr const char* kSmallConfig = R"({
  "alpha": 0.95,
  "phi0_grid": {"count": 8},
  "photons_per_set": 60,
  "sets_per_protocol": 2,
  "master_seed": 4242
})";

}  // namespace

TEST_SUITE("cli-io") {

TEST_CASE("config parsing") {
  const auto rc = config_from_json(nlohmann::json::parse(kSmallConfig));
  CHECK(rc.experiment.alpha == 0.95);
  CHECK(rc.experiment.grid.count == 8);
  CHECK(rc.experiment.master_seed == 4242);
  CHECK(rc.replicas == 20);

  auto key_of = [](const char* text) {
    try {
      config_from_json(nlohmann::json::parse(text));
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of(R"({"alpha": 1.5})") == "alpha");
  CHECK(key_of(R"({"alpha": "high"})") == "alpha");
  CHECK(key_of(R"({"colour": 1})") == "colour");
  CHECK(key_of(R"({"detector": {"eff": 0.5}})") == "detector.eff");
  CHECK(key_of(R"({"phi0_grid": {"count": 0}})") == "phi0_grid.count");
  CHECK(key_of(R"({"protocols": ["sometimes"]})") == "protocols");
  CHECK(key_of(R"({"alpha_grid": []})") == "alpha_grid");
  CHECK(key_of(R"({"photons_per_set": -5})") == "photons_per_set");
  CHECK(key_of(R"({"replicas": 0})") == "replicas");
}

TEST_CASE("config json round trip") {
  auto rc = config_from_json(nlohmann::json::parse(kSmallConfig));
  rc.experiment.protocols = {PhaseProtocol::random_per_n(7), PhaseProtocol::fixed(1)};
  rc.experiment.detector.dark_prob_per_gate = 0.01;
  rc.alpha_grid = {0.3, 0.7};
  const auto back = config_from_json(config_to_json(rc));
  CHECK(config_to_json(back) == config_to_json(rc));
  CHECK(back.experiment.protocols == rc.experiment.protocols);
}

TEST_CASE("format_real reads back exactly") {
  for (double v : {0.0, 0.1, 1.0 / 3.0, 6.283185307179586, -2.5e-17, 1e300}) {
    CHECK(std::stod(format_real(v)) == v);
  }
  CHECK(format_real(std::nan("")).empty());
}

TEST_CASE("records table round trip") {
  ExperimentConfig c;
  c.photons_per_set = 30;
  c.sets_per_protocol = 1;
  c.protocols.push_back(PhaseProtocol::random_per_n(10));
  const auto recs = run_sweep(c);
  std::stringstream ss;
  write_records(ss, recs);
  const auto back = read_records(ss);
  REQUIRE(back.size() == recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(back[k].phi0 == recs[k].phi0);
    CHECK(back[k].phi0_index == recs[k].phi0_index);
    CHECK(back[k].protocol == recs[k].protocol);
    CHECK(back[k].counts_port0 == recs[k].counts_port0);
    CHECK(back[k].counts_port0_by_x == recs[k].counts_port0_by_x);
    CHECK(back[k].seed == recs[k].seed);
  }

  std::istringstream broken("# ebcm records v1\nphi0_rad,protocol\n");
  CHECK_THROWS_AS(read_records(broken), IoError);
}

TEST_CASE("sweep command") {
  const auto dir = scratch_dir("sweep");
  std::ostringstream err;

  CommandOptions opts;
  opts.out = dir / "default.csv";
  CHECK(cmd_sweep(opts, err) == kExitOk);
  const std::string text = slurp(opts.out);
  CHECK(text.rfind("# ebcm records v1\n", 0) == 0);
  CHECK(data_lines(text).size() == 480);
  CHECK(fs::exists(meta_path_for(opts.out)));

  // Same configuration and seed: byte-identical output.
  opts.out = dir / "again.csv";
  CHECK(cmd_sweep(opts, err) == kExitOk);
  CHECK(slurp(opts.out) == text);

  // Rerunning from the metadata sidecar reproduces the run.
  opts.config = meta_path_for(dir / "default.csv");
  opts.out = dir / "from_meta.csv";
  CHECK(cmd_sweep(opts, err) == kExitOk);
  CHECK(slurp(opts.out) == text);

  opts.seed = 1;
  opts.out = dir / "seeded.csv";
  CHECK(cmd_sweep(opts, err) == kExitOk);
  CHECK(slurp(opts.out) != text);
  const auto meta = nlohmann::json::parse(slurp(meta_path_for(opts.out)));
  CHECK(meta["master_seed"] == 1);
  CHECK(meta["config"]["master_seed"] == 1);
  CHECK(meta["photons_per_set"] == 5000);
  CHECK(meta["columns"] == kRecordColumns);
}

TEST_CASE("command error codes") {
  const auto dir = scratch_dir("errors");
  std::ostringstream err;
  CommandOptions opts;
  opts.out = dir / "out.csv";

  spit(dir / "alpha.json", R"({"alpha": 1.5})");
  opts.config = dir / "alpha.json";
  CHECK(cmd_sweep(opts, err) == kExitConfig);
  CHECK(err.str().find("alpha") != std::string::npos);

  spit(dir / "unknown.json", R"({"alpha": 0.9, "mirrors": 3})");
  opts.config = dir / "unknown.json";
  CHECK(cmd_sweep(opts, err) == kExitConfig);

  spit(dir / "garbled.json", R"({"alpha": )");
  opts.config = dir / "garbled.json";
  CHECK(cmd_sweep(opts, err) == kExitConfig);

  opts.config = dir / "missing.json";
  CHECK(cmd_sweep(opts, err) == kExitIo);

  spit(dir / "empty_grid.json", R"({"alpha_grid": []})");
  opts.config = dir / "empty_grid.json";
  CHECK(cmd_alpha_scan(opts, err) == kExitConfig);

  spit(dir / "three.json", R"({"phi0_grid": {"count": 3}})");
  opts.config = dir / "three.json";
  CHECK(cmd_switch_compare(opts, err) == kExitConfig);

  spit(dir / "small.json", kSmallConfig);
  opts.config = dir / "small.json";
  opts.out = dir / "no_such_dir" / "out.csv";
  CHECK(cmd_sweep(opts, err) == kExitIo);

  CommandOptions fit;
  fit.in = dir / "absent.csv";
  fit.out = dir / "fit.csv";
  CHECK(cmd_fit(fit, err) == kExitIo);
}

TEST_CASE("fit command on sweep output") {
  const auto dir = scratch_dir("fit");
  spit(dir / "small.json", kSmallConfig);
  std::ostringstream err;
  CommandOptions sweep;
  sweep.config = dir / "small.json";
  sweep.out = dir / "records.csv";
  REQUIRE(cmd_sweep(sweep, err) == kExitOk);

  CommandOptions fit;
  fit.in = sweep.out;
  fit.out = dir / "fits.csv";
  CHECK(cmd_fit(fit, err) == kExitOk);
  const auto rows = data_lines(slurp(fit.out));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].rfind("fixed-1,all,", 0) == 0);
  CHECK(rows[1].rfind("fixed+1,all,", 0) == 0);
  CHECK(rows[2].rfind("random,all,", 0) == 0);
  CHECK(rows[3].rfind("random,x=-1,", 0) == 0);
  CHECK(rows[4].rfind("random,x=+1,", 0) == 0);
}

TEST_CASE("switch-compare command") {
  const auto dir = scratch_dir("switch");
  spit(dir / "small.json", R"({"photons_per_set": 500, "sets_per_protocol": 2})");
  std::ostringstream err;
  CommandOptions opts;
  opts.config = dir / "small.json";
  opts.out = dir / "switch.csv";
  opts.threads = 2;
  CHECK(cmd_switch_compare(opts, err) == kExitOk);
  const auto rows = data_lines(slurp(opts.out));
  // Per context: 16 fringe points and one fit row per protocol, one summary.
  CHECK(rows.size() == 3 * (2 * 17 + 1));
  int summaries = 0;
  for (const auto& r : rows) summaries += r.rfind("summary,random-vs-random-per-10,", 0) == 0;
  CHECK(summaries == 3);
}

TEST_CASE("alpha-scan command with defaults" * doctest::timeout(120)) {
  const auto dir = scratch_dir("alpha");
  std::ostringstream err;
  CommandOptions opts;
  opts.out = dir / "scan.csv";
  opts.threads = 4;
  REQUIRE(cmd_alpha_scan(opts, err) == kExitOk);
  const auto rows = data_lines(slurp(opts.out));
  REQUIRE(rows.size() == 12);
  for (const auto& line : rows) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 7);
    const double reduced = std::stod(cells[5]);
    CAPTURE(line);
    CHECK(cells[6] == "0");
    if (cells[2] == "EBCM") {
      CHECK(reduced > 20.0);
    } else {
      CHECK(cells[0].empty());
      CHECK(reduced < 3.0);
    }
  }
  const auto meta = nlohmann::json::parse(slurp(meta_path_for(opts.out)));
  CHECK(meta["replicas"] == 20);
  CHECK(meta["replica_seeds"].size() == 20);
}

TEST_CASE("command line parsing") {
  const auto dir = scratch_dir("argv");
  const std::string out = (dir / "r.csv").string();
  const std::string cfg = (dir / "small.json").string();
  spit(cfg, kSmallConfig);

  auto run = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(run({"ebcm", "sweep", "--config", cfg, "--out", out, "--seed", "5", "--threads", "2"}) ==
        kExitOk);
  CHECK(nlohmann::json::parse(slurp(meta_path_for(out)))["master_seed"] == 5);
  CHECK(run({"ebcm", "teleport", "--out", out}) == kExitConfig);
  CHECK(run({"ebcm", "sweep"}) == kExitConfig);
  CHECK(run({"ebcm", "sweep", "--out", out, "--threads", "0"}) == kExitConfig);
  CHECK(run({"ebcm", "fit", "--in", out, "--out", (dir / "f.csv").string()}) == kExitOk);
}

TEST_CASE("golden sweep table") {
  const fs::path golden = fs::path(EBCM_GOLDEN_DIR) / "sweep_small.csv";
  REQUIRE(fs::exists(golden));
  const auto dir = scratch_dir("golden");
  spit(dir / "small.json", kSmallConfig);
  std::ostringstream err;
  CommandOptions opts;
  opts.config = dir / "small.json";
  opts.out = dir / "sweep.csv";
  REQUIRE(cmd_sweep(opts, err) == kExitOk);
  CHECK(slurp(opts.out) == slurp(golden));
}

}  // TEST_SUITE
