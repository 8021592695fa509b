// Copyright 2026 The nashmodes Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end tests of the command-line binary. The binary path arrives as
// argv[1]; every case shells out and inspects exit codes and artifacts.

#define DOCTEST_CONFIG_IMPLEMENT
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "nashmodes/serialize.hpp"

namespace {

std::string g_cli;
std::filesystem::path g_work;

struct RunOutput {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunOutput run_cli(const std::string& args, const std::string& env = "") {
  const auto out_path = g_work / "stdout.txt";
  const auto err_path = g_work / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + g_cli + " " + args +
                          " > " + out_path.string() + " 2> " +
                          err_path.string();
  const int status = std::system(cmd.c_str());
  RunOutput result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = nashmodes::read_file(out_path.string());
  result.err = nashmodes::read_file(err_path.string());
  return result;
}

std::string work(const std::string& relative) {
  return (g_work / relative).string();
}

// Generates one yield scene once; most cases reuse it.
std::string shared_scenario() {
  static std::string path;
  if (path.empty()) {
    const RunOutput r =
        run_cli("gen --archetype yield --seeds 1 --out " + work("gen"));
    REQUIRE(r.exit_code == 0);
    path = work("gen/scenarios/yield/1.json");
    REQUIRE(std::filesystem::exists(path));
  }
  return path;
}

}  // namespace

TEST_CASE("gen writes the scenario layout and a manifest") {
  const RunOutput r = run_cli("gen --archetype follow --seeds 3,4 --out " +
                              work("gen_follow"));
  CHECK(r.exit_code == 0);
  CHECK(std::filesystem::exists(work("gen_follow/scenarios/follow/3.json")));
  CHECK(std::filesystem::exists(work("gen_follow/scenarios/follow/4.json")));
  const nlohmann::json manifest = nlohmann::json::parse(
      nashmodes::read_file(work("gen_follow/manifest.json")));
  CHECK(manifest.at("command")[0] == "gen");
  CHECK(manifest.at("outputs").size() == 2);
  CHECK(manifest.contains("tool_version"));
  CHECK(manifest.contains("wall_clock_ms"));
}

TEST_CASE("verify passes on the built-in game and prints the partition sum") {
  const RunOutput r =
      run_cli("verify --game chicken --samples 20000 --out " + work("verify"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("Z=1.000000000") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  const nlohmann::json report =
      nlohmann::json::parse(nashmodes::read_file(work("verify/verify.json")));
  CHECK(report.at("pass") == true);
}

TEST_CASE("verification failure exits 2 with a machine-readable error") {
  const RunOutput r = run_cli(
      "verify --game chicken --samples 2000 --tolerance=-1 --out " +
      work("verify_fail"));
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("FAIL") != std::string::npos);
  const nlohmann::json error = nlohmann::json::parse(r.err);
  CHECK(error.at("error").at("type") == "verification");
  // The report is still written for inspection.
  CHECK(std::filesystem::exists(work("verify_fail/verify.json")));
}

TEST_CASE("missing input exits 3 with an io error naming the path") {
  const RunOutput r =
      run_cli("solve --scenario no_such.json --out " + work("io_err"));
  CHECK(r.exit_code == 3);
  const nlohmann::json error = nlohmann::json::parse(r.err);
  CHECK(error.at("error").at("type") == "io");
  CHECK(error.at("error").at("message").get<std::string>().find(
            "no_such.json") != std::string::npos);
}

TEST_CASE("unknown flag exits 1 with a usage error") {
  const RunOutput r = run_cli("solve --bogus 1");
  CHECK(r.exit_code == 1);
  const nlohmann::json error = nlohmann::json::parse(r.err);
  CHECK(error.at("error").at("type") == "usage");
}

TEST_CASE("train emits the metrics csv with coverage growing in gamma") {
  const std::string scenario = shared_scenario();
  const RunOutput r = run_cli("train --scenarios " + scenario +
                              " --gamma 0,10 --out " + work("train"));
  REQUIRE(r.exit_code == 0);
  std::istringstream csv(nashmodes::read_file(work("train/metrics.csv")));
  std::string header;
  REQUIRE(std::getline(csv, header));
  CHECK(header ==
        "scenario_id,gamma,minADE_m,kl,n_modes,H_util,H_yield,H_follow,H_ttc");
  std::vector<int> n_modes;
  for (std::string line; std::getline(csv, line);) {
    std::istringstream fields(line);
    std::string field;
    for (int f = 0; f < 5; ++f) std::getline(fields, field, ',');
    n_modes.push_back(std::stoi(field));
  }
  REQUIRE(n_modes.size() == 2);
  CHECK(n_modes[0] == 1);   // gamma = 0
  CHECK(n_modes[1] >= 2);   // gamma = 10
}

TEST_CASE("parallel training merges rows in deterministic order") {
  const std::string scenario = shared_scenario();
  const RunOutput r1 =
      run_cli("train --scenarios " + scenario + " --gamma 0,1,10 --jobs 1" +
              " --out " + work("train_j1"));
  const RunOutput r3 =
      run_cli("train --scenarios " + scenario + " --gamma 0,1,10 --jobs 3" +
              " --out " + work("train_j3"));
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r3.exit_code == 0);
  CHECK(nashmodes::read_file(work("train_j1/metrics.csv")) ==
        nashmodes::read_file(work("train_j3/metrics.csv")));
}

TEST_CASE("replay reproduces csv and json outputs byte for byte") {
  const std::string scenario = shared_scenario();
  REQUIRE(run_cli("train --scenarios " + scenario + " --gamma 0,10 --out " +
                  work("replay_train"))
              .exit_code == 0);
  REQUIRE(run_cli("modes --scenario " + scenario + " --out " +
                  work("replay_modes"))
              .exit_code == 0);
  const std::string csv_before =
      nashmodes::read_file(work("replay_train/metrics.csv"));
  const std::string json_before =
      nashmodes::read_file(work("replay_modes/modes.json"));
  // Clobber the artifacts so replay has to rebuild them.
  std::filesystem::remove(work("replay_train/metrics.csv"));
  std::filesystem::remove(work("replay_modes/modes.json"));
  REQUIRE(run_cli("replay --manifest " + work("replay_train/manifest.json"))
              .exit_code == 0);
  REQUIRE(run_cli("replay --manifest " + work("replay_modes/manifest.json"))
              .exit_code == 0);
  CHECK(nashmodes::read_file(work("replay_train/metrics.csv")) == csv_before);
  CHECK(nashmodes::read_file(work("replay_modes/modes.json")) == json_before);
}

TEST_CASE("nes sampling covers at least both dominant modes") {
  const std::string scenario = shared_scenario();
  const RunOutput r = run_cli("sample --scenario " + scenario +
                              " --sampler nes --count 4 --out " +
                              work("sample"));
  REQUIRE(r.exit_code == 0);
  const nlohmann::json selection = nlohmann::json::parse(
      nashmodes::read_file(work("sample/selection.json")));
  CHECK(selection.at("picks").size() == 4);
  CHECK(selection.at("mode_coverage").get<int>() >= 2);
}

TEST_CASE("plot renders svg deterministically") {
  const std::string scenario = shared_scenario();
  REQUIRE(run_cli("plot --scenario " + scenario + " --count 4 --out " +
                  work("plot_a"))
              .exit_code == 0);
  REQUIRE(run_cli("plot --scenario " + scenario + " --count 4 --out " +
                  work("plot_b"))
              .exit_code == 0);
  const std::string svg = nashmodes::read_file(work("plot_a/scene.svg"));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg == nashmodes::read_file(work("plot_b/scene.svg")));
  CHECK(nashmodes::read_file(work("plot_a/curves.svg")) ==
        nashmodes::read_file(work("plot_b/curves.svg")));
}

TEST_CASE("NASHMODES_SEED sets the run seed recorded in the manifest") {
  const std::string scenario = shared_scenario();
  const RunOutput r = run_cli("irl-fit --scenario " + scenario +
                                  " --rollouts 50 --steps 5 --out " +
                                  work("seed_env"),
                              "NASHMODES_SEED=99");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json manifest = nlohmann::json::parse(
      nashmodes::read_file(work("seed_env/manifest.json")));
  CHECK(manifest.at("seed") == 99);
}

TEST_CASE("irl-fit lowers the loss and saves a loadable model") {
  const std::string scenario = shared_scenario();
  const RunOutput r = run_cli("irl-fit --scenario " + scenario +
                              " --rollouts 500 --steps 50 --out " +
                              work("fit"));
  REQUIRE(r.exit_code == 0);
  const nashmodes::ModelFile model =
      nashmodes::load_model(work("fit/model.json"));
  REQUIRE(model.loss_curve.size() > 1);
  CHECK(model.loss_curve.back() < model.loss_curve.front());
  CHECK(std::filesystem::exists(work("fit/dataset.jsonl")));
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary>\n");
    return 1;
  }
  g_cli = argv[1];
  g_work = std::filesystem::temp_directory_path() / "nashmodes_cli_test";
  std::filesystem::remove_all(g_work);
  std::filesystem::create_directories(g_work);
  doctest::Context context;
  context.applyCommandLine(1, argv);
  const int status = context.run();
  std::filesystem::remove_all(g_work);
  return status;
}
