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

// Command-line surface for the pipeline: scenario generation, equilibrium
// solving, imitation fitting, lemma verification, mode finding, sampling,
// predictor training, diversity evaluation, and SVG plotting.
//
// Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
// Failures print a machine-readable JSON object on stderr. Every run writes a
// manifest next to its outputs; `replay --manifest <path>` re-executes the
// recorded command and reproduces the outputs byte for byte.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nashmodes/diversity.hpp"
#include "nashmodes/game.hpp"
#include "nashmodes/irl.hpp"
#include "nashmodes/modes.hpp"
#include "nashmodes/predictor.hpp"
#include "nashmodes/sampling.hpp"
#include "nashmodes/scenario.hpp"
#include "nashmodes/serialize.hpp"
#include "nashmodes/svg.hpp"

namespace nashmodes {
namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

// A check that ran to completion and found the property violated.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("NASHMODES_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

SoftEquilibrium quiet_solve(const TabularGame& game) {
  SolveOptions options;
  options.warn_on_nonconvergence = false;
  return solve_soft_equilibrium(game, options);
}

// The 2-agent, 2-control merge standoff used by `verify --game chicken`:
// positions 0..2 on crossing approaches, simultaneous entry into the middle
// cell is penalized.
TabularGame build_chicken_game() {
  TabularGame game;
  game.id = "chicken";
  game.num_agents = 2;
  game.horizon = 2;
  game.control_names = {{"wait", "go"}, {"wait", "go"}};
  const int positions = 3;
  const int nx = positions * positions;
  game.states.resize(nx);
  game.transitions.assign(nx, std::vector<int>(4, 0));
  game.rewards.assign(
      2, std::vector<std::vector<double>>(nx, std::vector<double>(4, 0.0)));
  for (int p1 = 0; p1 < positions; ++p1) {
    for (int p2 = 0; p2 < positions; ++p2) {
      const int x = p1 * positions + p2;
      game.states[x] = {{p1 * 12.0, 0.0, 0.0, 0.0},
                        {0.0, p2 * 12.0, 0.0, M_PI / 2.0}};
      for (int f = 0; f < 4; ++f) {
        const int u1 = f % 2;
        const int u2 = f / 2;
        const int n1 = std::min(p1 + u1, positions - 1);
        const int n2 = std::min(p2 + u2, positions - 1);
        game.transitions[x][f] = n1 * positions + n2;
        const bool conflict = n1 == 1 && n2 == 1;
        game.rewards[0][x][f] = conflict ? -5.0 : (u1 ? 1.0 : 0.0);
        game.rewards[1][x][f] = conflict ? -5.0 : (u2 ? 1.0 : 0.0);
      }
    }
  }
  return game;
}

// Per-run bookkeeping shared by all subcommands.
struct RunContext {
  std::vector<std::string> argv;  // subcommand plus its flags
  std::uint64_t seed = 0;
  std::string out_dir;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;  // paths relative to out_dir
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  std::string path_of(const std::string& relative) const {
    return (std::filesystem::path(out_dir) / relative).string();
  }

  // Registers the artifact in the manifest and returns its absolute path.
  std::string claim(const std::string& relative) {
    std::filesystem::create_directories(
        std::filesystem::path(path_of(relative)).parent_path());
    outputs.push_back(relative);
    return path_of(relative);
  }

  void emit(const std::string& relative, const std::string& content) {
    write_file_atomic(claim(relative), content);
  }

  void write_manifest() {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    json manifest;
    manifest["schema_version"] = 1;
    manifest["tool_version"] = kToolVersion;
    manifest["command"] = argv;
    manifest["seed"] = seed;
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    manifest["wall_clock_ms"] = elapsed.count();
    std::filesystem::create_directories(out_dir);
    write_file_atomic(path_of("manifest.json"), manifest.dump(2) + "\n");
  }
};

Scenario load_scenario_input(RunContext& ctx, const std::string& path) {
  ctx.inputs.push_back(path);
  return load_scenario(path);
}

// Enumerated trajectory distribution of a scene as a SampleSet, probability
// order. Both score channels carry the log-probability so samplers that read
// predictor weights stay usable without a predictor.
struct EnumeratedScene {
  std::vector<ScoredTrajectory> all;  // descending log-probability
  SampleSet samples;
};

EnumeratedScene enumerate_scene(const TabularGame& game, int initial_state,
                                const AdvantageSource& src) {
  EnumeratedScene scene;
  scene.all = enumerate_all_trajectories(game, initial_state, src);
  std::stable_sort(scene.all.begin(), scene.all.end(),
                   [](const ScoredTrajectory& a, const ScoredTrajectory& b) {
                     return a.log_prob > b.log_prob;
                   });
  for (const ScoredTrajectory& s : scene.all) {
    scene.samples.trajectories.push_back(s.trajectory);
    scene.samples.advantages.push_back(s.log_prob);
    scene.samples.weight_logits.push_back(s.log_prob);
  }
  return scene;
}

json selection_to_json(const SelectionResult& sel, const SampleSet& samples,
                       const std::vector<int>& labels) {
  json picks = json::array();
  for (size_t n = 0; n < sel.indices.size(); ++n) {
    const int idx = sel.indices[n];
    picks.push_back({{"index", idx},
                     {"tag", sel.tags[n]},
                     {"mode_label", labels[idx]},
                     {"log_prob", samples.advantages[idx]}});
  }
  return picks;
}

// ---------------------------------------------------------------------------
// gen

int run_gen(RunContext& ctx, const std::string& archetype_name,
            const std::vector<std::uint64_t>& seeds, int horizon) {
  const Archetype archetype = parse_archetype(archetype_name);
  ScenarioParams params;
  if (horizon > 0) params.horizon = horizon;
  for (std::uint64_t seed : seeds) {
    const Scenario scenario = generate_scenario(archetype, params, seed);
    const std::string relative = "scenarios/" + archetype_name + "/" +
                                 std::to_string(seed) + ".json";
    save_scenario(scenario, ctx.claim(relative));
  }
  std::cout << "generated " << seeds.size() << " " << archetype_name
            << " scenario(s) under " << ctx.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// solve

int run_solve(RunContext& ctx, const std::string& scenario_path) {
  const Scenario scenario = load_scenario_input(ctx, scenario_path);
  const SoftEquilibrium eq = quiet_solve(scenario.game);
  json j;
  j["scenario_id"] = scenario.id;
  j["converged"] = eq.converged;
  j["residual"] = eq.residual;
  j["values"] = eq.values;
  j["policies"] = eq.policies;
  ctx.emit("equilibrium.json", j.dump(2) + "\n");
  std::cout << "solved " << scenario.id
            << " residual=" << format_double(eq.residual) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// irl-fit

int run_irl_fit(RunContext& ctx, const std::string& scenario_path,
                const std::string& dataset_path, int rollouts, int steps,
                double learning_rate) {
  const Scenario scenario = load_scenario_input(ctx, scenario_path);
  TrajectoryDataset data;
  if (!dataset_path.empty()) {
    ctx.inputs.push_back(dataset_path);
    data = load_dataset(dataset_path);
  } else {
    const SoftEquilibrium eq = quiet_solve(scenario.game);
    data.game_id = scenario.id;
    data.seed = ctx.seed;
    for (int s = 0; s < rollouts; ++s) {
      data.trajectories.push_back(
          rollout(eq, scenario.game, scenario.initial_state, ctx.seed + s));
    }
    save_dataset(data, ctx.claim("dataset.jsonl"));
  }

  AdvantageModel::Dims dims;
  dims.horizon = scenario.game.horizon;
  dims.num_agents = scenario.game.num_agents;
  dims.num_states = scenario.game.num_states();
  for (int i = 0; i < scenario.game.num_agents; ++i) {
    dims.num_controls.push_back(scenario.game.num_controls(i));
  }
  FitConfig config;
  config.steps = steps;
  config.learning_rate = learning_rate;
  const FitResult fit = fit_advantage_model(data, dims, config);

  ModelFile model;
  model.dims = dims;
  model.theta = fit.model.params();
  model.game_id = scenario.id;
  model.loss_curve = fit.loss_curve;
  save_model(model, ctx.claim("model.json"));
  std::cout << "fit " << data.trajectories.size() << " trajectories, loss "
            << format_double(fit.loss_curve.front()) << " -> "
            << format_double(fit.loss_curve.back()) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(RunContext& ctx, const std::string& game_name,
               const std::string& scenario_path, int samples,
               double tolerance) {
  TabularGame game;
  int initial_state = 0;
  if (!scenario_path.empty()) {
    const Scenario scenario = load_scenario_input(ctx, scenario_path);
    game = scenario.game;
    initial_state = scenario.initial_state;
  } else if (game_name == "chicken") {
    game = build_chicken_game();
  } else {
    throw std::invalid_argument("verify: unknown game '" + game_name +
                                "'; use --game chicken or --scenario");
  }
  const SoftEquilibrium eq = quiet_solve(game);

  json report;
  report["game_id"] = game.id;
  bool ok = true;

  // Lemma 1: the exponentiated cumulative advantages are a probability
  // distribution over the enumerable trajectory space.
  const double z = verify_partition_unity(eq, game, initial_state);
  const bool lemma1 = std::abs(z - 1.0) <= tolerance;
  ok = ok && lemma1;
  char z_text[64];
  std::snprintf(z_text, sizeof(z_text), "%.9f", z);
  std::cout << "lemma1 partition unity: Z=" << z_text << " |Z-1|<="
            << format_double(tolerance) << " "
            << (lemma1 ? "PASS" : "FAIL") << "\n";
  report["lemma1"] = {{"z", z}, {"pass", lemma1}};

  // Lemma 2: the sampled imitation loss estimates the exact cross entropy,
  // for the true model and for a perturbed one.
  AdvantageModel::Dims dims;
  dims.horizon = game.horizon;
  dims.num_agents = game.num_agents;
  dims.num_states = game.num_states();
  for (int i = 0; i < game.num_agents; ++i) {
    dims.num_controls.push_back(game.num_controls(i));
  }
  AdvantageModel perturbed = AdvantageModel::tabular(dims);
  {
    std::mt19937_64 rng(ctx.seed + 1);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<double> theta(perturbed.params().size());
    for (int t = 0; t < dims.horizon; ++t) {
      for (int i = 0; i < dims.num_agents; ++i) {
        for (int x = 0; x < dims.num_states; ++x) {
          for (int u = 0; u < dims.num_controls[i]; ++u) {
            theta[perturbed.tabular_index(t, i, x, u)] =
                eq.q_values[t][i][x][u] + noise(rng);
          }
        }
      }
    }
    perturbed.set_params(theta);
  }
  const struct {
    const char* name;
    const AdvantageSource* model;
  } cases[] = {{"true model", &eq}, {"perturbed model", &perturbed}};
  for (const auto& c : cases) {
    const CrossEntropyCheck check = verify_cross_entropy_equivalence(
        *c.model, eq, game, initial_state, samples, ctx.seed);
    const double delta = std::abs(check.lhs - check.rhs);
    const bool pass = delta <= 3.0 * check.stderr_;
    ok = ok && pass;
    std::cout << "lemma2 (" << c.name << "): |delta|=" << format_double(delta)
              << " 3*stderr=" << format_double(3.0 * check.stderr_) << " "
              << (pass ? "PASS" : "FAIL") << "\n";
    report["lemma2"][c.name] = {{"lhs", check.lhs},
                                {"rhs", check.rhs},
                                {"stderr", check.stderr_},
                                {"pass", pass}};
  }

  report["pass"] = ok;
  ctx.emit("verify.json", report.dump(2) + "\n");
  if (!ok) {
    throw VerificationFailure("lemma verification failed for " +
                              (game.id.empty() ? game_name : game.id));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// modes

int run_modes(RunContext& ctx, const std::string& scenario_path,
              double bandwidth, double rho) {
  const Scenario scenario = load_scenario_input(ctx, scenario_path);
  const SoftEquilibrium eq = quiet_solve(scenario.game);
  const EnumeratedScene scene =
      enumerate_scene(scenario.game, scenario.initial_state, eq);
  const ModeSet modes = mean_shift_modes(scene.samples, bandwidth);
  const Histogram q_star = ideal_histogram(
      scene.samples.advantages, modes.labels, modes.num_modes(), rho);
  const Histogram q = empirical_histogram(scene.samples, modes.labels,
                                          modes.num_modes());

  json j;
  j["scenario_id"] = scenario.id;
  j["bandwidth_m"] = bandwidth;
  j["rho"] = rho;
  j["num_modes"] = modes.num_modes();
  j["representatives"] = modes.representatives;
  j["scores"] = modes.scores;
  j["labels"] = modes.labels;
  j["q"] = q;
  j["q_star"] = q_star;
  j["kl"] = kl_divergence(q, q_star);
  ctx.emit("modes.json", j.dump(2) + "\n");
  std::cout << scenario.id << ": " << modes.num_modes() << " mode(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sample

int run_sample(RunContext& ctx, const std::string& scenario_path,
               const std::string& sampler, int count, double threshold,
               double bandwidth) {
  const Scenario scenario = load_scenario_input(ctx, scenario_path);
  const SoftEquilibrium eq = quiet_solve(scenario.game);
  const EnumeratedScene scene =
      enumerate_scene(scenario.game, scenario.initial_state, eq);
  const ModeSet modes = mean_shift_modes(scene.samples, bandwidth);

  SelectionResult sel;
  if (sampler == "fps") {
    sel = fps(scene.samples, count);
  } else if (sampler == "nms") {
    sel = nms(scene.samples, threshold, count);
  } else if (sampler == "nes") {
    sel = nes(scene.samples, modes, count, threshold);
  } else {
    throw std::invalid_argument("sample: unknown sampler '" + sampler +
                                "'; expected fps, nms, or nes");
  }

  json j;
  j["scenario_id"] = scenario.id;
  j["sampler"] = sampler;
  j["count"] = count;
  j["num_modes"] = modes.num_modes();
  j["picks"] = selection_to_json(sel, scene.samples, modes.labels);
  j["mode_coverage"] = mode_coverage_count(sel.indices, modes.labels);
  ctx.emit("selection.json", j.dump(2) + "\n");
  std::cout << scenario.id << ": " << sampler << " covered "
            << j["mode_coverage"].get<int>() << " of " << modes.num_modes()
            << " mode(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainTask {
  std::string scenario_path;
  double gamma = 0.0;
};

struct TrainRow {
  std::string scenario_id;
  double gamma = 0.0;
  double min_ade = 0.0;
  double kl = 0.0;
  int n_modes = 0;
  EntropyMetrics entropy;
};

TrainRow run_train_task(const TrainTask& task, int components, int steps,
                        std::uint64_t run_seed) {
  const Scenario scenario = load_scenario(task.scenario_path);
  const SoftEquilibrium eq = quiet_solve(scenario.game);
  TrainConfig config;
  config.gamma = task.gamma;
  config.steps = steps;
  config.seed = run_seed * 1000003ULL + scenario.seed;
  const TrainResult result =
      train_toy_predictor(scenario.game, eq, scenario.initial_state,
                          scenario.ground_truth, components, config);

  // Semantic diversity of the trained joint samples, weighted by the
  // predictor's joint weights; advantages come from the nearest enumerated
  // trajectory, matching the training-time snap.
  const EnumeratedScene scene =
      enumerate_scene(scenario.game, scenario.initial_state, eq);
  JointAssembly assembly = joint_assembly(result.pred);
  for (int k = 0; k < components; ++k) {
    double best_dist = std::numeric_limits<double>::infinity();
    for (const ScoredTrajectory& cand : scene.all) {
      const double d = trajectory_distance(assembly.samples.trajectories[k],
                                           cand.trajectory);
      if (d < best_dist) {
        best_dist = d;
        assembly.samples.advantages[k] = cand.log_prob;
      }
    }
  }

  TrainRow row;
  row.scenario_id = scenario.id;
  row.gamma = task.gamma;
  row.min_ade = result.min_ade;
  row.kl = result.coverage_kl;
  row.n_modes = result.n_modes;
  row.entropy = semantic_entropies(assembly.samples, result.final_weights,
                                   scenario.dt);
  return row;
}

int run_train(RunContext& ctx, const std::vector<std::string>& scenario_paths,
              const std::vector<double>& gammas, int components, int steps,
              int jobs) {
  std::vector<TrainTask> tasks;
  for (const std::string& path : scenario_paths) {
    ctx.inputs.push_back(path);
    for (double gamma : gammas) tasks.push_back({path, gamma});
  }
  if (tasks.empty()) {
    throw std::invalid_argument("train: no scenarios given");
  }

  // Tasks are independent; run them on a small worker pool and merge the rows
  // back in task order so the CSV is deterministic.
  std::vector<TrainRow> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<size_t> next{0};
  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  auto worker = [&]() {
    for (size_t n = next.fetch_add(1); n < tasks.size();
         n = next.fetch_add(1)) {
      try {
        rows[n] = run_train_task(tasks[n], components, steps, ctx.seed);
      } catch (const std::exception& e) {
        errors[n] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::string& error : errors) {
    if (!error.empty()) throw std::runtime_error("train: " + error);
  }

  std::ostringstream csv;
  csv << "scenario_id,gamma,minADE_m,kl,n_modes,H_util,H_yield,H_follow,"
         "H_ttc\n";
  for (const TrainRow& row : rows) {
    csv << row.scenario_id << "," << format_double(row.gamma) << ","
        << format_double(row.min_ade) << "," << format_double(row.kl) << ","
        << row.n_modes << "," << format_double(row.entropy.h_util) << ","
        << format_double(row.entropy.h_yield) << ","
        << format_double(row.entropy.h_follow) << ","
        << format_double(row.entropy.h_ttc) << "\n";
  }
  ctx.emit("metrics.csv", csv.str());
  std::cout << "trained " << tasks.size() << " run(s) -> "
            << ctx.path_of("metrics.csv") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int run_eval(RunContext& ctx, const std::string& scenario_path, int count,
             double bandwidth) {
  const Scenario scenario = load_scenario_input(ctx, scenario_path);
  const SoftEquilibrium eq = quiet_solve(scenario.game);
  const EnumeratedScene scene =
      enumerate_scene(scenario.game, scenario.initial_state, eq);
  const ModeSet modes = mean_shift_modes(scene.samples, bandwidth);

  std::ostringstream csv;
  csv << "sampler,count,mode_coverage,num_modes,H_util,H_yield,H_follow,"
         "H_ttc\n";
  const struct {
    const char* name;
    SelectionResult sel;
  } rows[] = {
      {"fps", fps(scene.samples, count)},
      {"nms", nms(scene.samples, kNmsSmallThreshold, count)},
      {"nes", nes(scene.samples, modes, count)},
  };
  for (const auto& row : rows) {
    SampleSet picked;
    std::vector<double> weights;
    for (int idx : row.sel.indices) {
      picked.trajectories.push_back(scene.samples.trajectories[idx]);
      picked.advantages.push_back(scene.samples.advantages[idx]);
      picked.weight_logits.push_back(scene.samples.weight_logits[idx]);
      weights.push_back(std::exp(scene.samples.advantages[idx]));
    }
    const EntropyMetrics m = semantic_entropies(picked, weights, scenario.dt);
    csv << row.name << "," << count << ","
        << mode_coverage_count(row.sel.indices, modes.labels) << ","
        << modes.num_modes() << "," << format_double(m.h_util) << ","
        << format_double(m.h_yield) << "," << format_double(m.h_follow) << ","
        << format_double(m.h_ttc) << "\n";
  }
  ctx.emit("diversity.csv", csv.str());
  std::cout << scenario.id << ": diversity table -> "
            << ctx.path_of("diversity.csv") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// plot

int run_plot(RunContext& ctx, const std::string& scenario_path, int count,
             double bandwidth) {
  const Scenario scenario = load_scenario_input(ctx, scenario_path);
  const SoftEquilibrium eq = quiet_solve(scenario.game);
  const EnumeratedScene scene =
      enumerate_scene(scenario.game, scenario.initial_state, eq);
  const ModeSet modes = mean_shift_modes(scene.samples, bandwidth);

  // Bird's-eye view of the NES selection, colored by mode label.
  const SelectionResult sel = nes(scene.samples, modes, count);
  ScenePlot plot;
  plot.title = scenario.id;
  plot.map_polylines = scenario.map_polylines;
  for (int idx : sel.indices) {
    plot.trajectories.push_back(scene.samples.trajectories[idx]);
    plot.labels.push_back(modes.labels[idx]);
  }
  ctx.emit("scene.svg", render_scene(plot));

  // Mode coverage and minADE against the selection size.
  CurvePlot curves;
  curves.title = scenario.id + " coverage vs samples";
  curves.x_label = "samples";
  curves.y_label = "count / meters";
  CurveSeries coverage{"mode coverage", {}};
  CurveSeries ade{"minADE (m)", {}};
  for (int n = 1; n <= count; ++n) {
    const SelectionResult step = nes(scene.samples, modes, n);
    coverage.points.push_back(
        {static_cast<double>(n),
         static_cast<double>(mode_coverage_count(step.indices, modes.labels))});
    double best = std::numeric_limits<double>::infinity();
    for (int idx : step.indices) {
      double sum = 0.0;
      const JointTrajectory& traj = scene.samples.trajectories[idx];
      for (int t = 0; t < scenario.game.horizon; ++t) {
        for (int i = 0; i < scenario.game.num_agents; ++i) {
          sum += std::sqrt(squared_dist(traj.states[t][i],
                                        scenario.ground_truth.states[t][i]));
        }
      }
      best = std::min(
          best, sum / (scenario.game.horizon * scenario.game.num_agents));
    }
    ade.points.push_back({static_cast<double>(n), best});
  }
  curves.series = {coverage, ade};
  ctx.emit("curves.svg", render_curves(curves));
  std::cout << scenario.id << ": wrote scene.svg and curves.svg\n";
  return 0;
}

// ---------------------------------------------------------------------------
// dispatch

int dispatch(const std::vector<std::string>& args);

int run_replay(const std::string& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(manifest_path + ": " + e.what());
  }
  const std::vector<std::string> command =
      manifest.at("command").get<std::vector<std::string>>();
  if (!command.empty() && command[0] == "replay") {
    throw std::invalid_argument("replay: manifest records a replay command");
  }
  return dispatch(command);
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"max-entropy dynamic game toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = default_seed();
  app.add_option("--seed", seed,
                 "run seed (default: NASHMODES_SEED env var or 0)");

  std::string out_dir = ".";
  std::string scenario_path;
  std::string dataset_path;
  std::string game_name;
  std::string archetype = "yield";
  std::string sampler = "nes";
  std::string manifest_path;
  std::vector<std::string> scenario_paths;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> gammas{0.0, 10.0};
  int horizon = 0;
  int rollouts = 5000;
  int fit_steps = 400;
  int train_steps = 300;
  int components = 4;
  int count = 4;
  int samples = 100000;
  int jobs = 1;
  double learning_rate = 2.0;
  double threshold = kNmsSmallThreshold;
  double bandwidth = kDefaultBandwidth;
  double rho = 1.0;

  CLI::App* gen = app.add_subcommand("gen", "generate scenarios");
  gen->add_option("--archetype", archetype, "yield, follow, or low_ttc");
  gen->add_option("--seeds", seeds, "scenario seeds")->delimiter(',');
  gen->add_option("--horizon", horizon, "override the horizon (<= 8)");
  gen->add_option("--out", out_dir, "output directory");

  CLI::App* solve = app.add_subcommand("solve", "dump the soft equilibrium");
  solve->add_option("--scenario", scenario_path, "scenario JSON")->required();
  solve->add_option("--out", out_dir, "output directory");

  CLI::App* irl_fit =
      app.add_subcommand("irl-fit", "fit an advantage model to rollouts");
  irl_fit->add_option("--scenario", scenario_path, "scenario JSON")
      ->required();
  irl_fit->add_option("--dataset", dataset_path,
                      "JSONL dataset (default: roll out internally)");
  irl_fit->add_option("--rollouts", rollouts, "rollouts when no dataset");
  irl_fit->add_option("--steps", fit_steps, "gradient steps");
  irl_fit->add_option("--lr", learning_rate, "learning rate");
  irl_fit->add_option("--out", out_dir, "output directory");

  CLI::App* verify =
      app.add_subcommand("verify", "check the partition and cross-entropy "
                                   "identities");
  verify->add_option("--game", game_name, "built-in game (chicken)");
  verify->add_option("--scenario", scenario_path, "scenario JSON");
  verify->add_option("--samples", samples, "Monte-Carlo rollouts");
  double verify_tolerance = 1e-9;
  verify->add_option("--tolerance", verify_tolerance,
                     "allowed |Z - 1| for the partition check");
  verify->add_option("--out", out_dir, "output directory");

  CLI::App* modes_cmd =
      app.add_subcommand("modes", "mean-shift modes and histograms");
  modes_cmd->add_option("--scenario", scenario_path, "scenario JSON")
      ->required();
  modes_cmd->add_option("--bandwidth", bandwidth, "mode bandwidth (m)");
  modes_cmd->add_option("--rho", rho, "ideal histogram sharpness");
  modes_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* sample = app.add_subcommand("sample", "select trajectories");
  sample->add_option("--scenario", scenario_path, "scenario JSON")->required();
  sample->add_option("--sampler", sampler, "fps, nms, or nes");
  sample->add_option("--count", count, "selection size");
  sample->add_option("--threshold", threshold, "NMS threshold (m)");
  sample->add_option("--bandwidth", bandwidth, "mode bandwidth (m)");
  sample->add_option("--out", out_dir, "output directory");

  CLI::App* train = app.add_subcommand("train", "train toy predictors over a "
                                                "gamma sweep");
  train->add_option("--scenarios", scenario_paths, "scenario JSON files")
      ->required()
      ->delimiter(',');
  train->add_option("--gamma", gammas, "coverage coefficients")
      ->delimiter(',');
  train->add_option("--components", components, "mixture components");
  train->add_option("--steps", train_steps, "gradient steps");
  train->add_option("--jobs", jobs, "parallel workers");
  train->add_option("--out", out_dir, "output directory");

  CLI::App* eval = app.add_subcommand("eval", "diversity metrics table");
  eval->add_option("--scenario", scenario_path, "scenario JSON")->required();
  eval->add_option("--count", count, "selection size");
  eval->add_option("--bandwidth", bandwidth, "mode bandwidth (m)");
  eval->add_option("--out", out_dir, "output directory");

  CLI::App* plot = app.add_subcommand("plot", "SVG scene and coverage curves");
  plot->add_option("--scenario", scenario_path, "scenario JSON")->required();
  plot->add_option("--count", count, "trajectories to draw");
  plot->add_option("--bandwidth", bandwidth, "mode bandwidth (m)");
  plot->add_option("--out", out_dir, "output directory");

  CLI::App* replay =
      app.add_subcommand("replay", "re-run a recorded manifest");
  replay->add_option("--manifest", manifest_path, "manifest JSON")->required();

  // The vector overload of parse expects the arguments reversed.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  }

  if (replay->parsed()) return run_replay(manifest_path);

  RunContext ctx;
  ctx.argv = args;
  ctx.seed = seed;
  ctx.out_dir = out_dir;

  int status = 1;
  if (gen->parsed()) {
    status = run_gen(ctx, archetype, seeds, horizon);
  } else if (solve->parsed()) {
    status = run_solve(ctx, scenario_path);
  } else if (irl_fit->parsed()) {
    status = run_irl_fit(ctx, scenario_path, dataset_path, rollouts, fit_steps,
                         learning_rate);
  } else if (verify->parsed()) {
    try {
      status = run_verify(ctx, game_name, scenario_path, samples,
                          verify_tolerance);
    } catch (const VerificationFailure&) {
      // The report is still an artifact of the run.
      ctx.write_manifest();
      throw;
    }
  } else if (modes_cmd->parsed()) {
    status = run_modes(ctx, scenario_path, bandwidth, rho);
  } else if (sample->parsed()) {
    status = run_sample(ctx, scenario_path, sampler, count, threshold,
                        bandwidth);
  } else if (train->parsed()) {
    status = run_train(ctx, scenario_paths, gammas, components, train_steps,
                       jobs);
  } else if (eval->parsed()) {
    status = run_eval(ctx, scenario_path, count, bandwidth);
  } else if (plot->parsed()) {
    status = run_plot(ctx, scenario_path, count, bandwidth);
  }
  ctx.write_manifest();
  return status;
}

int error_json(const char* type, const std::string& message, int code) {
  json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace
}  // namespace nashmodes

int main(int argc, char** argv) {
  using namespace nashmodes;
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const CLI::ParseError& e) {
    return error_json("usage", e.what(), 1);
  } catch (const VerificationFailure& e) {
    return error_json("verification", e.what(), 2);
  } catch (const std::invalid_argument& e) {
    return error_json("usage", e.what(), 1);
  } catch (const std::runtime_error& e) {
    return error_json("io", e.what(), 3);
  } catch (const std::exception& e) {
    return error_json("internal", e.what(), 1);
  }
}
