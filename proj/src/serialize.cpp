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

#include "nashmodes/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nashmodes {

using nlohmann::json;

json game_to_json(const TabularGame& game) {
  json j;
  j["id"] = game.id;
  j["num_agents"] = game.num_agents;
  j["horizon"] = game.horizon;
  j["control_names"] = game.control_names;
  j["transitions"] = game.transitions;
  j["rewards"] = game.rewards;
  json states = json::array();
  for (const JointState& s : game.states) {
    json agents = json::array();
    for (const AgentState& a : s) {
      agents.push_back({{"x", a.x},
                        {"y", a.y},
                        {"speed", a.speed},
                        {"heading", a.heading}});
    }
    states.push_back(agents);
  }
  j["states"] = states;
  return j;
}

TabularGame game_from_json(const json& j) {
  TabularGame game;
  game.id = j.at("id").get<std::string>();
  game.num_agents = j.at("num_agents").get<int>();
  game.horizon = j.at("horizon").get<int>();
  game.control_names =
      j.at("control_names").get<std::vector<std::vector<std::string>>>();
  game.transitions = j.at("transitions").get<std::vector<std::vector<int>>>();
  game.rewards =
      j.at("rewards")
          .get<std::vector<std::vector<std::vector<double>>>>();
  for (const json& agents : j.at("states")) {
    JointState s;
    for (const json& a : agents) {
      s.push_back({a.at("x").get<double>(), a.at("y").get<double>(),
                   a.at("speed").get<double>(), a.at("heading").get<double>()});
    }
    game.states.push_back(s);
  }
  game.validate();
  return game;
}

json trajectory_to_json(const JointTrajectory& traj) {
  json j;
  json states = json::array();
  for (const JointState& s : traj.states) {
    json agents = json::array();
    for (const AgentState& a : s) {
      agents.push_back({{"x", a.x},
                        {"y", a.y},
                        {"speed", a.speed},
                        {"heading", a.heading}});
    }
    states.push_back(agents);
  }
  j["states"] = states;
  j["controls"] = traj.controls;
  j["state_ids"] = traj.state_ids;
  return j;
}

JointTrajectory trajectory_from_json(const json& j) {
  JointTrajectory traj;
  for (const json& agents : j.at("states")) {
    JointState s;
    for (const json& a : agents) {
      s.push_back({a.at("x").get<double>(), a.at("y").get<double>(),
                   a.at("speed").get<double>(), a.at("heading").get<double>()});
    }
    traj.states.push_back(s);
  }
  traj.controls = j.at("controls").get<std::vector<JointControl>>();
  traj.state_ids = j.at("state_ids").get<std::vector<int>>();
  return traj;
}

void save_dataset(const TrajectoryDataset& data, const std::string& path) {
  std::ostringstream out;
  json meta;
  meta["game_id"] = data.game_id;
  meta["seed"] = data.seed;
  meta["count"] = data.trajectories.size();
  out << meta.dump() << "\n";
  for (const JointTrajectory& traj : data.trajectories) {
    out << trajectory_to_json(traj).dump() << "\n";
  }
  write_file_atomic(path, out.str());
}

TrajectoryDataset load_dataset(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty dataset file");
  }
  TrajectoryDataset data;
  size_t count = 0;
  try {
    const json meta = json::parse(line);
    data.game_id = meta.at("game_id").get<std::string>();
    data.seed = meta.at("seed").get<std::uint64_t>();
    count = meta.at("count").get<size_t>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      data.trajectories.push_back(trajectory_from_json(json::parse(line)));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (data.trajectories.size() != count) {
    throw std::runtime_error(path + ": dataset truncated, expected " +
                             std::to_string(count) + " trajectories, found " +
                             std::to_string(data.trajectories.size()));
  }
  return data;
}

void save_model(const ModelFile& model, const std::string& path) {
  json j;
  j["repr"] = "tabular";
  j["dims"] = {{"horizon", model.dims.horizon},
               {"num_agents", model.dims.num_agents},
               {"num_states", model.dims.num_states},
               {"num_controls", model.dims.num_controls}};
  j["theta"] = model.theta;
  j["game_id"] = model.game_id;
  j["loss_curve"] = model.loss_curve;
  write_file_atomic(path, j.dump(2) + "\n");
}

ModelFile load_model(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (j.at("repr").get<std::string>() != "tabular") {
    throw std::runtime_error(path + ": unsupported model representation '" +
                             j.at("repr").get<std::string>() + "'");
  }
  ModelFile model;
  const json& d = j.at("dims");
  model.dims.horizon = d.at("horizon").get<int>();
  model.dims.num_agents = d.at("num_agents").get<int>();
  model.dims.num_states = d.at("num_states").get<int>();
  model.dims.num_controls = d.at("num_controls").get<std::vector<int>>();
  model.theta = j.at("theta").get<std::vector<double>>();
  model.game_id = j.at("game_id").get<std::string>();
  model.loss_curve = j.at("loss_curve").get<std::vector<double>>();
  return model;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error(tmp + ": cannot open for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error(tmp + ": write failed");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error(path + ": rename from temp file failed");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path + ": cannot open for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace nashmodes
