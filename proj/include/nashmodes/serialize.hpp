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

#ifndef NASHMODES_SERIALIZE_HPP_
#define NASHMODES_SERIALIZE_HPP_

#include <string>

#include "json.hpp"
#include "nashmodes/game.hpp"
#include "nashmodes/irl.hpp"
#include "nashmodes/types.hpp"

namespace nashmodes {

// All round trips are lossless: from_json(to_json(x)) is structurally equal
// to x, with doubles preserved bit for bit.

nlohmann::json game_to_json(const TabularGame& game);
TabularGame game_from_json(const nlohmann::json& j);

nlohmann::json trajectory_to_json(const JointTrajectory& traj);
JointTrajectory trajectory_from_json(const nlohmann::json& j);

// JSONL: one metadata object on the first line, one trajectory per line after.
void save_dataset(const TrajectoryDataset& data, const std::string& path);
TrajectoryDataset load_dataset(const std::string& path);

// Fitted model artifact: dimensions, flat parameters, provenance.
struct ModelFile {
  AdvantageModel::Dims dims;
  std::vector<double> theta;
  std::string game_id;
  std::vector<double> loss_curve;
};

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

// Writes to a sibling temp file and renames over the target, so readers never
// observe a partial file. Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

// Whole-file read; throws std::runtime_error naming the path on failure.
std::string read_file(const std::string& path);

}  // namespace nashmodes

#endif  // NASHMODES_SERIALIZE_HPP_
