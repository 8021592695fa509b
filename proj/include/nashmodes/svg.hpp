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

#ifndef NASHMODES_SVG_HPP_
#define NASHMODES_SVG_HPP_

#include <array>
#include <string>
#include <vector>

#include "nashmodes/types.hpp"

namespace nashmodes {

// All coordinates are written with 6 significant digits, so renders are
// byte-identical across runs on the same inputs.
std::string format_svg_float(double v);

// Bird's-eye view: lane polylines in grey, one polyline per agent per
// trajectory, colored by the trajectory's mode label.
struct ScenePlot {
  std::string title;
  std::vector<std::vector<std::array<double, 2>>> map_polylines;
  std::vector<JointTrajectory> trajectories;
  std::vector<int> labels;  // mode label per trajectory
};
std::string render_scene(const ScenePlot& plot);

// Simple line chart, one polyline per series.
struct CurveSeries {
  std::string name;
  std::vector<std::array<double, 2>> points;
};
struct CurvePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<CurveSeries> series;
};
std::string render_curves(const CurvePlot& plot);

}  // namespace nashmodes

#endif  // NASHMODES_SVG_HPP_
