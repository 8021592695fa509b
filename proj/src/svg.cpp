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

#include "nashmodes/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nashmodes {

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr int kPaletteSize = 8;
constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 48.0;

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  void pad() {
    if (min_x > max_x) {
      min_x = -1.0;
      max_x = 1.0;
      min_y = -1.0;
      max_y = 1.0;
    }
    const double dx = std::max(max_x - min_x, 1e-9);
    const double dy = std::max(max_y - min_y, 1e-9);
    min_x -= 0.05 * dx;
    max_x += 0.05 * dx;
    min_y -= 0.05 * dy;
    max_y += 0.05 * dy;
  }
  // Data coordinates to pixels; SVG y grows downward.
  std::array<double, 2> to_pixels(double x, double y) const {
    const double px =
        kMargin + (x - min_x) / (max_x - min_x) * (kWidth - 2.0 * kMargin);
    const double py = kHeight - kMargin -
                      (y - min_y) / (max_y - min_y) * (kHeight - 2.0 * kMargin);
    return {px, py};
  }
};

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << format_svg_float(kWidth) << "\" height=\"" << format_svg_float(kHeight)
      << "\" viewBox=\"0 0 " << format_svg_float(kWidth) << " "
      << format_svg_float(kHeight) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out << "<text x=\"" << format_svg_float(kWidth / 2.0)
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << title << "</text>\n";
  }
}

void polyline(std::ostringstream& out,
              const std::vector<std::array<double, 2>>& pixels,
              const std::string& color, double width, double opacity) {
  if (pixels.size() < 2) return;
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << format_svg_float(width) << "\" stroke-opacity=\""
      << format_svg_float(opacity) << "\" points=\"";
  for (size_t p = 0; p < pixels.size(); ++p) {
    if (p) out << " ";
    out << format_svg_float(pixels[p][0]) << "," << format_svg_float(pixels[p][1]);
  }
  out << "\"/>\n";
}

}  // namespace

std::string format_svg_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string render_scene(const ScenePlot& plot) {
  if (plot.labels.size() != plot.trajectories.size()) {
    throw std::invalid_argument("render_scene: labels/trajectories mismatch");
  }
  Bounds bounds;
  for (const auto& line : plot.map_polylines) {
    for (const auto& p : line) bounds.add(p[0], p[1]);
  }
  for (const JointTrajectory& traj : plot.trajectories) {
    for (const JointState& s : traj.states) {
      for (const AgentState& a : s) bounds.add(a.x, a.y);
    }
  }
  bounds.pad();

  std::ostringstream out;
  open_svg(out, plot.title);
  for (const auto& line : plot.map_polylines) {
    std::vector<std::array<double, 2>> pixels;
    for (const auto& p : line) pixels.push_back(bounds.to_pixels(p[0], p[1]));
    polyline(out, pixels, "#999999", 6.0, 0.5);
  }
  for (size_t k = 0; k < plot.trajectories.size(); ++k) {
    const JointTrajectory& traj = plot.trajectories[k];
    const std::string color = kPalette[plot.labels[k] % kPaletteSize];
    for (int i = 0; i < traj.num_agents(); ++i) {
      std::vector<std::array<double, 2>> pixels;
      for (const JointState& s : traj.states) {
        pixels.push_back(bounds.to_pixels(s[i].x, s[i].y));
      }
      polyline(out, pixels, color, 2.0, 0.9);
      // Endpoint marker.
      if (!pixels.empty()) {
        out << "<circle cx=\"" << format_svg_float(pixels.back()[0])
            << "\" cy=\"" << format_svg_float(pixels.back()[1])
            << "\" r=\"4\" fill=\"" << color << "\"/>\n";
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_curves(const CurvePlot& plot) {
  Bounds bounds;
  for (const CurveSeries& s : plot.series) {
    for (const auto& p : s.points) bounds.add(p[0], p[1]);
  }
  bounds.pad();

  std::ostringstream out;
  open_svg(out, plot.title);
  // Axes.
  out << "<line x1=\"" << format_svg_float(kMargin) << "\" y1=\""
      << format_svg_float(kHeight - kMargin) << "\" x2=\""
      << format_svg_float(kWidth - kMargin) << "\" y2=\""
      << format_svg_float(kHeight - kMargin)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << format_svg_float(kMargin) << "\" y1=\""
      << format_svg_float(kMargin) << "\" x2=\"" << format_svg_float(kMargin)
      << "\" y2=\"" << format_svg_float(kHeight - kMargin)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << format_svg_float(kWidth / 2.0) << "\" y=\""
      << format_svg_float(kHeight - 12.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << plot.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << format_svg_float(kHeight / 2.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 "
      << format_svg_float(kHeight / 2.0) << ")\">" << plot.y_label
      << "</text>\n";

  for (size_t s = 0; s < plot.series.size(); ++s) {
    const std::string color = kPalette[s % kPaletteSize];
    std::vector<std::array<double, 2>> pixels;
    for (const auto& p : plot.series[s].points) {
      pixels.push_back(bounds.to_pixels(p[0], p[1]));
    }
    polyline(out, pixels, color, 2.0, 1.0);
    // Legend entry.
    const double ly = kMargin + 16.0 * s;
    out << "<rect x=\"" << format_svg_float(kWidth - kMargin - 130.0)
        << "\" y=\"" << format_svg_float(ly) << "\" width=\"12\" height=\"4\" "
        << "fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << format_svg_float(kWidth - kMargin - 112.0)
        << "\" y=\"" << format_svg_float(ly + 6.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << plot.series[s].name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace nashmodes
