// Copyright 2026 The ACAV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Rendering of causality reports (markdown, JSON) and ST graphs (JSON, SVG).

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acav/cat.hpp"
#include "acav/st_graph.hpp"

namespace acav
{

namespace detail
{

/// Rounds to micro-units so that serialized times do not carry float noise.
inline double tidy(double v) { return std::round(v * 1e6) / 1e6; }

inline std::string num(const char * f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

inline std::string event_line(const CausalEvent & e)
{
  if (e.npc) {
    return "For NPC " + std::to_string(*e.npc) + ": " + e.detail;
  }
  std::string d = e.detail;
  if (!d.empty()) {
    d[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(d[0])));
  }
  return d;
}

}  // namespace detail

inline nlohmann::json to_json(const CausalityReport & r)
{
  using nlohmann::json;
  json j;
  j["recording_id"] = r.recording_id;
  if (r.accident) {
    j["accident"] = {{"frame", r.accident->frame}, {"t", detail::tidy(r.accident->t)}, {"npc", r.accident->npc}};
  } else {
    j["accident"] = nullptr;
  }
  j["main_cause"] = r.main_cause ? json(to_string(*r.main_cause)) : json(nullptr);
  json events = json::array();
  for (const auto & e : r.events) {
    events.push_back({{"kind", to_string(e.kind)},
                      {"npc", e.npc ? json(*e.npc) : json(nullptr)},
                      {"t_start", detail::tidy(r.time_of(e.frame_start))},
                      {"t_end", detail::tidy(r.time_of(e.frame_end + 1))},
                      {"detail", e.detail}});
  }
  j["events"] = events;
  json timeline = json::array();
  for (const auto & row : r.timeline) {
    json kinds = json::array();
    for (auto k : row.kinds) {
      kinds.push_back(to_string(k));
    }
    timeline.push_back({{"t", detail::tidy(row.t)}, {"kinds", kinds}});
  }
  j["timeline"] = timeline;
  return j;
}

/// Three-column timeline table: one row per change of the active event set,
/// closed by the accident row.
inline std::string render_markdown(const CausalityReport & r)
{
  std::string out = "# Causality report";
  if (!r.recording_id.empty()) {
    out += ": " + r.recording_id;
  }
  out += "\n\nMain cause: ";
  out += r.main_cause ? std::string(label(*r.main_cause)) : "none";
  out += "\n\n| Time | Causal events | Details |\n|------|---------------|---------|\n";
  for (const auto & row : r.timeline) {
    std::string kinds;
    std::string details;
    if (row.kinds.empty()) {
      kinds = "No causal event";
      details = "--";
    }
    for (auto k : row.kinds) {
      kinds += (kinds.empty() ? "" : "; ") + std::string(label(k));
      for (const auto & e : r.events) {
        if (e.kind == k && e.frame_start <= row.frame && row.frame <= e.frame_end) {
          details += (details.empty() ? "" : "<br>") + detail::event_line(e);
        }
      }
    }
    out += "| " + detail::num("%.1fs", row.t) + " | " + kinds + " | " + details + " |\n";
  }
  if (r.accident) {
    out += "| " + detail::num("%.1fs", r.accident->t) + " | Accident | Collision with NPC " +
           std::to_string(r.accident->npc) + " |\n";
  }
  return out;
}

inline nlohmann::json to_json(const StGraph & g)
{
  using nlohmann::json;
  json curve = json::array();
  for (const auto & s : g.curve.samples()) {
    curve.push_back({detail::tidy(s.t), detail::tidy(s.s), detail::tidy(s.v)});
  }
  auto blocks = [](const std::vector<StBlock> & list) {
    json arr = json::array();
    for (const auto & b : list) {
      json cells = json::array();
      for (const auto & c : b.cells) {
        cells.push_back({detail::tidy(c.t), detail::tidy(c.s_lo), detail::tidy(c.s_hi)});
      }
      arr.push_back({{"npc", b.npc_id}, {"cells", cells}});
    }
    return arr;
  };
  return {{"horizon", g.horizon}, {"curve", curve}, {"perceived", blocks(g.perceived)}, {"truth", blocks(g.truth)}};
}

/// Station-time plot: time on the horizontal axis, station on the vertical
/// one. Perceived blocks are filled, ground-truth blocks outlined.
inline std::string render_st_svg(const StGraph & g, std::size_t frame)
{
  constexpr double W = 640.0;
  constexpr double H = 420.0;
  constexpr double ml = 60.0;
  constexpr double mr = 20.0;
  constexpr double mt = 36.0;
  constexpr double mb = 48.0;
  const double t_max = g.horizon > 0.0 ? g.horizon : 8.0;

  double s_min = 0.0;
  double s_max = 10.0;
  for (const auto & smp : g.curve.samples()) {
    s_max = std::max(s_max, smp.s);
  }
  for (const auto * list : {&g.perceived, &g.truth}) {
    for (const auto & b : *list) {
      for (const auto & c : b.cells) {
        s_min = std::min(s_min, c.s_lo);
        s_max = std::max(s_max, c.s_hi);
      }
    }
  }
  const double s_step = s_max - s_min > 100.0 ? 20.0 : s_max - s_min > 40.0 ? 10.0 : 5.0;
  s_min = std::floor(s_min / s_step) * s_step;
  s_max = std::ceil(s_max / s_step) * s_step;

  auto X = [&](double t) { return ml + (W - ml - mr) * std::clamp(t, 0.0, t_max) / t_max; };
  auto Y = [&](double s) { return H - mb - (H - mt - mb) * (s - s_min) / (s_max - s_min); };
  auto f2 = [](double v) { return detail::num("%.2f", v); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f2(W) + "\" height=\"" + f2(H) +
                    "\" viewBox=\"0 0 " + f2(W) + " " + f2(H) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + f2(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">ST graph, frame " +
         std::to_string(frame) + "</text>\n";

  // grid and ticks
  for (int k = 0; k <= static_cast<int>(std::floor(t_max + 1e-9)); ++k) {
    const double x = X(k);
    svg += "<line x1=\"" + f2(x) + "\" y1=\"" + f2(Y(s_min)) + "\" x2=\"" + f2(x) + "\" y2=\"" + f2(Y(s_max)) +
           "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + f2(x) + "\" y=\"" + f2(H - mb + 16) + "\" text-anchor=\"middle\">" + std::to_string(k) +
           "</text>\n";
  }
  for (double s = s_min; s <= s_max + 1e-9; s += s_step) {
    const double y = Y(s);
    svg += "<line x1=\"" + f2(ml) + "\" y1=\"" + f2(y) + "\" x2=\"" + f2(W - mr) + "\" y2=\"" + f2(y) +
           "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + f2(ml - 6) + "\" y=\"" + f2(y + 4) + "\" text-anchor=\"end\">" + detail::num("%.0f", s) +
           "</text>\n";
  }
  svg += "<line x1=\"" + f2(ml) + "\" y1=\"" + f2(Y(s_min)) + "\" x2=\"" + f2(W - mr) + "\" y2=\"" + f2(Y(s_min)) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + f2(ml) + "\" y1=\"" + f2(Y(s_min)) + "\" x2=\"" + f2(ml) + "\" y2=\"" + f2(Y(s_max)) +
         "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + f2((ml + W - mr) / 2) + "\" y=\"" + f2(H - 10) + "\" text-anchor=\"middle\">t (s)</text>\n";
  svg += "<text x=\"16\" y=\"" + f2((mt + H - mb) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         f2((mt + H - mb) / 2) + ")\">s (m)</text>\n";

  auto draw_blocks = [&](const std::vector<StBlock> & list, const char * style, const char * cls) {
    for (const auto & b : list) {
      const auto cov = detail::cell_coverage(b.cells);
      svg += "<g class=\"" + std::string(cls) + "\" data-npc=\"" + std::to_string(b.npc_id) + "\">\n";
      for (std::size_t k = 0; k < b.cells.size(); ++k) {
        double t0 = cov[k].first;
        double t1 = cov[k].second;
        if (t1 - t0 < 1e-9) {
          t1 = t0 + 0.05;
        }
        const auto & c = b.cells[k];
        svg += "<rect x=\"" + f2(X(t0)) + "\" y=\"" + f2(Y(c.s_hi)) + "\" width=\"" + f2(X(t1) - X(t0)) +
               "\" height=\"" + f2(Y(c.s_lo) - Y(c.s_hi)) + "\" " + style + "/>\n";
      }
      if (!b.cells.empty()) {
        const auto & c = b.cells.front();
        svg += "<text x=\"" + f2(X(c.t) + 3) + "\" y=\"" + f2(Y(c.s_hi) - 3) + "\">NPC " +
               std::to_string(b.npc_id) + "</text>\n";
      }
      svg += "</g>\n";
    }
  };
  draw_blocks(g.perceived, "fill=\"#4682b4\" fill-opacity=\"0.45\" stroke=\"none\"", "perceived");
  draw_blocks(g.truth, "fill=\"none\" stroke=\"#e67e22\" stroke-width=\"0.8\"", "truth");

  std::string pts;
  for (const auto & smp : g.curve.samples()) {
    if (smp.t > t_max + 1e-9) {
      break;
    }
    pts += (pts.empty() ? "" : " ") + f2(X(smp.t)) + "," + f2(Y(smp.s));
  }
  svg += "<polyline class=\"curve\" points=\"" + pts + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace acav
