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

// Neutral recording format: JSON Lines, one message per line, optionally
// preceded by a {"format": "acav-rec", "version": 1} header record.

#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "acav/recording.hpp"

namespace acav
{

using nlohmann::json;

inline constexpr std::string_view kFormatName = "acav-rec";
inline constexpr int kFormatVersion = 1;

enum class Channel { localization, perception, prediction, planning, map_context, ground_truth };
inline constexpr EnumNames<Channel, 6> kChannelNames{
  {"localization", "perception", "prediction", "planning", "map_context", "ground_truth"}};
inline constexpr std::size_t kChannelCount = 6;

// Alternative index equals the Channel value.
using Payload = std::variant<
  Pose, std::vector<ObstacleObservation>, std::vector<PredictedTrajectory>, PlanningMessage,
  MapContext, GroundTruthState>;

struct RawMessage
{
  double t{0.0};
  Channel channel{Channel::localization};
  Payload payload;
  std::size_t line{0};
};

namespace detail
{

template <typename E, std::size_t N>
E parse_enum(const EnumNames<E, N> & names, const json & j, const char * what)
{
  const auto s = j.get<std::string>();
  auto v = names.parse(s);
  if (!v) {
    throw InputError(std::string("unknown ") + what + " '" + s + "'");
  }
  return *v;
}

inline void require(bool ok, const std::string & what)
{
  if (!ok) {
    throw InputError(what);
  }
}

inline std::optional<double> opt_distance(const json & j, const char * key)
{
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  const double d = j.at(key).get<double>();
  require(d >= 0.0, std::string(key) + " must be non-negative");
  return d;
}

}  // namespace detail

// --- encoders -------------------------------------------------------------

inline json to_json(const Pose & p)
{
  return {{"x", p.x}, {"y", p.y}, {"heading", p.heading}, {"speed", p.speed}};
}

inline json to_json(const Footprint & f)
{
  return {{"center", to_json(f.center)}, {"length", f.length}, {"width", f.width}};
}

inline json to_json(const OrientedBox & b)
{
  return {{"x", b.center.x}, {"y", b.center.y}, {"heading", b.heading}, {"length", b.length},
          {"width", b.width}};
}

inline json to_json(const ObstacleObservation & o)
{
  return {{"npc_id", o.npc_id}, {"footprint", to_json(o.footprint)},
          {"kind", to_string(o.kind)}, {"is_static", o.is_static}};
}

inline json to_json(const PredictedTrajectory & p)
{
  json w = json::array();
  for (const auto & tp : p.waypoints) {
    w.push_back({{"t", tp.t}, {"pose", to_json(tp.pose)}});
  }
  return {{"npc_id", p.npc_id}, {"priority", to_string(p.priority)}, {"waypoints", std::move(w)}};
}

inline json to_json(const PlanningMessage & m)
{
  json traj = json::array();
  for (const auto & tp : m.trajectory) {
    traj.push_back({{"t", tp.t}, {"pose", to_json(tp.pose)}, {"planned_speed", tp.planned_speed}});
  }
  json dec = json::array();
  for (const auto & [id, d] : m.decisions) {
    dec.push_back({{"npc_id", id}, {"decision", to_string(d)}});
  }
  return {{"trajectory", std::move(traj)},  {"decisions", std::move(dec)},
          {"main_decision", to_string(m.main_decision)},
          {"odd", m.odd},                   {"rss_safe", m.rss_safe},
          {"speed_limit_lo", m.speed_limit_lo}, {"speed_limit_hi", m.speed_limit_hi}};
}

inline json to_json(const MapContext & m)
{
  auto opt = [](const std::optional<double> & v) { return v ? json(*v) : json(nullptr); };
  json zones = json::array();
  for (const auto & z : m.zones) {
    json jz = to_json(z.area);
    jz["kind"] = kZoneKindNames.to_string(z.kind);
    zones.push_back(std::move(jz));
  }
  return {{"dist_to_junction", opt(m.dist_to_junction)},
          {"dist_to_crosswalk", opt(m.dist_to_crosswalk)},
          {"dist_to_stop_sign", opt(m.dist_to_stop_sign)},
          {"traffic_signal", to_string(m.traffic_signal)},
          {"on_junction", m.on_junction},
          {"on_crosswalk", m.on_crosswalk},
          {"zones", std::move(zones)}};
}

inline json to_json(const GroundTruthState & g)
{
  json npcs = json::array();
  for (const auto & [id, f] : g.npc_states) {
    npcs.push_back({{"npc_id", id}, {"footprint", to_json(f)}});
  }
  return {{"av", to_json(g.av)}, {"npcs", std::move(npcs)}};
}

inline json payload_to_json(const Payload & p)
{
  return std::visit(
    [](const auto & v) -> json {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, std::vector<ObstacleObservation>>) {
        json a = json::array();
        for (const auto & o : v) a.push_back(to_json(o));
        return {{"obstacles", std::move(a)}};
      } else if constexpr (std::is_same_v<T, std::vector<PredictedTrajectory>>) {
        json a = json::array();
        for (const auto & o : v) a.push_back(to_json(o));
        return {{"trajectories", std::move(a)}};
      } else {
        return to_json(v);
      }
    },
    p);
}

// --- decoders -------------------------------------------------------------

inline Pose pose_from_json(const json & j)
{
  Pose p;
  p.x = j.at("x").get<double>();
  p.y = j.at("y").get<double>();
  p.heading = normalize_angle(j.at("heading").get<double>());
  p.speed = j.value("speed", 0.0);
  detail::require(std::isfinite(p.x) && std::isfinite(p.y), "pose coordinates must be finite");
  detail::require(p.speed >= 0.0, "speed must be non-negative");
  return p;
}

inline Footprint footprint_from_json(const json & j)
{
  Footprint f;
  f.center = pose_from_json(j.at("center"));
  f.length = j.at("length").get<double>();
  f.width = j.at("width").get<double>();
  detail::require(f.length > 0.0 && f.width > 0.0, "footprint dimensions must be positive");
  return f;
}

inline OrientedBox box_from_json(const json & j)
{
  OrientedBox b;
  b.center = {j.at("x").get<double>(), j.at("y").get<double>()};
  b.heading = j.value("heading", 0.0);
  b.length = j.at("length").get<double>();
  b.width = j.at("width").get<double>();
  detail::require(b.length > 0.0 && b.width > 0.0, "zone dimensions must be positive");
  return b;
}

inline std::vector<ObstacleObservation> perception_from_json(const json & j)
{
  std::vector<ObstacleObservation> out;
  std::set<NpcId> seen;
  for (const auto & o : j.at("obstacles")) {
    ObstacleObservation ob;
    ob.npc_id = o.at("npc_id").get<NpcId>();
    ob.footprint = footprint_from_json(o.at("footprint"));
    ob.kind = detail::parse_enum(kObstacleKindNames, o.at("kind"), "obstacle kind");
    ob.is_static = o.value("is_static", false);
    detail::require(seen.insert(ob.npc_id).second,
                    "duplicate npc_id " + std::to_string(ob.npc_id) + " in perception");
    out.push_back(ob);
  }
  return out;
}

inline std::vector<PredictedTrajectory> prediction_from_json(const json & j)
{
  std::vector<PredictedTrajectory> out;
  for (const auto & o : j.at("trajectories")) {
    PredictedTrajectory p;
    p.npc_id = o.at("npc_id").get<NpcId>();
    p.priority = detail::parse_enum(kPriorityNames, o.at("priority"), "priority");
    for (const auto & w : o.at("waypoints")) {
      p.waypoints.push_back({w.at("t").get<double>(), pose_from_json(w.at("pose"))});
    }
    detail::require(times_strictly_increasing(p.waypoints),
                    "predicted waypoint times must be strictly increasing");
    out.push_back(std::move(p));
  }
  return out;
}

inline PlanningMessage planning_from_json(const json & j)
{
  PlanningMessage m;
  for (const auto & w : j.at("trajectory")) {
    m.trajectory.push_back(
      {w.at("t").get<double>(), pose_from_json(w.at("pose")), w.at("planned_speed").get<double>()});
  }
  detail::require(times_strictly_increasing(m.trajectory),
                  "planned trajectory times must be strictly increasing");
  for (const auto & d : j.value("decisions", json::array())) {
    m.decisions[d.at("npc_id").get<NpcId>()] =
      detail::parse_enum(kDecisionNames, d.at("decision"), "decision");
  }
  m.main_decision = detail::parse_enum(kDecisionNames, j.at("main_decision"), "decision");
  m.odd = j.value("odd", std::string{});
  m.rss_safe = j.value("rss_safe", true);
  m.speed_limit_lo = j.value("speed_limit_lo", 0.0);
  m.speed_limit_hi = j.value("speed_limit_hi", 0.0);
  detail::require(m.speed_limit_lo <= m.speed_limit_hi, "speed_limit_lo exceeds speed_limit_hi");
  return m;
}

inline MapContext map_context_from_json(const json & j)
{
  MapContext m;
  m.dist_to_junction = detail::opt_distance(j, "dist_to_junction");
  m.dist_to_crosswalk = detail::opt_distance(j, "dist_to_crosswalk");
  m.dist_to_stop_sign = detail::opt_distance(j, "dist_to_stop_sign");
  m.traffic_signal = detail::parse_enum(
    kTrafficSignalNames, j.value("traffic_signal", json("none")), "traffic signal");
  m.on_junction = j.value("on_junction", false);
  m.on_crosswalk = j.value("on_crosswalk", false);
  for (const auto & z : j.value("zones", json::array())) {
    m.zones.push_back(
      {detail::parse_enum(kZoneKindNames, z.at("kind"), "zone kind"), box_from_json(z)});
  }
  return m;
}

inline GroundTruthState ground_truth_from_json(const json & j)
{
  GroundTruthState g;
  g.av = footprint_from_json(j.at("av"));
  for (const auto & n : j.at("npcs")) {
    g.npc_states[n.at("npc_id").get<NpcId>()] = footprint_from_json(n.at("footprint"));
  }
  return g;
}

inline Payload payload_from_json(Channel c, const json & j)
{
  switch (c) {
    case Channel::localization:
      return pose_from_json(j);
    case Channel::perception:
      return perception_from_json(j);
    case Channel::prediction:
      return prediction_from_json(j);
    case Channel::planning:
      return planning_from_json(j);
    case Channel::map_context:
      return map_context_from_json(j);
    case Channel::ground_truth:
      return ground_truth_from_json(j);
  }
  throw InputError("unreachable channel");
}

// --- stream level ---------------------------------------------------------

/// Reads a JSON Lines stream into messages sorted by time (stable for ties).
inline std::vector<RawMessage> parse_recording(std::istream & in, std::string * id_out = nullptr)
{
  std::vector<RawMessage> out;
  std::string line;
  std::size_t lineno = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error & e) {
      throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
      throw ParseError(lineno, "record is not an object");
    }
    if (first_record && j.contains("format")) {
      first_record = false;
      if (j.at("format") != kFormatName) {
        throw ParseError(lineno, "unsupported format " + j.at("format").dump());
      }
      if (j.value("version", 0) != kFormatVersion) {
        throw ParseError(lineno, "unsupported version " + j.value("version", json()).dump());
      }
      if (id_out != nullptr && j.contains("id")) {
        *id_out = j.at("id").get<std::string>();
      }
      continue;
    }
    first_record = false;
    for (const char * key : {"t", "channel", "payload"}) {
      if (!j.contains(key)) {
        throw ParseError(lineno, std::string("missing field \"") + key + "\"");
      }
    }
    if (!j.at("t").is_number()) {
      throw ParseError(lineno, "field \"t\" is not a number");
    }
    RawMessage m;
    m.t = j.at("t").get<double>();
    if (!std::isfinite(m.t)) {
      throw ParseError(lineno, "timestamp is not finite");
    }
    const auto name = j.at("channel").is_string() ? j.at("channel").get<std::string>() : "";
    auto ch = kChannelNames.parse(name);
    if (!ch) {
      throw ParseError(lineno, "unknown channel '" + name + "'");
    }
    m.channel = *ch;
    m.line = lineno;
    try {
      m.payload = payload_from_json(m.channel, j.at("payload"));
    } catch (const json::exception & e) {
      throw ParseError(lineno, std::string("bad ") + name + " payload: " + e.what());
    } catch (const ParseError &) {
      throw;
    } catch (const InputError & e) {
      throw ParseError(lineno, std::string("bad ") + name + " payload: " + e.what());
    }
    out.push_back(std::move(m));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto & a, const auto & b) { return a.t < b.t; });
  return out;
}

inline std::vector<RawMessage> parse_recording_string(const std::string & s)
{
  std::istringstream in(s);
  return parse_recording(in);
}

/// Buckets messages into frames of `frame_duration`. Each frame holds, per
/// channel, the latest message published before the frame ends. Leading frames
/// where some channel has not published yet are dropped and indices re-based.
inline AlignedRecording align_frames(
  const std::vector<RawMessage> & messages, double frame_duration = kDefaultFrameDuration)
{
  if (!(frame_duration > 0.0)) {
    throw InputError("frame duration must be positive");
  }
  std::array<bool, kChannelCount> present{};
  for (const auto & m : messages) {
    present[static_cast<std::size_t>(m.channel)] = true;
  }
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (!present[c]) {
      throw InputError(
        "channel '" + std::string(kChannelNames.names[c]) + "' has no messages");
    }
  }

  // Tolerance absorbs the rounding in t = i * d written by producers.
  constexpr double kBucketEps = 1e-9;
  const double t0 = messages.front().t;
  auto bucket = [&](double t) {
    return static_cast<std::size_t>(std::floor((t - t0) / frame_duration + kBucketEps));
  };

  AlignedRecording rec;
  rec.frame_duration = frame_duration;
  const std::size_t n_buckets = bucket(messages.back().t) + 1;
  std::array<const Payload *, kChannelCount> latest{};
  std::size_t next = 0;
  for (std::size_t i = 0; i < n_buckets; ++i) {
    while (next < messages.size() && bucket(messages[next].t) <= i) {
      latest[static_cast<std::size_t>(messages[next].channel)] = &messages[next].payload;
      ++next;
    }
    if (std::any_of(latest.begin(), latest.end(), [](const Payload * p) { return p == nullptr; })) {
      continue;
    }
    Frame f;
    f.index = rec.frames.size();
    f.t_start = t0 + static_cast<double>(i) * frame_duration;
    f.localization = std::get<Pose>(*latest[0]);
    f.perception = std::get<std::vector<ObstacleObservation>>(*latest[1]);
    f.prediction = std::get<std::vector<PredictedTrajectory>>(*latest[2]);
    f.planning = std::get<PlanningMessage>(*latest[3]);
    f.map_context = std::get<MapContext>(*latest[4]);
    f.ground_truth = std::get<GroundTruthState>(*latest[5]);
    rec.frames.push_back(std::move(f));
  }
  return rec;
}

/// Emits one message per channel per frame, stamped at the frame start.
inline void write_recording(std::ostream & out, const AlignedRecording & rec)
{
  json header{{"format", kFormatName}, {"version", kFormatVersion}};
  if (!rec.id.empty()) {
    header["id"] = rec.id;
  }
  out << header.dump() << '\n';
  for (const Frame & f : rec.frames) {
    const std::array<Payload, kChannelCount> payloads{
      Payload{f.localization}, Payload{f.perception}, Payload{f.prediction},
      Payload{f.planning},     Payload{f.map_context}, Payload{f.ground_truth}};
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      json line{
        {"t", f.t_start}, {"channel", kChannelNames.names[c]}, {"payload", payload_to_json(payloads[c])}};
      out << line.dump() << '\n';
    }
  }
}

inline std::string write_recording_string(const AlignedRecording & rec)
{
  std::ostringstream out;
  write_recording(out, rec);
  return out.str();
}

/// Parse and align in one step; the header id (if any) becomes the recording id.
inline AlignedRecording read_recording(std::istream & in, double frame_duration = kDefaultFrameDuration)
{
  std::string id;
  auto msgs = parse_recording(in, &id);
  if (msgs.empty()) {
    throw InputError("recording holds no messages");
  }
  auto rec = align_frames(msgs, frame_duration);
  rec.id = id;
  return rec;
}

}  // namespace acav
