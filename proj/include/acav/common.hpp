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

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace acav
{

using NpcId = int;

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad JSON, unknown channel, schema mismatch. Maps to CLI exit code 2.
class InputError : public Error
{
public:
  using Error::Error;
};

/// Parse failure tied to a line of a JSON Lines stream.
class ParseError : public InputError
{
public:
  ParseError(std::size_t line, const std::string & what)
  : InputError("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// The recording holds no collision. Maps to CLI exit code 3.
class NoAccidentError : public Error
{
public:
  NoAccidentError() : Error("no accident in recording") {}
};

/// Wraps to [-pi, pi]; angles already in range are returned unchanged.
inline double normalize_angle(double a)
{
  if (a >= -std::numbers::pi && a <= std::numbers::pi) {
    return a;
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0) {
    a += two_pi;
  }
  return a - std::numbers::pi;
}

// Enum <-> string tables. Each enum lists its names in declaration order.

template <typename E, std::size_t N>
struct EnumNames
{
  std::array<std::string_view, N> names;

  constexpr std::string_view to_string(E e) const { return names[static_cast<std::size_t>(e)]; }

  std::optional<E> parse(std::string_view s) const
  {
    for (std::size_t i = 0; i < N; ++i) {
      if (names[i] == s) {
        return static_cast<E>(i);
      }
    }
    return std::nullopt;
  }
};

enum class ObstacleKind { vehicle, pedestrian, bicyclist, static_object };
inline constexpr EnumNames<ObstacleKind, 4> kObstacleKindNames{
  {"vehicle", "pedestrian", "bicyclist", "static"}};

enum class Priority { caution, normal, ignore };
inline constexpr EnumNames<Priority, 3> kPriorityNames{{"caution", "normal", "ignore"}};

enum class Decision { ignore, stop, follow, yield, overtake, nudge };
inline constexpr EnumNames<Decision, 6> kDecisionNames{
  {"ignore", "stop", "follow", "yield", "overtake", "nudge"}};

enum class TrafficSignal { none, red, yellow, green, unknown };
inline constexpr EnumNames<TrafficSignal, 5> kTrafficSignalNames{
  {"none", "red", "yellow", "green", "unknown"}};

inline std::string_view to_string(ObstacleKind v) { return kObstacleKindNames.to_string(v); }
inline std::string_view to_string(Priority v) { return kPriorityNames.to_string(v); }
inline std::string_view to_string(Decision v) { return kDecisionNames.to_string(v); }
inline std::string_view to_string(TrafficSignal v) { return kTrafficSignalNames.to_string(v); }

}  // namespace acav
