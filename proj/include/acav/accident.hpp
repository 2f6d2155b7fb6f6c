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

#include <optional>

#include "acav/recording.hpp"

namespace acav
{

/// Lowest NPC id whose ground-truth footprint overlaps the AV footprint.
/// Zero-margin oriented-box test; std::map iteration gives the id order.
inline std::optional<NpcId> detect_collision(const Frame & frame)
{
  const OrientedBox av = frame.ground_truth.av.box();
  for (const auto & [id, fp] : frame.ground_truth.npc_states) {
    if (boxes_overlap(av, fp.box())) {
      return id;
    }
  }
  return std::nullopt;
}

inline std::optional<Accident> find_first_accident(const AlignedRecording & rec)
{
  for (const Frame & f : rec.frames) {
    if (auto npc = detect_collision(f)) {
      return Accident{f.index, *npc};
    }
  }
  return std::nullopt;
}

/// Keeps frames up to and including the first collision.
inline AlignedRecording truncate_at_accident(AlignedRecording rec)
{
  auto acc = find_first_accident(rec);
  if (!acc) {
    throw NoAccidentError();
  }
  rec.frames.resize(acc->frame + 1);
  rec.accident = acc;
  return rec;
}

}  // namespace acav
