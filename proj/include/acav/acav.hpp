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

#include "acav/accident.hpp"
#include "acav/cat.hpp"
#include "acav/common.hpp"
#include "acav/features.hpp"
#include "acav/frenet.hpp"
#include "acav/geometry.hpp"
#include "acav/metrics.hpp"
#include "acav/pipeline.hpp"
#include "acav/recording.hpp"
#include "acav/recording_io.hpp"
#include "acav/report.hpp"
#include "acav/scenario.hpp"
#include "acav/simplifier.hpp"
#include "acav/spec_checker.hpp"
#include "acav/st_graph.hpp"
