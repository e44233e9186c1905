// Copyright 2026 The rrtrmm Authors
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

#ifndef RRTRMM_RRTRMM_HPP
#define RRTRMM_RRTRMM_HPP

#include "rrtrmm/benchmark.hpp"
#include "rrtrmm/geometry.hpp"
#include "rrtrmm/io.hpp"
#include "rrtrmm/kdtree.hpp"
#include "rrtrmm/kinematics.hpp"
#include "rrtrmm/planner.hpp"
#include "rrtrmm/random.hpp"
#include "rrtrmm/robot_parser.hpp"
#include "rrtrmm/scene.hpp"
#include "rrtrmm/surface.hpp"

#endif  // RRTRMM_RRTRMM_HPP
