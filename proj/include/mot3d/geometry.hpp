// Copyright 2026 The mot3d Authors
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
#include <span>
#include <vector>

#include "mot3d/types.hpp"

namespace mot3d::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Footprint corners, counter-clockwise.
std::array<Point2, 4> footprint(const Observation& box);

// Signed shoelace area (positive for counter-clockwise).
double signed_area(std::span<const Point2> polygon);

// Intersection of two convex counter-clockwise polygons (Sutherland-Hodgman).
std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip);

double footprint_overlap_area(const Observation& a, const Observation& b);

// Overlap of the vertical extents [z - h/2, z + h/2].
double height_overlap(const Observation& a, const Observation& b);

}  // namespace mot3d::geometry
