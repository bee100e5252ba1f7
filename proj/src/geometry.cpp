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

#include "mot3d/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mot3d::geometry {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Intersection of segment p-q with the infinite line through a-b.
Point2 line_intersection(const Point2& p, const Point2& q, const Point2& a, const Point2& b) {
  const double d1 = cross(a, b, p);
  const double d2 = cross(a, b, q);
  const double t = d1 / (d1 - d2);
  return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

}  // namespace

std::array<Point2, 4> footprint(const Observation& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  constexpr std::array<std::array<double, 2>, 4> kSigns = {{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  std::array<Point2, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double lx = kSigns[i][0] * hl;
    const double ly = kSigns[i][1] * hw;
    out[i] = {box.x + c * lx - s * ly, box.y + s * lx + c * ly};
  }
  return out;
}

double signed_area(std::span<const Point2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = polygon[i];
    const Point2& q = polygon[(i + 1) % n];
    acc += p.x * q.y - q.x * p.y;
  }
  return 0.5 * acc;
}

std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip) {
  std::vector<Point2> output(subject.begin(), subject.end());
  std::vector<Point2> input;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point2& a = clip[e];
    const Point2& b = clip[(e + 1) % m];
    input.swap(output);
    output.clear();
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& cur = input[i];
      const Point2& prev = input[(i + n - 1) % n];
      const bool cur_in = cross(a, b, cur) >= 0.0;
      const bool prev_in = cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(line_intersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(line_intersection(prev, cur, a, b));
      }
    }
  }
  return output;
}

double footprint_overlap_area(const Observation& a, const Observation& b) {
  const auto pa = footprint(a);
  const auto pb = footprint(b);
  const auto poly = clip_convex(pa, pb);
  return std::max(0.0, signed_area(poly));
}

double height_overlap(const Observation& a, const Observation& b) {
  const double lo = std::max(a.z - 0.5 * a.height, b.z - 0.5 * b.height);
  const double hi = std::min(a.z + 0.5 * a.height, b.z + 0.5 * b.height);
  return std::max(0.0, hi - lo);
}

}  // namespace mot3d::geometry
