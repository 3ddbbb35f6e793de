// Copyright 2026 The tripleloop Authors
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

#ifndef TRIPLELOOP__ROAD_HPP_
#define TRIPLELOOP__ROAD_HPP_

#include "tripleloop/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace tripleloop
{

struct Straight
{
  double length{0.0};
};

/// Circular arc; positive angle turns left (CCW).
struct Arc
{
  double radius{0.0};
  double angle{0.0};
};

using RoadSegment = std::variant<Straight, Arc>;

inline double segment_length(const RoadSegment & seg)
{
  if (const auto * s = std::get_if<Straight>(&seg)) return s->length;
  const auto & a = std::get<Arc>(seg);
  return a.radius * std::abs(a.angle);
}

/// Single-lane road: analytic centerline plus 1 m samples.
class Road
{
public:
  static constexpr double kSampleSpacing = 1.0;

  explicit Road(std::vector<RoadSegment> segments, Pose start = {}) : segments_(std::move(segments)), start_(start)
  {
    if (segments_.empty()) throw std::invalid_argument("Road: at least one segment required");
    Pose cursor = start_;
    double s = 0.0;
    for (const auto & seg : segments_) {
      if (const auto * st = std::get_if<Straight>(&seg)) {
        if (!(st->length > 0.0)) throw std::invalid_argument("Road: straight length must be > 0");
      } else {
        const auto & a = std::get<Arc>(seg);
        if (!(a.radius > 0.0) || a.angle == 0.0) throw std::invalid_argument("Road: arc needs radius > 0, angle != 0");
      }
      starts_.push_back({s, cursor});
      const double len = segment_length(seg);
      cursor = advance(seg, cursor, len);
      s += len;
    }
    length_ = s;

    const auto n = static_cast<std::size_t>(std::floor(length_ / kSampleSpacing + 1e-9)) + 1;
    centerline_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      centerline_.push_back(pose_at(static_cast<double>(k) * kSampleSpacing));
    }
    build_index();
  }

  /// The default test road: 200 m straight, then a right-hand 400 m radius arc.
  static Road default_road(double total_length = 800.0)
  {
    const double arc_len = total_length - 200.0;
    return Road({Straight{200.0}, Arc{400.0, -arc_len / 400.0}});
  }

  double length() const { return length_; }
  const std::vector<RoadSegment> & segments() const { return segments_; }
  const Pose & start() const { return start_; }
  const std::vector<Pose> & centerline() const { return centerline_; }

  /// Centerline pose at arc length s; beyond the ends the road extends straight.
  Pose pose_at(double s) const
  {
    if (s <= 0.0) return advance(Straight{}, start_, s);
    std::size_t i = 0;
    while (i + 1 < starts_.size() && starts_[i + 1].first <= s) ++i;
    const double local = s - starts_[i].first;
    const double len = segment_length(segments_[i]);
    if (i + 1 == starts_.size() && local > len) {
      const Pose end = advance(segments_[i], starts_[i].second, len);
      return advance(Straight{}, end, local - len);
    }
    return advance(segments_[i], starts_[i].second, local);
  }

  /// Indices of the two samples nearest to (x, y), ascending.
  std::pair<std::size_t, std::size_t> nearest_pair_indices(double x, double y) const
  {
    constexpr double kMaxOffset = 50.0;
    const auto [cx, cy] = cell_of(x, y);
    std::size_t best = npos, second = npos;
    double best_d = std::numeric_limits<double>::infinity();
    double second_d = best_d;
    const auto consider = [&](std::size_t k) {
      const double d = std::hypot(centerline_[k].x - x, centerline_[k].y - y);
      if (better(d, k, best_d, best)) {
        second = best;
        second_d = best_d;
        best = k;
        best_d = d;
      } else if (better(d, k, second_d, second)) {
        second = k;
        second_d = d;
      }
    };
    // Ring r covers every point within r * kCell of the query cell boundary.
    const int max_ring = static_cast<int>(std::ceil(kMaxOffset / kCell)) + 2;
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int dx = -ring; dx <= ring; ++dx) {
        for (int dy = -ring; dy <= ring; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
          const auto it = grid_.find(key(cx + dx, cy + dy));
          if (it == grid_.end()) continue;
          for (std::size_t k : it->second) consider(k);
        }
      }
      if (second != npos && second_d + 1e-9 < static_cast<double>(ring) * kCell) break;
    }
    if (best == npos || second == npos || best_d > kMaxOffset) {
      throw std::out_of_range("nearest_centerline_pair: point farther than 50 m from the road");
    }
    return best < second ? std::pair{best, second} : std::pair{second, best};
  }

  /// Arc length of the projection of (x, y) onto the nearest sample pair.
  double station_of(double x, double y) const
  {
    const auto [i, j] = nearest_pair_indices(x, y);
    const Pose & a = centerline_[i];
    const Pose & b = centerline_[j];
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len2 = ex * ex + ey * ey;
    const double u = ((x - a.x) * ex + (y - a.y) * ey) / len2;
    return (static_cast<double>(i) + u * static_cast<double>(j - i)) * kSampleSpacing;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

private:
  static constexpr double kCell = 4.0;

  // Distance ties (within 1e-9 m) resolve to the sample with the larger index.
  static bool better(double d, std::size_t k, double ref_d, std::size_t ref_k)
  {
    if (ref_k == npos) return true;
    if (d < ref_d - 1e-9) return true;
    if (d > ref_d + 1e-9) return false;
    return k > ref_k;
  }

  static Pose advance(const RoadSegment & seg, const Pose & from, double dist)
  {
    Pose p = from;
    if (std::holds_alternative<Straight>(seg)) {
      p.x += dist * std::cos(from.heading);
      p.y += dist * std::sin(from.heading);
      return p;
    }
    const auto & a = std::get<Arc>(seg);
    const double sign = a.angle > 0.0 ? 1.0 : -1.0;
    const double dtheta = sign * dist / a.radius;
    // Center of curvature sits radius to the turning side.
    const double cxr = from.x - sign * a.radius * std::sin(from.heading);
    const double cyr = from.y + sign * a.radius * std::cos(from.heading);
    const double h = from.heading + dtheta;
    p.x = cxr + sign * a.radius * std::sin(h);
    p.y = cyr - sign * a.radius * std::cos(h);
    p.heading = normalize_angle(h);
    return p;
  }

  static long long key(long long cx, long long cy) { return (cx << 32) ^ (cy & 0xffffffffLL); }

  static std::pair<long long, long long> cell_of(double x, double y)
  {
    return {static_cast<long long>(std::floor(x / kCell)), static_cast<long long>(std::floor(y / kCell))};
  }

  void build_index()
  {
    for (std::size_t k = 0; k < centerline_.size(); ++k) {
      const auto [cx, cy] = cell_of(centerline_[k].x, centerline_[k].y);
      grid_[key(cx, cy)].push_back(k);
    }
  }

  std::vector<RoadSegment> segments_;
  Pose start_;
  std::vector<std::pair<double, Pose>> starts_;
  double length_{0.0};
  std::vector<Pose> centerline_;
  std::unordered_map<long long, std::vector<std::size_t>> grid_;
};

/// The two centerline samples nearest to point, ordered by arc length.
inline std::pair<Pose, Pose> nearest_centerline_pair(const Road & road, const Pose & point)
{
  const auto [i, j] = road.nearest_pair_indices(point.x, point.y);
  return {road.centerline()[i], road.centerline()[j]};
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__ROAD_HPP_
