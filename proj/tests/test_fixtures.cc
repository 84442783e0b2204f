// Copyright 2026 The asmline Authors.
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

#include "test_fixtures.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/Geometry>

#include "asmline/line_balancer.h"

namespace asmline::testing {

namespace {

Part MakePart(std::string id, double mass, int handling) {
  return Part{id, "part " + id, mass, handling};
}

Joint MakeJoint(std::string id, std::string a, std::string b, double time,
                int tolerance, std::string technology) {
  return Joint{std::move(id), std::move(a), std::move(b), time, tolerance,
               std::move(technology)};
}

}  // namespace

PartGraph Triangle(std::vector<double> times,
                   std::vector<std::string> technologies) {
  return PartGraph(
      {MakePart("A", 1.0, 1), MakePart("B", 2.0, 2), MakePart("C", 3.0, 3)},
      {MakeJoint("J1", "A", "B", times[0], 1, technologies[0]),
       MakeJoint("J2", "B", "C", times[1], 2, technologies[1]),
       MakeJoint("J3", "A", "C", times[2], 3, technologies[2])});
}

PartGraph PathAssembly() {
  return PartGraph({MakePart("A", 1, 1), MakePart("B", 1, 2),
                    MakePart("C", 1, 3), MakePart("D", 1, 1)},
                   {MakeJoint("J1", "A", "B", 2, 1, "MAG"),
                    MakeJoint("J2", "B", "C", 3, 2, "MAG"),
                    MakeJoint("J3", "C", "D", 4, 3, "MAG")});
}

PartGraph Assembly13() {
  std::vector<Part> parts;
  const double mass[14] = {12.0, 3.5, 4.0, 2.2, 6.1, 1.4, 0.8,
                           2.9,  1.1, 5.3, 0.6, 0.9, 1.7, 2.4};
  const int handling[14] = {3, 1, 2, 1, 3, 2, 1, 2, 3, 1, 2, 3, 1, 2};
  for (int i = 0; i < 14; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "P%02d", i + 1);
    parts.push_back(MakePart(id, mass[i], handling[i]));
  }
  const struct {
    const char* a;
    const char* b;
    double time;
    int tol;
    const char* tech;
  } spec[13] = {
      {"P01", "P02", 120, 2, "MAG"},  {"P02", "P03", 80, 4, "MAG"},
      {"P03", "P04", 150, 1, "MAG"},  {"P01", "P05", 60, 3, "MAG"},
      {"P05", "P06", 200, 1, "MAG"},  {"P02", "P07", 90, 4, "MAG"},
      {"P07", "P08", 110, 2, "MAG"},  {"P04", "P09", 70, 3, "MAG"},
      {"P06", "P10", 130, 2, "MAG"},  {"P03", "P11", 50, 1, "MAG2"},
      {"P08", "P12", 160, 4, "MAG2"}, {"P10", "P13", 100, 3, "MAG2"},
      {"P01", "P14", 40, 2, "MAG2"},
  };
  std::vector<Joint> joints;
  for (int i = 0; i < 13; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "J%02d", i + 1);
    joints.push_back(MakeJoint(id, spec[i].a, spec[i].b, spec[i].time,
                               spec[i].tol, spec[i].tech));
  }
  return PartGraph(std::move(parts), std::move(joints));
}

PartGraph Assembly8() {
  std::vector<Part> parts;
  const int handling[8] = {2, 1, 3, 1, 2, 3, 1, 2};
  for (int i = 0; i < 8; ++i) {
    parts.push_back(MakePart("P" + std::to_string(i + 1), 1.0 + i, handling[i]));
  }
  return PartGraph(
      std::move(parts),
      {MakeJoint("J1", "P1", "P2", 12, 2, "MAG"),
       MakeJoint("J2", "P2", "P3", 7, 1, "MAG"),
       MakeJoint("J3", "P3", "P4", 9, 3, "LASER"),
       MakeJoint("J4", "P4", "P1", 15, 1, "MAG"),
       MakeJoint("J5", "P2", "P5", 4, 2, "LASER"),
       MakeJoint("J6", "P5", "P6", 11, 3, "MAG"),
       MakeJoint("J7", "P3", "P7", 6, 1, "LASER"),
       MakeJoint("J8", "P7", "P8", 10, 2, "MAG")});
}

PartGraph RandomAssembly(std::mt19937_64& rng, int joints, double time_lo,
                         double time_hi) {
  std::uniform_int_distribution<int> part_count(std::min(3, joints + 1),
                                                joints + 1);
  int n = part_count(rng);
  // Keep distinct pairs available for every joint.
  while (n * (n - 1) / 2 < joints) ++n;
  std::uniform_real_distribution<double> time(time_lo, time_hi);
  std::uniform_int_distribution<int> level(1, 3);
  std::uniform_int_distribution<int> tol(1, 5);
  const char* techs[] = {"LASER", "MAG", "SPOT"};
  std::uniform_int_distribution<int> tech(0, 2);
  std::vector<Part> parts;
  for (int i = 0; i < n; ++i) {
    parts.push_back(MakePart("P" + std::to_string(i), 1.0 + i, level(rng)));
  }
  std::set<std::pair<int, int>> used;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    const int p = parent(rng);
    pairs.emplace_back(p, i);
    used.insert({p, i});
  }
  std::uniform_int_distribution<int> any(0, n - 1);
  while (static_cast<int>(pairs.size()) < joints) {
    int a = any(rng), b = any(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!used.insert({a, b}).second) continue;
    pairs.emplace_back(a, b);
  }
  std::vector<Joint> js;
  for (size_t k = 0; k < pairs.size(); ++k) {
    js.push_back(MakeJoint("J" + std::to_string(k), parts[pairs[k].first].id,
                           parts[pairs[k].second].id, time(rng), tol(rng),
                           techs[tech(rng)]));
  }
  return PartGraph(std::move(parts), std::move(js));
}

CutsetDigraph ChainDigraph(const std::vector<double>& times,
                           const std::vector<double>& weights) {
  std::vector<std::string> ids;
  std::vector<DigraphNode> nodes = {{0, 0}};
  std::vector<DigraphEdge> edges;
  for (size_t i = 0; i < times.size(); ++i) {
    ids.push_back("J" + std::to_string(i + 1));
    nodes.push_back({(JointMask{1} << (i + 1)) - 1, static_cast<int>(i + 1)});
    DigraphEdge e;
    e.source = static_cast<int>(i);
    e.target = static_cast<int>(i + 1);
    e.op = static_cast<int>(i);
    e.layer = static_cast<int>(i + 1);
    e.weight = weights[i];
    edges.push_back(e);
  }
  return CutsetDigraph(ids, times, nodes, edges);
}

bool RefSinglePiece(const PartGraph& g, uint64_t mask) {
  const int n = g.num_parts();
  std::vector<std::vector<int>> adj(n);
  std::vector<bool> touched(n, false);
  for (int j = 0; j < g.num_joints(); ++j) {
    if (!((mask >> j) & 1)) continue;
    const int a = *g.PartIndex(g.joints()[j].part_a);
    const int b = *g.PartIndex(g.joints()[j].part_b);
    adj[a].push_back(b);
    adj[b].push_back(a);
    touched[a] = touched[b] = true;
  }
  std::vector<bool> seen(n, false);
  int components = 0;
  for (int s = 0; s < n; ++s) {
    if (!touched[s] || seen[s]) continue;
    ++components;
    std::vector<int> stack = {s};
    seen[s] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
  }
  return components <= 1;
}

RefDigraphCounts RefCountDigraph(const PartGraph& g) {
  const int J = g.num_joints();
  const uint64_t full = (uint64_t{1} << J) - 1;
  std::vector<char> ok(full + 1), fwd(full + 1, 0), bwd(full + 1, 0);
  for (uint64_t m = 0; m <= full; ++m) ok[m] = RefSinglePiece(g, m);
  // Masks in increasing order visit subsets before supersets.
  fwd[0] = ok[0];
  for (uint64_t m = 1; m <= full; ++m) {
    if (!ok[m]) continue;
    for (int j = 0; j < J; ++j) {
      if (((m >> j) & 1) && fwd[m & ~(uint64_t{1} << j)]) fwd[m] = 1;
    }
  }
  bwd[full] = fwd[full];
  for (uint64_t m = full; m-- > 0;) {
    if (!fwd[m]) continue;
    for (int j = 0; j < J; ++j) {
      if (!((m >> j) & 1) && bwd[m | (uint64_t{1} << j)]) bwd[m] = 1;
    }
  }
  RefDigraphCounts c;
  for (uint64_t m = 0; m <= full; ++m) {
    if (!bwd[m]) continue;
    ++c.nodes;
    for (int j = 0; j < J; ++j) {
      if (!((m >> j) & 1) && bwd[m | (uint64_t{1} << j)]) ++c.edges;
    }
  }
  return c;
}

std::vector<double> RefMinMax(const std::vector<double>& v) {
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) out.push_back(hi > lo ? (x - lo) / (hi - lo) : 0.0);
  return out;
}

double RefEdgeWeight(const PartGraph& g, const WeightConfig& mu, uint64_t mask,
                     int j) {
  std::vector<double> tol, hand;
  std::set<std::string> techs;
  for (const Joint& x : g.joints()) {
    tol.push_back(x.tolerance);
    techs.insert(x.technology);
  }
  for (const Part& p : g.parts()) hand.push_back(p.handling);
  const std::vector<double> ntol = RefMinMax(tol);
  const std::vector<double> nhand = RefMinMax(hand);
  const int rank = static_cast<int>(
      std::distance(techs.begin(), techs.find(g.joints()[j].technology)));
  const double tech =
      techs.size() > 1 ? static_cast<double>(rank) / (techs.size() - 1) : 0.0;

  std::set<int> placed;
  for (int k = 0; k < g.num_joints(); ++k) {
    if ((mask >> k) & 1) {
      placed.insert(*g.PartIndex(g.joints()[k].part_a));
      placed.insert(*g.PartIndex(g.joints()[k].part_b));
    }
  }
  const int a = *g.PartIndex(g.joints()[j].part_a);
  const int b = *g.PartIndex(g.joints()[j].part_b);
  double h;
  if (placed.contains(a) && placed.contains(b)) {
    h = 0.0;
  } else if (placed.contains(a)) {
    h = nhand[b];
  } else if (placed.contains(b)) {
    h = nhand[a];
  } else {
    h = std::max(nhand[a], nhand[b]);
  }
  const int layer = std::popcount(mask) + 1;
  return (mu.technology * tech + mu.handling * h + mu.tolerance * ntol[j]) /
         layer;
}

RefOptimum RefBalance(const PartGraph& g, const WeightConfig& mu, int phases,
                      double lambda, double c) {
  const int J = g.num_joints();
  std::vector<int> perm(J);
  std::iota(perm.begin(), perm.end(), 0);
  RefOptimum best{std::numeric_limits<double>::infinity(), 0, 0};
  do {
    uint64_t mask = 0;
    double w = 0.0;
    bool valid = true;
    std::vector<double> times;
    for (int j : perm) {
      w += RefEdgeWeight(g, mu, mask, j);
      mask |= uint64_t{1} << j;
      if (!RefSinglePiece(g, mask)) {
        valid = false;
        break;
      }
      times.push_back(g.joints()[j].time);
    }
    if (!valid) continue;
    const double alpha = RefBottleneck(times, phases);
    const double obj = (1 - lambda) * w + lambda * c * alpha;
    if (obj < best.objective) best = {obj, alpha, w};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double RefBottleneck(const std::vector<double>& times, int phases) {
  const int n = static_cast<int>(times.size());
  double best = std::numeric_limits<double>::infinity();
  // Bit i of `cuts` set: a new phase starts after item i.
  for (uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
    if (std::popcount(cuts) != phases - 1) continue;
    double load = 0.0, worst = 0.0;
    for (int i = 0; i < n; ++i) {
      load += times[i];
      if (i == n - 1 || ((cuts >> i) & 1)) {
        worst = std::max(worst, load);
        load = 0.0;
      }
    }
    best = std::min(best, worst);
  }
  return best;
}

bool BoxesOverlap(const Box& a, const Box& b) {
  for (int k = 0; k < 3; ++k) {
    if (std::min(a.hi[k], b.hi[k]) - std::max(a.lo[k], b.lo[k]) <= 1e-9) {
      return false;
    }
  }
  return true;
}

std::vector<Eigen::Vector3d> BoxCorners(const Box& b) {
  std::vector<Eigen::Vector3d> out;
  for (int i = 0; i < 8; ++i) {
    out.emplace_back(i & 1 ? b.hi.x() : b.lo.x(), i & 2 ? b.hi.y() : b.lo.y(),
                     i & 4 ? b.hi.z() : b.lo.z());
  }
  return out;
}

namespace {

// Edge directions of a box given its corners in BoxCorners() order.
std::vector<Eigen::Vector3d> BoxAxes(const std::vector<Eigen::Vector3d>& c) {
  return {(c[1] - c[0]).normalized(), (c[2] - c[0]).normalized(),
          (c[4] - c[0]).normalized()};
}

}  // namespace

bool ConvexPenetrate(const std::vector<Eigen::Vector3d>& a,
                     const std::vector<Eigen::Vector3d>& b, double eps) {
  std::vector<Eigen::Vector3d> axes;
  const auto ea = BoxAxes(a);
  const auto eb = BoxAxes(b);
  axes.insert(axes.end(), ea.begin(), ea.end());
  axes.insert(axes.end(), eb.begin(), eb.end());
  for (const auto& u : ea) {
    for (const auto& v : eb) {
      const Eigen::Vector3d n = u.cross(v);
      if (n.norm() > 1e-9) axes.push_back(n.normalized());
    }
  }
  for (const auto& axis : axes) {
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const auto& p : a) {
      amin = std::min(amin, p.dot(axis));
      amax = std::max(amax, p.dot(axis));
    }
    for (const auto& p : b) {
      bmin = std::min(bmin, p.dot(axis));
      bmax = std::max(bmax, p.dot(axis));
    }
    if (std::min(amax, bmax) - std::max(amin, bmin) <= eps) return false;
  }
  return true;
}

std::array<std::array<int, 4>, 3> RefDofMatrix(
    const Box& moved, const std::vector<Box>& fixed, const JointFrame& frame,
    const std::vector<double>& distances, const std::vector<double>& angles_deg) {
  std::array<std::array<int, 4>, 3> m{};
  const std::vector<Eigen::Vector3d> corners = BoxCorners(moved);
  auto hits = [&](const std::vector<Eigen::Vector3d>& pts) {
    for (const Box& f : fixed) {
      if (ConvexPenetrate(pts, BoxCorners(f), 1e-7)) return true;
    }
    return false;
  };
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d axis = frame.rotation.col(k);
    for (int s = 0; s < 2; ++s) {
      const double sign = s == 0 ? 1.0 : -1.0;
      bool blocked = false;
      for (double d : distances) {
        std::vector<Eigen::Vector3d> pts;
        for (const auto& p : corners) pts.push_back(p + sign * d * axis);
        blocked |= hits(pts);
      }
      m[k][s] = blocked ? 0 : 1;
      blocked = false;
      for (double deg : angles_deg) {
        const Eigen::Matrix3d r =
            Eigen::AngleAxisd(sign * deg * std::acos(-1.0) / 180.0, axis)
                .toRotationMatrix();
        std::vector<Eigen::Vector3d> pts;
        for (const auto& p : corners) {
          pts.push_back(frame.origin + r * (p - frame.origin));
        }
        blocked |= hits(pts);
      }
      m[k][2 + s] = blocked ? 0 : 1;
    }
  }
  return m;
}

TriangleMesh BoxMesh(const Box& b, const std::string& id) {
  return MakeBox(b.lo, b.hi, id);
}

std::vector<Box> WorkcellBoxes() {
  using V = Eigen::Vector3d;
  return {{V(1, 1, 1), V(3, 3, 3)},     // 1: block
          {V(5, 1, 1), V(7, 3, 3)},     // 2: block
          {V(0, 0, 0), V(10, 10, 1)},   // 3: plate
          {V(0, 3, 1), V(10, 4, 4)}};   // 4: wall
}

std::vector<TriangleMesh> WorkcellMeshes() {
  std::vector<TriangleMesh> out;
  const std::vector<Box> boxes = WorkcellBoxes();
  for (size_t i = 0; i < boxes.size(); ++i) {
    out.push_back(BoxMesh(boxes[i], std::to_string(i + 1)));
  }
  return out;
}

JointFrame WorkcellFrame13() {
  JointFrame f;
  f.joint_id = "13";
  f.origin = Eigen::Vector3d(2, 2, 1);
  return f;
}

std::vector<Box> SlotBoxes() {
  using V = Eigen::Vector3d;
  return {{V(0, 0, 0), V(3, 3, 1)},   // floor
          {V(0, 0, 1), V(1, 3, 3)},   // wall -x
          {V(2, 0, 1), V(3, 3, 3)},   // wall +x
          {V(1, 0, 1), V(2, 1, 3)},   // wall -y
          {V(1, 2, 1), V(2, 3, 3)}};  // wall +y
}

Box PegBox() {
  return {Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(2, 2, 2.5)};
}

TriangleMesh SlotMesh() {
  std::vector<TriangleMesh> parts;
  for (const Box& b : SlotBoxes()) parts.push_back(BoxMesh(b, "slot"));
  return MergeMeshes(parts, "slot");
}

TriangleMesh PegMesh() { return BoxMesh(PegBox(), "peg"); }

}  // namespace asmline::testing
