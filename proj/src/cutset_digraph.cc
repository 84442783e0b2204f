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

#include "asmline/cutset_digraph.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "asmline/error.h"
#include "json.hpp"

namespace asmline {

using nlohmann::json;

void WeightConfig::Validate() const {
  for (double w : {technology, handling, tolerance}) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "engineering weights must lie in [0, 1]");
    }
  }
  if (std::abs(technology + handling + tolerance - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "engineering weights must sum to 1");
  }
}

boost::multiprecision::cpp_int MaxEdgeBound(int joints) {
  if (joints < 1) {
    throw Error(ErrorCode::kInvalidArgument, "edge bound needs J >= 1");
  }
  using boost::multiprecision::cpp_int;
  cpp_int total = 0;
  cpp_int binom = 1;  // C(J, j)
  for (int j = 0; j < joints; ++j) {
    total += cpp_int(joints - j) * binom;
    binom = binom * (joints - j) / (j + 1);
  }
  return total;
}

double EdgeWeight(const EdgeAttributes& attrs, const WeightConfig& mu,
                  int layer) {
  if (layer < 1) {
    throw Error(ErrorCode::kInvalidArgument, "edge layer must be >= 1");
  }
  return (mu.technology * attrs.technology + mu.handling * attrs.handling +
          mu.tolerance * attrs.tolerance) /
         layer;
}

uint64_t SubassemblyParts(JointMask mask, const PartGraph& g) {
  uint64_t parts = 0;
  for (JointMask m = mask; m != 0; m &= m - 1) {
    const int j = std::countr_zero(m);
    parts |= uint64_t{1} << g.EndpointA(j);
    parts |= uint64_t{1} << g.EndpointB(j);
  }
  return parts;
}

bool IsSinglePiece(JointMask mask, const PartGraph& g) {
  std::vector<int> parent(g.num_parts());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<bool> touched(g.num_parts(), false);
  for (JointMask m = mask; m != 0; m &= m - 1) {
    const int j = std::countr_zero(m);
    const int a = g.EndpointA(j);
    const int b = g.EndpointB(j);
    touched[a] = touched[b] = true;
    parent[find(a)] = find(b);
  }
  int root = -1;
  for (int p = 0; p < g.num_parts(); ++p) {
    if (!touched[p]) continue;
    const int r = find(p);
    if (root == -1) {
      root = r;
    } else if (r != root) {
      return false;
    }
  }
  return true;
}

EdgeAttributes OperationAttributes(JointMask mask, int joint,
                                   const PartGraph& g,
                                   const NormalizedAttributes& norm) {
  EdgeAttributes attrs;
  attrs.technology = norm.joint_technology[joint];
  attrs.tolerance = norm.joint_tolerance[joint];
  const int a = g.EndpointA(joint);
  const int b = g.EndpointB(joint);
  if (mask == 0) {
    attrs.handling = std::max(norm.part_handling[a], norm.part_handling[b]);
    return attrs;
  }
  const uint64_t parts = SubassemblyParts(mask, g);
  const bool has_a = (parts >> a) & 1;
  const bool has_b = (parts >> b) & 1;
  if (has_a && !has_b) {
    attrs.handling = norm.part_handling[b];
  } else if (has_b && !has_a) {
    attrs.handling = norm.part_handling[a];
  } else if (!has_a && !has_b) {
    attrs.handling = std::max(norm.part_handling[a], norm.part_handling[b]);
  }
  return attrs;
}

namespace {

// Index 0..5 of the signed axis closest to `v` if within `max_angle`,
// else -1. Order: +x, -x, +y, -y, +z, -z.
int SnapToAxis(const Eigen::Vector3d& v, double max_angle_rad) {
  const double len = v.norm();
  if (len == 0) return -1;
  int best = 0;
  double best_dot = -2.0;
  for (int k = 0; k < 3; ++k) {
    for (int s = 0; s < 2; ++s) {
      const double d = (s == 0 ? v[k] : -v[k]) / len;
      if (d > best_dot) {
        best_dot = d;
        best = 2 * k + s;
      }
    }
  }
  return best_dot >= std::cos(max_angle_rad) - 1e-15 ? best : -1;
}

const JointFrame& FrameOrThrow(const GeometryConstraints& geo,
                               const std::string& frame_id) {
  const auto it = geo.frames.find(frame_id);
  if (it == geo.frames.end()) {
    throw Error(ErrorCode::kMissingConstraint,
                "no coordinate frame '" + frame_id + "'");
  }
  return it->second;
}

}  // namespace

bool CollisionFeasible(JointMask mask, int new_joint, const PartGraph& g,
                       const GeometryConstraints& geo, double snap_degrees) {
  if (mask == 0) return true;
  const uint64_t parts = SubassemblyParts(mask, g);
  const int a = g.EndpointA(new_joint);
  const int b = g.EndpointB(new_joint);
  const bool has_a = (parts >> a) & 1;
  const bool has_b = (parts >> b) & 1;
  // Nothing moves when both parts are already placed; with neither placed
  // there is no mating subassembly to collide with.
  if (has_a == has_b) return true;
  const int inserted = has_a ? b : a;
  const std::string& inserted_id = g.parts()[inserted].id;

  const JointFrame& reference =
      FrameOrThrow(geo, g.joints()[new_joint].id);
  const Eigen::Matrix3d to_reference = reference.rotation.transpose();
  const double max_angle = snap_degrees * std::numbers::pi / 180.0;

  unsigned allowed = 0b111111;
  for (int j : g.IncidentJoints(inserted)) {
    const int other = g.EndpointA(j) == inserted ? g.EndpointB(j) : g.EndpointA(j);
    if (!((parts >> other) & 1)) continue;
    const std::string& joint_id = g.joints()[j].id;
    const DofMatrix* dof = geo.FindDof(joint_id, inserted_id);
    if (dof == nullptr) {
      throw Error(ErrorCode::kMissingConstraint,
                  "no DoF matrix for part " + inserted_id + " at joint " +
                      joint_id);
    }
    const JointFrame& frame = FrameOrThrow(geo, dof->frame_id);
    unsigned dirs = 0;
    for (int k = 0; k < 3; ++k) {
      for (int s = 0; s < 2; ++s) {
        if (dof->m[k][s == 0 ? DofMatrix::kTranslatePos
                             : DofMatrix::kTranslateNeg] != 1) {
          continue;
        }
        const Eigen::Vector3d local =
            (s == 0 ? 1.0 : -1.0) * Eigen::Vector3d::Unit(k);
        const int snapped =
            SnapToAxis(to_reference * (frame.rotation * local), max_angle);
        if (snapped >= 0) dirs |= 1u << snapped;
      }
    }
    allowed &= dirs;
    if (allowed == 0) return false;
  }
  return allowed != 0;
}

CutsetDigraph::CutsetDigraph(std::vector<std::string> op_ids,
                             std::vector<double> op_times,
                             std::vector<DigraphNode> nodes,
                             std::vector<DigraphEdge> edges)
    : op_ids_(std::move(op_ids)),
      op_times_(std::move(op_times)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  const int n = num_nodes();
  const JointMask full =
      num_ops() >= 64 ? ~JointMask{0} : (JointMask{1} << num_ops()) - 1;
  for (int v = 0; v < n; ++v) {
    if (nodes_[v].joints == 0 && start_ < 0) start_ = v;
    if (nodes_[v].joints == full && nodes_[v].layer == num_ops()) end_ = v;
  }
  out_begin_.assign(n + 1, 0);
  in_begin_.assign(n + 1, 0);
  for (const DigraphEdge& e : edges_) {
    if (e.source < 0 || e.source >= n || e.target < 0 || e.target >= n) {
      throw Error(ErrorCode::kMalformedDocument, "edge endpoint out of range");
    }
    ++out_begin_[e.source + 1];
    ++in_begin_[e.target + 1];
  }
  std::partial_sum(out_begin_.begin(), out_begin_.end(), out_begin_.begin());
  std::partial_sum(in_begin_.begin(), in_begin_.end(), in_begin_.begin());
  out_.resize(edges_.size());
  in_.resize(edges_.size());
  std::vector<int> out_fill(out_begin_.begin(), out_begin_.end() - 1);
  std::vector<int> in_fill(in_begin_.begin(), in_begin_.end() - 1);
  for (int e = 0; e < num_edges(); ++e) {
    out_[out_fill[edges_[e].source]++] = e;
    in_[in_fill[edges_[e].target]++] = e;
  }
}

CutsetDigraph CutsetDigraph::Filtered(const std::vector<bool>& keep_edge) const {
  const int n = num_nodes();
  std::vector<bool> forward(n, false);
  std::vector<bool> backward(n, false);
  // Edges only go from layer k to k+1, and nodes are sorted by layer, so a
  // single sweep in each direction suffices.
  if (start_ >= 0) forward[start_] = true;
  for (int v = 0; v < n; ++v) {
    if (!forward[v]) continue;
    for (int e : OutEdges(v)) {
      if (keep_edge[e]) forward[edges_[e].target] = true;
    }
  }
  if (end_ >= 0) backward[end_] = true;
  for (int v = n - 1; v >= 0; --v) {
    if (!backward[v]) continue;
    for (int e : InEdges(v)) {
      if (keep_edge[e]) backward[edges_[e].source] = true;
    }
  }
  std::vector<int> remap(n, -1);
  std::vector<DigraphNode> nodes;
  for (int v = 0; v < n; ++v) {
    if (forward[v] && backward[v]) {
      remap[v] = static_cast<int>(nodes.size());
      nodes.push_back(nodes_[v]);
    }
  }
  std::vector<DigraphEdge> edges;
  for (int e = 0; e < num_edges(); ++e) {
    const DigraphEdge& edge = edges_[e];
    if (!keep_edge[e] || remap[edge.source] < 0 || remap[edge.target] < 0) {
      continue;
    }
    DigraphEdge copy = edge;
    copy.source = remap[edge.source];
    copy.target = remap[edge.target];
    edges.push_back(copy);
  }
  return CutsetDigraph(op_ids_, op_times_, std::move(nodes), std::move(edges));
}

CutsetDigraph GenerateDigraph(const PartGraph& g,
                              const NormalizedAttributes& norm,
                              const WeightConfig& mu,
                              const DigraphOptions& options) {
  mu.Validate();
  const int num_joints = g.num_joints();
  if (num_joints < 1) {
    throw Error(ErrorCode::kInvalidArgument, "assembly has no joints");
  }
  if (num_joints > kMaxJoints || g.num_parts() > 64) {
    throw Error(ErrorCode::kInstanceTooLarge,
                "at most " + std::to_string(kMaxJoints) +
                    " joints and 64 parts are supported");
  }
  const JointMask full = (JointMask{1} << num_joints) - 1;

  std::vector<DigraphNode> nodes = {{0, 0}};
  std::vector<DigraphEdge> edges;
  int layer_begin = 0;
  for (int k = 0; k < num_joints; ++k) {
    const int layer_end = static_cast<int>(nodes.size());
    struct Pending {
      int source;
      int op;
      JointMask target;
    };
    std::vector<Pending> pending;
    for (int v = layer_begin; v < layer_end; ++v) {
      const JointMask mask = nodes[v].joints;
      const uint64_t parts = SubassemblyParts(mask, g);
      for (int j = 0; j < num_joints; ++j) {
        if ((mask >> j) & 1) continue;
        // Single-piece flow: after the first joint, every new joint must
        // touch the existing subassembly.
        if (mask != 0 && !((parts >> g.EndpointA(j)) & 1) &&
            !((parts >> g.EndpointB(j)) & 1)) {
          continue;
        }
        if (options.geometry != nullptr &&
            !CollisionFeasible(mask, j, g, *options.geometry,
                               options.snap_degrees)) {
          continue;
        }
        pending.push_back({v, j, mask | (JointMask{1} << j)});
      }
    }
    if (edges.size() + pending.size() > options.max_edges) {
      throw Error(ErrorCode::kSizeLimitExceeded,
                  "digraph exceeds the edge cap of " +
                      std::to_string(options.max_edges));
    }
    std::vector<JointMask> targets;
    targets.reserve(pending.size());
    for (const Pending& p : pending) targets.push_back(p.target);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    std::unordered_map<JointMask, int> index;
    index.reserve(targets.size());
    for (JointMask t : targets) {
      index.emplace(t, static_cast<int>(nodes.size()));
      nodes.push_back({t, k + 1});
    }
    for (const Pending& p : pending) {
      DigraphEdge e;
      e.source = p.source;
      e.target = index.at(p.target);
      e.op = p.op;
      e.layer = k + 1;
      e.attrs = OperationAttributes(nodes[p.source].joints, p.op, g, norm);
      e.weight = EdgeWeight(e.attrs, mu, e.layer);
      edges.push_back(e);
    }
    layer_begin = layer_end;
    if (targets.empty()) break;
  }

  std::vector<std::string> op_ids;
  std::vector<double> op_times;
  for (const Joint& j : g.joints()) {
    op_ids.push_back(j.id);
    op_times.push_back(j.time);
  }
  CutsetDigraph raw(std::move(op_ids), std::move(op_times), std::move(nodes),
                    std::move(edges));
  if (raw.end() < 0 || raw.node(raw.end()).joints != full) {
    throw Error(ErrorCode::kPlanningInfeasible,
                "no feasible assembly sequence exists");
  }
  return raw.Filtered(std::vector<bool>(raw.num_edges(), true));
}

std::vector<double> DistancesToEnd(const CutsetDigraph& d,
                                   std::vector<int>* best_edge) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(d.num_nodes(), kInf);
  std::vector<int> best(d.num_nodes(), -1);
  if (d.end() >= 0) dist[d.end()] = 0.0;
  // Nodes are sorted by layer, so reverse order is a reverse topological
  // order.
  for (int v = d.num_nodes() - 1; v >= 0; --v) {
    for (int e : d.OutEdges(v)) {
      const double cand = d.edge(e).weight + dist[d.edge(e).target];
      if (cand < dist[v]) {
        dist[v] = cand;
        best[v] = e;
      }
    }
  }
  if (best_edge != nullptr) *best_edge = std::move(best);
  return dist;
}

std::string CutsetLabel(const CutsetDigraph& d, int node) {
  std::vector<std::string> ids;
  for (JointMask m = d.node(node).joints; m != 0; m &= m - 1) {
    ids.push_back(d.op_ids()[std::countr_zero(m)]);
  }
  std::sort(ids.begin(), ids.end());
  std::string out = "{";
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ",";
    out += ids[i];
  }
  return out + "}";
}

std::string SerializeDigraph(const CutsetDigraph& d) {
  json doc;
  doc["operations"] = json::array();
  for (int o = 0; o < d.num_ops(); ++o) {
    doc["operations"].push_back({{"id", d.op_ids()[o]}, {"time", d.op_times()[o]}});
  }
  doc["nodes"] = json::array();
  for (const DigraphNode& n : d.nodes()) {
    std::vector<int> joints;
    for (JointMask m = n.joints; m != 0; m &= m - 1) {
      joints.push_back(std::countr_zero(m));
    }
    doc["nodes"].push_back({{"layer", n.layer}, {"joints", joints}});
  }
  doc["edges"] = json::array();
  for (const DigraphEdge& e : d.edges()) {
    doc["edges"].push_back({{"source", e.source},
                            {"target", e.target},
                            {"op", e.op},
                            {"layer", e.layer},
                            {"weight", e.weight},
                            {"technology", e.attrs.technology},
                            {"handling", e.attrs.handling},
                            {"tolerance", e.attrs.tolerance}});
  }
  return doc.dump(1) + "\n";
}

CutsetDigraph DeserializeDigraph(std::string_view document) {
  try {
    const json doc = json::parse(document);
    std::vector<std::string> op_ids;
    std::vector<double> op_times;
    for (const json& o : doc.at("operations")) {
      op_ids.push_back(o.at("id").get<std::string>());
      op_times.push_back(o.at("time").get<double>());
    }
    if (op_ids.size() > static_cast<size_t>(kMaxJoints)) {
      throw Error(ErrorCode::kInstanceTooLarge, "too many operations");
    }
    std::vector<DigraphNode> nodes;
    for (const json& n : doc.at("nodes")) {
      DigraphNode node;
      node.layer = n.at("layer").get<int>();
      for (int j : n.at("joints").get<std::vector<int>>()) {
        if (j < 0 || j >= static_cast<int>(op_ids.size())) {
          throw Error(ErrorCode::kMalformedDocument, "joint index out of range");
        }
        node.joints |= JointMask{1} << j;
      }
      nodes.push_back(node);
    }
    std::vector<DigraphEdge> edges;
    for (const json& e : doc.at("edges")) {
      DigraphEdge edge;
      edge.source = e.at("source").get<int>();
      edge.target = e.at("target").get<int>();
      edge.op = e.at("op").get<int>();
      edge.layer = e.at("layer").get<int>();
      edge.weight = e.at("weight").get<double>();
      edge.attrs.technology = e.at("technology").get<double>();
      edge.attrs.handling = e.at("handling").get<double>();
      edge.attrs.tolerance = e.at("tolerance").get<double>();
      edges.push_back(edge);
    }
    return CutsetDigraph(std::move(op_ids), std::move(op_times),
                         std::move(nodes), std::move(edges));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("digraph document: ") + e.what());
  }
}

}  // namespace asmline
