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

#ifndef ASMLINE_CUTSET_DIGRAPH_H_
#define ASMLINE_CUTSET_DIGRAPH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "asmline/assembly_model.h"
#include "asmline/constraints.h"

namespace asmline {

// Bit i set <=> joint i (PartGraph index) is already executed.
using JointMask = uint64_t;
inline constexpr int kMaxJoints = 63;

struct WeightConfig {
  double technology = 1.0 / 3.0;
  double handling = 1.0 / 3.0;
  double tolerance = 1.0 / 3.0;

  // Throws kInvalidArgument unless each weight is in [0, 1] and they sum to
  // 1 within 1e-9.
  void Validate() const;
};

// Normalized attribute values of one operation on one digraph edge.
struct EdgeAttributes {
  double technology = 0.0;
  double handling = 0.0;
  double tolerance = 0.0;

  bool operator==(const EdgeAttributes&) const = default;
};

// Sum over j in [0, J) of (J - j) * C(J, j), exact.
boost::multiprecision::cpp_int MaxEdgeBound(int joints);

// (mu . attrs) / layer. Throws kInvalidArgument for layer < 1.
double EdgeWeight(const EdgeAttributes& attrs, const WeightConfig& mu,
                  int layer);

// Parts touched by the joints in `mask`, as a bitmask over part indices.
uint64_t SubassemblyParts(JointMask mask, const PartGraph& graph);

// At most one connected component with two or more parts.
bool IsSinglePiece(JointMask mask, const PartGraph& graph);

// Attributes of executing `joint` from state `mask`. Handling is that of the
// part being inserted; the larger of the two for the first joint, and 0 for
// a joint whose parts are both already in the subassembly.
EdgeAttributes OperationAttributes(JointMask mask, int joint,
                                   const PartGraph& graph,
                                   const NormalizedAttributes& norm);

// DoF-based insertion check: every joint tying the inserted part to the
// current subassembly contributes the translations its DoF matrix allows,
// rotated into the new joint's frame and snapped to the nearest signed axis
// within `snap_degrees`. Feasible iff some direction survives all of them.
// Throws kMissingConstraint when a frame or DoF matrix is absent.
bool CollisionFeasible(JointMask mask, int new_joint, const PartGraph& graph,
                       const GeometryConstraints& geometry,
                       double snap_degrees = 1.0);

struct DigraphNode {
  JointMask joints = 0;
  int layer = 0;

  bool operator==(const DigraphNode&) const = default;
};

struct DigraphEdge {
  int source = 0;
  int target = 0;
  int op = 0;     // joint index
  int layer = 0;  // layer of the target node, 1-based
  double weight = 0.0;
  EdgeAttributes attrs;

  bool operator==(const DigraphEdge&) const = default;
};

// Layered DAG of assembly states. Nodes are ordered by layer, then by mask;
// edges by source, then by operation. Node 0 is the empty state.
class CutsetDigraph {
 public:
  CutsetDigraph() = default;
  CutsetDigraph(std::vector<std::string> op_ids, std::vector<double> op_times,
                std::vector<DigraphNode> nodes, std::vector<DigraphEdge> edges);

  int num_ops() const { return static_cast<int>(op_ids_.size()); }
  int num_layers() const { return num_ops() + 1; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<std::string>& op_ids() const { return op_ids_; }
  const std::vector<double>& op_times() const { return op_times_; }
  const std::vector<DigraphNode>& nodes() const { return nodes_; }
  const std::vector<DigraphEdge>& edges() const { return edges_; }
  const DigraphEdge& edge(int e) const { return edges_[e]; }
  const DigraphNode& node(int v) const { return nodes_[v]; }

  int start() const { return start_; }
  // -1 when the full state is absent.
  int end() const { return end_; }

  std::span<const int> OutEdges(int v) const {
    return {out_.data() + out_begin_[v], out_.data() + out_begin_[v + 1]};
  }
  std::span<const int> InEdges(int v) const {
    return {in_.data() + in_begin_[v], in_.data() + in_begin_[v + 1]};
  }

  // Keeps the selected edges and drops every node (and edge) that is not on
  // some start-to-end path. Relative order is preserved.
  CutsetDigraph Filtered(const std::vector<bool>& keep_edge) const;

  bool operator==(const CutsetDigraph& o) const {
    return op_ids_ == o.op_ids_ && op_times_ == o.op_times_ &&
           nodes_ == o.nodes_ && edges_ == o.edges_;
  }

 private:
  std::vector<std::string> op_ids_;
  std::vector<double> op_times_;
  std::vector<DigraphNode> nodes_;
  std::vector<DigraphEdge> edges_;
  int start_ = -1;
  int end_ = -1;
  std::vector<int> out_begin_, out_;
  std::vector<int> in_begin_, in_;
};

struct DigraphOptions {
  // Enables the DoF collision check when set.
  const GeometryConstraints* geometry = nullptr;
  double snap_degrees = 1.0;
  size_t max_edges = 5'000'000;
};

// Forward, layer-by-layer expansion of single-piece states. Throws
// kPlanningInfeasible when no full sequence survives, kSizeLimitExceeded
// when the edge cap is hit, kInstanceTooLarge beyond kMaxJoints.
CutsetDigraph GenerateDigraph(const PartGraph& graph,
                              const NormalizedAttributes& norm,
                              const WeightConfig& mu,
                              const DigraphOptions& options = {});

// Minimum total weight from each node to the end node (+inf when the end is
// unreachable). `best_edge`, when given, receives the first edge of a
// minimizing continuation (lowest edge index among ties, -1 at the end).
std::vector<double> DistancesToEnd(const CutsetDigraph& digraph,
                                   std::vector<int>* best_edge = nullptr);

// Sorted joint ids of a state, e.g. "{J1,J3}".
std::string CutsetLabel(const CutsetDigraph& digraph, int node);

std::string SerializeDigraph(const CutsetDigraph& digraph);
CutsetDigraph DeserializeDigraph(std::string_view document);

}  // namespace asmline

#endif  // ASMLINE_CUTSET_DIGRAPH_H_
