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

#ifndef ASMLINE_GRAPH_REDUCTION_H_
#define ASMLINE_GRAPH_REDUCTION_H_

#include <cstdint>
#include <random>
#include <vector>

#include "asmline/cutset_digraph.h"

namespace asmline {

// A start-to-end path as edge indices in layer order.
struct DigraphPath {
  std::vector<int> edges;
  double weight = 0.0;
};

// Up to `k` loopless start-to-end paths in non-decreasing weight order
// (deviation search). Equal weights are ordered by edge sequence. Throws
// kPlanningInfeasible when the digraph has no start-to-end path.
std::vector<DigraphPath> KShortestPaths(const CutsetDigraph& digraph, int k);

struct ReductionConfig {
  // Share of each layer's removable edges to drop.
  double fraction = 0.0;
  int k_paths = 10;
  // Number of first and of last edge layers left untouched.
  int protected_outer_layers = 1;
  uint64_t seed = 0;

  // Throws kInvalidArgument.
  void Validate() const;
};

// Draws from std::mt19937_64, whose output sequence is fixed by the C++
// standard, through an explicit rejection sampler (the standard
// distributions are implementation-defined). The same seed therefore
// produces the same choices on every platform.
class PortableRng {
 public:
  explicit PortableRng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n). n must be positive.
  uint64_t UniformBelow(uint64_t n);

 private:
  std::mt19937_64 engine_;
};

struct ReductionStats {
  int edges_before = 0;
  int edges_after = 0;
  int removed_by_sampling = 0;
  std::vector<DigraphPath> protected_paths;
};

// Per unprotected layer (ascending), removes floor(fraction x removable)
// edges chosen uniformly among those on no protected path, then prunes dead
// ends. Protected paths always survive.
CutsetDigraph ReduceEdges(const CutsetDigraph& digraph,
                          const ReductionConfig& config,
                          ReductionStats* stats = nullptr);

}  // namespace asmline

#endif  // ASMLINE_GRAPH_REDUCTION_H_
