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

#ifndef ASMLINE_LINE_BALANCER_H_
#define ASMLINE_LINE_BALANCER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asmline/assembly_model.h"
#include "asmline/cutset_digraph.h"

namespace asmline {

// Joint sequence selection plus assignment of digraph layers to P
// contiguous phases (stations), minimizing
//   (1 - lambda) * sum of path weights + lambda * c * alpha
// where alpha is the largest phase load.
struct BalanceProblem {
  const CutsetDigraph* digraph = nullptr;
  int phases = 1;
  double lambda = 0.5;
  double c = 1.0;
  double gap = 0.0;
  // Wall-clock limit in seconds; <= 0 disables it.
  double time_limit_s = 0.0;

  // Throws kInvalidArgument, or kPlanningInfeasible for a digraph without a
  // full path.
  void Validate() const;
};

struct Solution {
  std::vector<int> path;         // edge indices, layer order
  std::vector<int> ops;          // operation (joint) indices, sequence order
  std::vector<int> layer_phase;  // phase of edge layer l at index l - 1
  std::vector<int> op_phase;     // phase of each operation index
  std::vector<double> phase_loads;
  double alpha = 0.0;
  double engineering_cost = 0.0;  // sum of path weights
  double objective = 0.0;
  double bound = 0.0;             // proven lower bound on the optimum
  bool proven = false;            // gap target met before the time limit
  double wall_seconds = 0.0;
  int64_t states_explored = 0;

  double RelativeGap() const;
};

// (1 - lambda) * weight + lambda * c * alpha.
double ComposeObjective(double weight, double alpha, double lambda, double c);

// W_ref / alpha_ref with W_ref the shortest full-path weight and
// alpha_ref = (sum of operation times) / P; 1 when W_ref is 0.
double EqualContributionFactor(const CutsetDigraph& digraph, int phases);

// Best-first branch and bound over (node, phase, phase load, closed max,
// weight) labels with dominance pruning, stopping once the relative gap is
// met. With gap 0 the lexicographically smallest operation sequence (then
// phase sequence) among optima within 1e-9 is returned.
Solution SolveBalance(const BalanceProblem& problem);

// Exhaustive enumeration of all full paths and contiguous phase splits;
// same tie-breaking as SolveBalance. Throws kInstanceTooLarge when the
// digraph has more than `max_layers` operations.
Solution BruteForceBalance(const BalanceProblem& problem, int max_layers = 8);

struct PhaseLoadSummary {
  std::vector<double> loads;
  double alpha = 0.0;
};

PhaseLoadSummary PhaseLoads(const Solution& solution,
                            std::span<const double> op_times, int phases);

// Positions where consecutive operations differ in `attr` (indexed by
// operation).
int CountAttributeChanges(const Solution& solution,
                          std::span<const std::string> attr);

// Running sums of `attr` (indexed by operation) along the sequence.
std::vector<double> CumulativeAttribute(const Solution& solution,
                                        std::span<const double> attr);

// Running sums of values already in sequence order.
std::vector<double> PartialSums(std::span<const double> values);

// LP-format model (x_e, y_l_p, z_o_p, alpha) for third-party solvers.
std::string ExportLp(const BalanceProblem& problem);

// Structured solution document. `graph` supplies technology and tolerance
// labels; it may be null.
std::string SerializeSolution(const Solution& solution,
                              const BalanceProblem& problem,
                              const PartGraph* graph);

// Rebuilds a solution written by SerializeSolution() against the digraph of
// `problem`. Throws kMalformedDocument when the operations do not form a
// start-to-end path or the phases are not a valid split.
Solution DeserializeSolution(std::string_view document,
                             const BalanceProblem& problem);

}  // namespace asmline

#endif  // ASMLINE_LINE_BALANCER_H_
