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

#ifndef ASMLINE_REPORT_H_
#define ASMLINE_REPORT_H_

#include <string>
#include <vector>

#include "asmline/assembly_model.h"
#include "asmline/cutset_digraph.h"
#include "asmline/line_balancer.h"

namespace asmline {

// Graphviz renderings. Part nodes carry mass and handling, joint edges
// carry time, tolerance and technology; digraph nodes are labelled with
// their cutset and edges with operation id and weight.
std::string ExportDot(const PartGraph& graph);
std::string ExportDot(const CutsetDigraph& digraph);

// Per-solution figures shared by the CSV report and the sweep table.
struct ReportSummary {
  std::vector<double> phase_loads;
  double alpha = 0.0;
  double total_time = 0.0;
  int technology_changes = 0;
  // Running sums of the normalized per-operation attributes, sequence order.
  std::vector<double> cumulative_handling;
  std::vector<double> cumulative_tolerance;
};

ReportSummary Summarize(const Solution& solution, const CutsetDigraph& digraph,
                        const PartGraph& graph, int phases);

// CSV: one row per operation in sequence order, a blank line, then a
// `key,value` summary block.
std::string ExportReport(const Solution& solution, const BalanceProblem& problem,
                         const PartGraph& graph);

}  // namespace asmline

#endif  // ASMLINE_REPORT_H_
