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

#include "asmline/report.h"

#include <cstdio>
#include <sstream>

namespace asmline {

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// DOT double-quoted string body.
std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> OpTechnologies(const CutsetDigraph& d,
                                        const PartGraph& graph) {
  std::vector<std::string> tech(d.num_ops());
  for (int o = 0; o < d.num_ops(); ++o) {
    if (const auto j = graph.JointIndex(d.op_ids()[o])) {
      tech[o] = graph.joints()[*j].technology;
    }
  }
  return tech;
}

}  // namespace

std::string ExportDot(const PartGraph& graph) {
  std::ostringstream out;
  out << "graph parts {\n  node [shape=box];\n";
  for (const Part& p : graph.parts()) {
    out << "  " << Quote(p.id) << " [label="
        << Quote(p.id + "\\nmass=" + Fixed(p.mass_kg, 3) +
                 "\\nhandling=" + std::to_string(p.handling))
        << "];\n";
  }
  for (const Joint& j : graph.joints()) {
    out << "  " << Quote(j.part_a) << " -- " << Quote(j.part_b) << " [label="
        << Quote(j.id + "\\ntime=" + Fixed(j.time, 3) +
                 "\\ntol=" + std::to_string(j.tolerance) + "\\n" +
                 j.technology)
        << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string ExportDot(const CutsetDigraph& d) {
  std::ostringstream out;
  out << "digraph cutsets {\n  rankdir=LR;\n";
  for (int v = 0; v < d.num_nodes(); ++v) {
    out << "  n" << v << " [label=" << Quote(CutsetLabel(d, v)) << "];\n";
  }
  for (const DigraphEdge& e : d.edges()) {
    out << "  n" << e.source << " -> n" << e.target << " [label="
        << Quote(d.op_ids()[e.op] + " " + Fixed(e.weight, 6)) << "];\n";
  }
  out << "}\n";
  return out.str();
}

ReportSummary Summarize(const Solution& s, const CutsetDigraph& d,
                        const PartGraph& graph, int phases) {
  ReportSummary r;
  const PhaseLoadSummary loads = PhaseLoads(s, d.op_times(), phases);
  r.phase_loads = loads.loads;
  r.alpha = loads.alpha;
  for (double t : r.phase_loads) r.total_time += t;
  const std::vector<std::string> tech = OpTechnologies(d, graph);
  r.technology_changes = CountAttributeChanges(s, tech);
  std::vector<double> handling, tolerance;
  for (int e : s.path) {
    handling.push_back(d.edge(e).attrs.handling);
    tolerance.push_back(d.edge(e).attrs.tolerance);
  }
  r.cumulative_handling = PartialSums(handling);
  r.cumulative_tolerance = PartialSums(tolerance);
  return r;
}

std::string ExportReport(const Solution& s, const BalanceProblem& problem,
                         const PartGraph& graph) {
  const CutsetDigraph& d = *problem.digraph;
  const ReportSummary r = Summarize(s, d, graph, problem.phases);
  std::ostringstream out;
  out << "position,joint_id,layer,phase,technology,tolerance,time,weight,"
         "handling_norm,tolerance_norm,technology_norm,cumulative_handling,"
         "cumulative_tolerance\n";
  for (size_t i = 0; i < s.path.size(); ++i) {
    const DigraphEdge& e = d.edge(s.path[i]);
    const std::string& id = d.op_ids()[e.op];
    std::string technology;
    int tolerance = 0;
    if (const auto j = graph.JointIndex(id)) {
      technology = graph.joints()[*j].technology;
      tolerance = graph.joints()[*j].tolerance;
    }
    out << i + 1 << ',' << CsvField(id) << ',' << e.layer << ','
        << s.layer_phase[i] << ',' << CsvField(technology) << ',' << tolerance
        << ',' << Fixed(d.op_times()[e.op], 6) << ',' << Fixed(e.weight, 9)
        << ',' << Fixed(e.attrs.handling, 9) << ','
        << Fixed(e.attrs.tolerance, 9) << ',' << Fixed(e.attrs.technology, 9)
        << ',' << Fixed(r.cumulative_handling[i], 9) << ','
        << Fixed(r.cumulative_tolerance[i], 9) << '\n';
  }
  out << "\nkey,value\n";
  for (size_t p = 0; p < r.phase_loads.size(); ++p) {
    out << "phase_load_" << p << ',' << Fixed(r.phase_loads[p], 6) << '\n';
  }
  out << "total_time," << Fixed(r.total_time, 6) << '\n';
  out << "alpha," << Fixed(r.alpha, 6) << '\n';
  out << "engineering_cost," << Fixed(s.engineering_cost, 9) << '\n';
  out << "objective," << Fixed(s.objective, 9) << '\n';
  out << "technology_changes," << r.technology_changes << '\n';
  out << "cumulative_handling_final,"
      << Fixed(r.cumulative_handling.empty() ? 0.0 : r.cumulative_handling.back(), 9)
      << '\n';
  out << "cumulative_tolerance_final,"
      << Fixed(r.cumulative_tolerance.empty() ? 0.0 : r.cumulative_tolerance.back(), 9)
      << '\n';
  return out.str();
}

}  // namespace asmline
