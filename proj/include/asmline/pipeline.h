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

#ifndef ASMLINE_PIPELINE_H_
#define ASMLINE_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asmline/assembly_model.h"
#include "asmline/constraints.h"
#include "asmline/cutset_digraph.h"
#include "asmline/error.h"
#include "asmline/graph_reduction.h"
#include "asmline/line_balancer.h"
#include "asmline/mesh.h"

namespace asmline {

struct RunConfig {
  std::string assembly;     // assembly document
  std::string mesh_dir;     // <part id>.stl per part; optional
  std::string constraints;  // constraint document; optional
  std::string frames;       // joint frames for mesh preprocessing; optional
  bool collision_check = false;
  WeightConfig weights;
  double lambda = 0.5;
  int phases = 1;
  double gap = 0.0;
  // Equal-contribution factor when unset.
  std::optional<double> c;
  ReductionConfig reduction;
  std::string output_dir = "asmline_out";
  double time_limit_s = 0.0;
  uint64_t max_edges = 5'000'000;
  bool export_lp = false;

  // Throws Error(kConfig). With `check_files`, referenced paths must exist.
  void Validate(bool check_files = true) const;
};

// Unknown keys are rejected. Relative paths are resolved against
// `base_dir` when it is non-empty.
RunConfig ParseRunConfig(std::string_view document,
                         const std::string& base_dir = "");
RunConfig LoadRunConfig(const std::string& path);
// Every field, defaults included.
std::string RunConfigToJson(const RunConfig& config);

// 64-bit FNV-1a, as 16 hex digits.
std::string Fnv1aHex(std::string_view bytes);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

// Identity rotation at the centre of the overlap of the two parts'
// bounding boxes.
JointFrame DefaultJointFrame(const std::string& joint_id, const TriangleMesh& a,
                             const TriangleMesh& b);

// Frames document: {"frames": {<joint id>: {"origin": [...],
// "rotation": [[...], [...], [...]]}}}.
std::map<std::string, JointFrame> ParseFrames(std::string_view document);

// Relational matrix over the graph's parts and a DoF matrix for each
// endpoint of each joint, moving against the other endpoint in the joint's
// frame. `meshes` are indexed like graph.parts(); joints without an entry
// in `frames` get DefaultJointFrame().
GeometryConstraints PreprocessMeshes(
    const PartGraph& graph, const std::vector<TriangleMesh>& meshes,
    const std::map<std::string, JointFrame>& frames = {});

// Reads <dir>/<part id>.stl for every part.
std::vector<TriangleMesh> LoadPartMeshes(const PartGraph& graph,
                                         const std::string& dir);

// Failure inside a pipeline stage; what() is prefixed with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()),
        stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunResult {
  PartGraph graph;
  CutsetDigraph digraph;
  CutsetDigraph reduced;
  Solution solution;
  double c = 1.0;
  std::string manifest;  // manifest.json contents
};

// preprocess -> plan -> reduce -> balance -> report, writing every artifact
// to config.output_dir as it is produced. Throws Error(kConfig) before any
// stage runs, StageError afterwards; the manifest then names the failed
// stage and earlier artifacts stay on disk.
RunResult RunPipeline(const RunConfig& config);

struct SweepSpec {
  std::vector<double> lambdas = {0.5};
  std::vector<WeightConfig> weights = {WeightConfig{}};
  std::vector<double> fractions = {0.0};
  std::vector<double> gaps = {0.0};
  std::vector<uint64_t> seeds = {0};
  // Replication r of a cell runs with seed + r.
  int replications = 5;
  int threads = 1;

  // Throws Error(kConfig).
  void Validate() const;
};

SweepSpec ParseSweepSpec(std::string_view document);

struct SweepRow {
  int cell = 0;
  int replication = 0;
  double lambda = 0.0;
  WeightConfig weights;
  double fraction = 0.0;
  double gap = 0.0;
  uint64_t seed = 0;
  int edges_before = 0;
  int edges_after = 0;
  double solve_seconds = 0.0;
  double objective = 0.0;
  double alpha = 0.0;
  double engineering_cost = 0.0;
  int technology_changes = 0;
  bool proven = false;
  double speedup = 0.0;
  std::string error;  // empty on success
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string rows_csv;     // one line per (cell, replication)
  std::string summary_csv;  // mean and standard deviation per cell
};

// Base settings (assembly, constraints, phases, c, limits) come from
// `config`; grid values override them per cell. Speedup is measured against
// the smallest-fraction cell with otherwise equal settings and replication.
SweepResult SweepExperiment(const SweepSpec& spec, const RunConfig& config);

}  // namespace asmline

#endif  // ASMLINE_PIPELINE_H_
