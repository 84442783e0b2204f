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

// asmline: assembly sequence planning and line balancing.
//
//   asmline run --config run.json
//   asmline sweep --config run.json --spec sweep.json
//   asmline plan --assembly parts.json -o digraph.json
//
// Exit status: 0 ok, 2 configuration, 3 infeasible, 4 time limit, 1 other.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "asmline/assembly_model.h"
#include "asmline/cutset_digraph.h"
#include "asmline/error.h"
#include "asmline/graph_reduction.h"
#include "asmline/line_balancer.h"
#include "asmline/pipeline.h"
#include "asmline/report.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using namespace asmline;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTimeout = 4;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
      return kExitConfig;
    case ErrorCode::kPlanningInfeasible:
      return kExitInfeasible;
    case ErrorCode::kTimeout:
      return kExitTimeout;
    default:
      return kExitOther;
  }
}

std::string EnvOr(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

// Explicit -o wins, then ASMLINE_OUTPUT_DIR, then the working directory.
std::string OutputPath(const std::string& explicit_path,
                       const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  const fs::path dir = EnvOr("ASMLINE_OUTPUT_DIR", ".");
  fs::create_directories(dir);
  return (dir / default_name).string();
}

WeightConfig ParseMu(const std::vector<double>& mu) {
  WeightConfig w;
  if (mu.empty()) return w;
  if (mu.size() != 3) throw Error(ErrorCode::kConfig, "--mu takes three values");
  w.technology = mu[0];
  w.handling = mu[1];
  w.tolerance = mu[2];
  w.Validate();
  return w;
}

struct Options {
  std::string config, spec, assembly, mesh_dir, frames, constraints, digraph,
      solution, out, dot, lp, output_dir;
  std::vector<double> mu;
  bool collision_check = false;
  std::optional<double> lambda, gap, c, fraction, time_limit;
  std::optional<int> phases, k_paths, protect;
  std::optional<uint64_t> seed;
  uint64_t max_edges = 5'000'000;
};

int Preprocess(const Options& o) {
  const PartGraph graph = LoadPartGraph(ReadFile(o.assembly));
  std::map<std::string, JointFrame> frames;
  if (!o.frames.empty()) frames = ParseFrames(ReadFile(o.frames));
  const GeometryConstraints geo =
      PreprocessMeshes(graph, LoadPartMeshes(graph, o.mesh_dir), frames);
  WriteFile(OutputPath(o.out, "constraints.json"), ExportGeometryConstraints(geo));
  return kExitOk;
}

int Plan(const Options& o) {
  const PartGraph graph = LoadPartGraph(ReadFile(o.assembly));
  DigraphOptions options;
  std::optional<GeometryConstraints> geo;
  if (o.collision_check) {
    if (o.constraints.empty()) {
      throw Error(ErrorCode::kConfig, "--collision-check needs --constraints");
    }
    geo = ImportGeometryConstraints(ReadFile(o.constraints));
    options.geometry = &*geo;
  }
  options.max_edges = o.max_edges;
  const CutsetDigraph d =
      GenerateDigraph(graph, NormalizeAttributes(graph), ParseMu(o.mu), options);
  WriteFile(OutputPath(o.out, "digraph.json"), SerializeDigraph(d));
  if (!o.dot.empty()) WriteFile(o.dot, ExportDot(d));
  std::cout << "nodes " << d.num_nodes() << " edges " << d.num_edges()
            << " bound " << MaxEdgeBound(graph.num_joints()) << "\n";
  return kExitOk;
}

int Reduce(const Options& o) {
  const CutsetDigraph d = DeserializeDigraph(ReadFile(o.digraph));
  ReductionConfig rc;
  rc.fraction = o.fraction.value_or(rc.fraction);
  rc.k_paths = o.k_paths.value_or(rc.k_paths);
  rc.protected_outer_layers = o.protect.value_or(rc.protected_outer_layers);
  rc.seed = o.seed.value_or(rc.seed);
  ReductionStats stats;
  const CutsetDigraph r = ReduceEdges(d, rc, &stats);
  WriteFile(OutputPath(o.out, "reduced.json"), SerializeDigraph(r));
  std::cout << "edges " << stats.edges_before << " -> " << stats.edges_after
            << "\n";
  return kExitOk;
}

int Balance(const Options& o) {
  const CutsetDigraph d = DeserializeDigraph(ReadFile(o.digraph));
  std::optional<PartGraph> graph;
  if (!o.assembly.empty()) graph = LoadPartGraph(ReadFile(o.assembly));
  BalanceProblem p;
  p.digraph = &d;
  p.phases = o.phases.value_or(1);
  p.lambda = o.lambda.value_or(p.lambda);
  p.gap = o.gap.value_or(p.gap);
  p.time_limit_s = o.time_limit.value_or(0.0);
  p.c = o.c ? *o.c : EqualContributionFactor(d, p.phases);
  const Solution s = SolveBalance(p);
  WriteFile(OutputPath(o.out, "solution.json"),
            SerializeSolution(s, p, graph ? &*graph : nullptr));
  if (!o.lp.empty()) WriteFile(o.lp, ExportLp(p));
  std::cout << "objective " << s.objective << " alpha " << s.alpha << " gap "
            << s.RelativeGap() << (s.proven ? "" : " (time limit)") << "\n";
  return s.proven ? kExitOk : kExitTimeout;
}

int Report(const Options& o) {
  const PartGraph graph = LoadPartGraph(ReadFile(o.assembly));
  const CutsetDigraph d = DeserializeDigraph(ReadFile(o.digraph));
  const std::string doc = ReadFile(o.solution);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(doc);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, e.what());
  }
  BalanceProblem p;
  p.digraph = &d;
  p.phases = o.phases.value_or(meta.value("phases", 1));
  p.lambda = o.lambda.value_or(meta.value("lambda", p.lambda));
  p.c = o.c.value_or(meta.value("c", p.c));
  const Solution s = DeserializeSolution(doc, p);
  WriteFile(OutputPath(o.out, "report.csv"), ExportReport(s, p, graph));
  return kExitOk;
}

RunConfig ConfigWithOverrides(const Options& o) {
  RunConfig cfg = LoadRunConfig(o.config);
  cfg.output_dir = EnvOr("ASMLINE_OUTPUT_DIR", cfg.output_dir);
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (!o.mu.empty()) cfg.weights = ParseMu(o.mu);
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.phases) cfg.phases = *o.phases;
  if (o.gap) cfg.gap = *o.gap;
  if (o.c) cfg.c = *o.c;
  if (o.fraction) cfg.reduction.fraction = *o.fraction;
  if (o.k_paths) cfg.reduction.k_paths = *o.k_paths;
  if (o.protect) cfg.reduction.protected_outer_layers = *o.protect;
  if (o.seed) cfg.reduction.seed = *o.seed;
  if (o.time_limit) cfg.time_limit_s = *o.time_limit;
  return cfg;
}

int Run(const Options& o) {
  const RunResult r = RunPipeline(ConfigWithOverrides(o));
  std::cout << "objective " << r.solution.objective << " alpha "
            << r.solution.alpha << " edges " << r.digraph.num_edges() << " -> "
            << r.reduced.num_edges() << "\n";
  return r.solution.proven ? kExitOk : kExitTimeout;
}

int Sweep(const Options& o) {
  const RunConfig cfg = ConfigWithOverrides(o);
  SweepSpec spec = ParseSweepSpec(ReadFile(o.spec));
  const std::string threads = EnvOr("ASMLINE_THREADS", "");
  if (!threads.empty()) {
    try {
      spec.threads = std::stoi(threads);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "ASMLINE_THREADS must be an integer");
    }
  }
  const SweepResult result = SweepExperiment(spec, cfg);
  fs::create_directories(cfg.output_dir);
  WriteFile((fs::path(cfg.output_dir) / "rows.csv").string(), result.rows_csv);
  WriteFile((fs::path(cfg.output_dir) / "summary.csv").string(),
            result.summary_csv);
  int failed = 0;
  for (const SweepRow& row : result.rows) failed += !row.error.empty();
  std::cout << result.rows.size() << " rows, " << failed << " failed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assembly sequence planning and line balancing"};
  app.require_subcommand(1);
  Options o;

  auto add_balance_flags = [&](CLI::App* cmd) {
    cmd->add_option("--phases", o.phases, "number of phases P");
    cmd->add_option("--lambda", o.lambda, "engineering/time trade-off in [0,1]");
    cmd->add_option("--gap", o.gap, "relative optimality gap");
    cmd->add_option("--c", o.c, "scaling factor (default: equal contribution)");
    cmd->add_option("--time-limit", o.time_limit, "seconds, 0 = none");
  };
  auto add_reduce_flags = [&](CLI::App* cmd) {
    cmd->add_option("--fraction", o.fraction, "share of removable edges to drop");
    cmd->add_option("--k-paths", o.k_paths, "protected shortest paths");
    cmd->add_option("--protect", o.protect, "untouched outer layers");
    cmd->add_option("--seed", o.seed, "sampling seed");
  };

  CLI::App* pre = app.add_subcommand("preprocess", "meshes -> constraint document");
  pre->add_option("--assembly", o.assembly)->required()->check(CLI::ExistingFile);
  pre->add_option("--mesh-dir", o.mesh_dir)->required()->check(CLI::ExistingDirectory);
  pre->add_option("--frames", o.frames)->check(CLI::ExistingFile);
  pre->add_option("-o,--out", o.out);

  CLI::App* plan = app.add_subcommand("plan", "assembly -> cutset digraph");
  plan->add_option("--assembly", o.assembly)->required()->check(CLI::ExistingFile);
  plan->add_option("--constraints", o.constraints)->check(CLI::ExistingFile);
  plan->add_flag("--collision-check", o.collision_check);
  plan->add_option("--mu", o.mu, "technology handling tolerance weights")->expected(3);
  plan->add_option("--max-edges", o.max_edges);
  plan->add_option("-o,--out", o.out);
  plan->add_option("--dot", o.dot);

  CLI::App* reduce = app.add_subcommand("reduce", "edge reduction");
  reduce->add_option("--digraph", o.digraph)->required()->check(CLI::ExistingFile);
  add_reduce_flags(reduce);
  reduce->add_option("-o,--out", o.out);

  CLI::App* balance = app.add_subcommand("balance", "sequence and balance");
  balance->add_option("--digraph", o.digraph)->required()->check(CLI::ExistingFile);
  balance->add_option("--assembly", o.assembly)->check(CLI::ExistingFile);
  add_balance_flags(balance);
  balance->add_option("-o,--out", o.out);
  balance->add_option("--lp", o.lp, "also write the MIP in LP format");

  CLI::App* report = app.add_subcommand("report", "solution -> CSV report");
  report->add_option("--assembly", o.assembly)->required()->check(CLI::ExistingFile);
  report->add_option("--digraph", o.digraph)->required()->check(CLI::ExistingFile);
  report->add_option("--solution", o.solution)->required()->check(CLI::ExistingFile);
  report->add_option("--phases", o.phases);
  report->add_option("-o,--out", o.out);

  CLI::App* run = app.add_subcommand("run", "full pipeline");
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
  for (CLI::App* cmd : {run, sweep}) {
    cmd->add_option("--config", o.config)->required()->check(CLI::ExistingFile);
    cmd->add_option("--output-dir", o.output_dir);
    cmd->add_option("--mu", o.mu)->expected(3);
    add_balance_flags(cmd);
    add_reduce_flags(cmd);
  }
  sweep->add_option("--spec", o.spec)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*pre) return Preprocess(o);
    if (*plan) return Plan(o);
    if (*reduce) return Reduce(o);
    if (*balance) return Balance(o);
    if (*report) return Report(o);
    if (*run) return Run(o);
    if (*sweep) return Sweep(o);
  } catch (const StageError& e) {
    std::cerr << "error [" << e.stage() << ", " << ErrorCodeName(e.code())
              << "]: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
