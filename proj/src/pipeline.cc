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

#include "asmline/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "asmline/geometry.h"
#include "asmline/report.h"
#include "json.hpp"

namespace asmline {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

[[noreturn]] void ConfigError(const std::string& message) {
  throw Error(ErrorCode::kConfig, message);
}

void RejectUnknownKeys(const json& obj, const std::set<std::string>& known,
                       const std::string& where) {
  if (!obj.is_object()) ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::string Resolve(const std::string& path, const std::string& base) {
  if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

WeightConfig ParseWeights(const json& w, const std::string& where) {
  WeightConfig out;
  if (w.is_array()) {
    if (w.size() != 3) ConfigError(where + " must have three entries");
    out.technology = w[0].get<double>();
    out.handling = w[1].get<double>();
    out.tolerance = w[2].get<double>();
    return out;
  }
  RejectUnknownKeys(w, {"technology", "handling", "tolerance"}, where);
  out.technology = w.value("technology", out.technology);
  out.handling = w.value("handling", out.handling);
  out.tolerance = w.value("tolerance", out.tolerance);
  return out;
}

json WeightsJson(const WeightConfig& w) {
  return {{"technology", w.technology},
          {"handling", w.handling},
          {"tolerance", w.tolerance}};
}

// Re-raises library validation failures as configuration errors.
template <typename F>
void AsConfigError(const std::string& where, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    ConfigError(where + ": " + e.what());
  }
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double Elapsed(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

}  // namespace

void RunConfig::Validate(bool check_files) const {
  if (assembly.empty()) ConfigError("assembly path is required");
  AsConfigError("weights", [&] { weights.Validate(); });
  AsConfigError("reduction", [&] { reduction.Validate(); });
  if (!(lambda >= 0.0 && lambda <= 1.0)) ConfigError("lambda must be in [0, 1]");
  if (phases < 1) ConfigError("phases must be >= 1");
  if (!(gap >= 0.0 && gap < 1.0)) ConfigError("gap must be in [0, 1)");
  if (c && !(*c > 0.0 && std::isfinite(*c))) ConfigError("c must be positive");
  if (!(time_limit_s >= 0.0)) ConfigError("time_limit_s must be >= 0");
  if (max_edges == 0) ConfigError("max_edges must be positive");
  if (output_dir.empty()) ConfigError("output_dir is required");
  if (collision_check && mesh_dir.empty() && constraints.empty()) {
    ConfigError("collision_check needs mesh_dir or constraints");
  }
  if (!check_files) return;
  if (!fs::is_regular_file(assembly)) {
    ConfigError("assembly document not found: " + assembly);
  }
  if (!mesh_dir.empty() && !fs::is_directory(mesh_dir)) {
    ConfigError("mesh directory not found: " + mesh_dir);
  }
  if (!constraints.empty() && !fs::is_regular_file(constraints)) {
    ConfigError("constraint document not found: " + constraints);
  }
  if (!frames.empty() && !fs::is_regular_file(frames)) {
    ConfigError("frames document not found: " + frames);
  }
}

RunConfig ParseRunConfig(std::string_view document, const std::string& base_dir) {
  RunConfig cfg;
  try {
    const json doc = json::parse(document);
    RejectUnknownKeys(doc,
                      {"assembly", "mesh_dir", "constraints", "frames",
                       "collision_check", "weights", "lambda", "phases", "gap",
                       "c", "reduction", "output_dir", "time_limit_s",
                       "max_edges", "export_lp"},
                      "config");
    cfg.assembly = Resolve(doc.value("assembly", ""), base_dir);
    cfg.mesh_dir = Resolve(doc.value("mesh_dir", ""), base_dir);
    cfg.constraints = Resolve(doc.value("constraints", ""), base_dir);
    cfg.frames = Resolve(doc.value("frames", ""), base_dir);
    cfg.collision_check = doc.value("collision_check", cfg.collision_check);
    if (doc.contains("weights")) cfg.weights = ParseWeights(doc["weights"], "weights");
    cfg.lambda = doc.value("lambda", cfg.lambda);
    cfg.phases = doc.value("phases", cfg.phases);
    cfg.gap = doc.value("gap", cfg.gap);
    if (doc.contains("c") && !doc["c"].is_null()) cfg.c = doc["c"].get<double>();
    if (doc.contains("reduction")) {
      const json& r = doc["reduction"];
      RejectUnknownKeys(r, {"fraction", "k_paths", "protected_outer_layers", "seed"},
                        "reduction");
      cfg.reduction.fraction = r.value("fraction", cfg.reduction.fraction);
      cfg.reduction.k_paths = r.value("k_paths", cfg.reduction.k_paths);
      cfg.reduction.protected_outer_layers =
          r.value("protected_outer_layers", cfg.reduction.protected_outer_layers);
      cfg.reduction.seed = r.value("seed", cfg.reduction.seed);
    }
    cfg.output_dir = Resolve(doc.value("output_dir", cfg.output_dir), base_dir);
    cfg.time_limit_s = doc.value("time_limit_s", cfg.time_limit_s);
    cfg.max_edges = doc.value("max_edges", cfg.max_edges);
    cfg.export_lp = doc.value("export_lp", cfg.export_lp);
  } catch (const json::exception& e) {
    ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    ConfigError(e.what());
  }
  return ParseRunConfig(text, fs::path(path).parent_path().string());
}

std::string RunConfigToJson(const RunConfig& cfg) {
  json doc = {
      {"assembly", cfg.assembly},
      {"mesh_dir", cfg.mesh_dir},
      {"constraints", cfg.constraints},
      {"frames", cfg.frames},
      {"collision_check", cfg.collision_check},
      {"weights", WeightsJson(cfg.weights)},
      {"lambda", cfg.lambda},
      {"phases", cfg.phases},
      {"gap", cfg.gap},
      {"c", cfg.c ? json(*cfg.c) : json(nullptr)},
      {"reduction",
       {{"fraction", cfg.reduction.fraction},
        {"k_paths", cfg.reduction.k_paths},
        {"protected_outer_layers", cfg.reduction.protected_outer_layers},
        {"seed", cfg.reduction.seed}}},
      {"output_dir", cfg.output_dir},
      {"time_limit_s", cfg.time_limit_s},
      {"max_edges", cfg.max_edges},
      {"export_lp", cfg.export_lp}};
  return doc.dump(2) + "\n";
}

std::string Fnv1aHex(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

JointFrame DefaultJointFrame(const std::string& joint_id, const TriangleMesh& a,
                             const TriangleMesh& b) {
  const Eigen::AlignedBox3d ba = a.Bounds();
  const Eigen::AlignedBox3d bb = b.Bounds();
  const Eigen::Vector3d lo = ba.min().cwiseMax(bb.min());
  const Eigen::Vector3d hi = ba.max().cwiseMin(bb.max());
  JointFrame f;
  f.joint_id = joint_id;
  f.origin = 0.5 * (lo + hi);
  return f;
}

std::map<std::string, JointFrame> ParseFrames(std::string_view document) {
  std::map<std::string, JointFrame> frames;
  try {
    const json doc = json::parse(document);
    for (const auto& [id, f] : doc.at("frames").items()) {
      JointFrame frame;
      frame.joint_id = f.value("joint_id", id);
      const auto o = f.at("origin").get<std::array<double, 3>>();
      frame.origin = Eigen::Vector3d(o[0], o[1], o[2]);
      if (f.contains("rotation")) {
        const auto r = f["rotation"].get<std::array<std::array<double, 3>, 3>>();
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) frame.rotation(i, j) = r[i][j];
        }
      }
      CheckFrame(frame);
      frames.emplace(id, frame);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("frames: ") + e.what());
  }
  return frames;
}

GeometryConstraints PreprocessMeshes(
    const PartGraph& graph, const std::vector<TriangleMesh>& meshes,
    const std::map<std::string, JointFrame>& frames) {
  if (meshes.size() != static_cast<size_t>(graph.num_parts())) {
    throw Error(ErrorCode::kInvalidArgument, "need one mesh per part");
  }
  GeometryConstraints out;
  out.relations = BuildRelationalMatrix(meshes);
  for (int j = 0; j < graph.num_joints(); ++j) {
    const Joint& joint = graph.joints()[j];
    const TriangleMesh& a = meshes[graph.EndpointA(j)];
    const TriangleMesh& b = meshes[graph.EndpointB(j)];
    const auto it = frames.find(joint.id);
    JointFrame frame =
        it != frames.end() ? it->second : DefaultJointFrame(joint.id, a, b);
    frame.joint_id = joint.id;
    out.frames[joint.id] = frame;
    out.dofs.push_back(ExtractDofMatrix(a, b, frame, DefaultProbes(a)));
    out.dofs.push_back(ExtractDofMatrix(b, a, frame, DefaultProbes(b)));
  }
  return out;
}

std::vector<TriangleMesh> LoadPartMeshes(const PartGraph& graph,
                                         const std::string& dir) {
  std::vector<TriangleMesh> meshes;
  for (const Part& p : graph.parts()) {
    const std::string path = (fs::path(dir) / (p.id + ".stl")).string();
    meshes.push_back(ParseStl(ReadFile(path), p.id).mesh);
  }
  return meshes;
}

RunResult RunPipeline(const RunConfig& config) {
  config.Validate(true);
  const fs::path out_dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " +
                                    ec.message());
  }

  RunResult result;
  const std::string config_doc = RunConfigToJson(config);
  json manifest = {{"config", json::parse(config_doc)},
                   {"config_hash", Fnv1aHex(config_doc)},
                   {"seed", config.reduction.seed},
                   {"status", "running"},
                   {"stages", json::array()},
                   {"artifacts", json::object()},
                   {"sizes", json::object()}};
  auto write_manifest = [&] {
    result.manifest = manifest.dump(2) + "\n";
    WriteFile((out_dir / "manifest.json").string(), result.manifest);
  };
  auto emit = [&](json& stage, const std::string& name, const std::string& body) {
    WriteFile((out_dir / name).string(), body);
    stage["artifacts"].push_back(name);
    manifest["artifacts"][name] = Fnv1aHex(body);
  };
  std::string last_hash;
  auto run_stage = [&](const std::string& name,
                       const std::function<std::string(json&)>& body) {
    json stage = {{"name", name},
                  {"input_hash", last_hash},
                  {"artifacts", json::array()}};
    const auto started = Clock::now();
    try {
      last_hash = body(stage);
    } catch (const Error& e) {
      stage["error"] = e.what();
      stage["wall_time_s"] = Elapsed(started);
      manifest["stages"].push_back(stage);
      manifest["status"] = "failed";
      manifest["failed_stage"] = name;
      write_manifest();
      throw StageError(name, e);
    } catch (const std::exception& e) {
      const Error wrapped(ErrorCode::kIo, e.what());
      stage["error"] = e.what();
      manifest["stages"].push_back(stage);
      manifest["status"] = "failed";
      manifest["failed_stage"] = name;
      write_manifest();
      throw StageError(name, wrapped);
    }
    stage["output_hash"] = last_hash;
    stage["wall_time_s"] = Elapsed(started);
    manifest["stages"].push_back(stage);
  };

  {
    json stage = {{"name", "config"}, {"artifacts", json::array()}};
    emit(stage, "config.json", config_doc);
    last_hash = Fnv1aHex(config_doc);
  }

  std::string graph_doc;
  run_stage("load", [&](json& stage) {
    stage["input_hash"] = Fnv1aHex(ReadFile(config.assembly));
    result.graph = LoadPartGraph(ReadFile(config.assembly));
    graph_doc = SerializePartGraph(result.graph);
    emit(stage, "assembly.json", graph_doc);
    emit(stage, "parts.dot", ExportDot(result.graph));
    manifest["sizes"]["parts"] = result.graph.num_parts();
    manifest["sizes"]["joints"] = result.graph.num_joints();
    return Fnv1aHex(graph_doc);
  });

  std::optional<GeometryConstraints> geometry;
  run_stage("preprocess", [&](json& stage) {
    std::string doc;
    if (!config.mesh_dir.empty()) {
      std::map<std::string, JointFrame> frames;
      if (!config.frames.empty()) frames = ParseFrames(ReadFile(config.frames));
      geometry = PreprocessMeshes(
          result.graph, LoadPartMeshes(result.graph, config.mesh_dir), frames);
      doc = ExportGeometryConstraints(*geometry);
    } else if (!config.constraints.empty()) {
      geometry = ImportGeometryConstraints(ReadFile(config.constraints));
      doc = ExportGeometryConstraints(*geometry);
    } else {
      return last_hash;
    }
    emit(stage, "constraints.json", doc);
    return Fnv1aHex(graph_doc + doc);
  });

  run_stage("plan", [&](json& stage) {
    DigraphOptions options;
    if (config.collision_check) options.geometry = &*geometry;
    options.max_edges = config.max_edges;
    result.digraph = GenerateDigraph(result.graph,
                                     NormalizeAttributes(result.graph),
                                     config.weights, options);
    const std::string doc = SerializeDigraph(result.digraph);
    emit(stage, "digraph.json", doc);
    emit(stage, "digraph.dot", ExportDot(result.digraph));
    manifest["sizes"]["digraph_nodes"] = result.digraph.num_nodes();
    manifest["sizes"]["digraph_edges"] = result.digraph.num_edges();
    manifest["sizes"]["max_edge_bound"] =
        MaxEdgeBound(result.graph.num_joints()).str();
    return Fnv1aHex(doc);
  });

  run_stage("reduce", [&](json& stage) {
    ReductionStats stats;
    result.reduced = ReduceEdges(result.digraph, config.reduction, &stats);
    const std::string doc = SerializeDigraph(result.reduced);
    emit(stage, "reduced.json", doc);
    manifest["sizes"]["reduced_nodes"] = result.reduced.num_nodes();
    manifest["sizes"]["reduced_edges"] = result.reduced.num_edges();
    manifest["sizes"]["removed_by_sampling"] = stats.removed_by_sampling;
    return Fnv1aHex(doc);
  });

  BalanceProblem problem;
  run_stage("balance", [&](json& stage) {
    // c comes from the full digraph so reduced and full runs are comparable.
    result.c = config.c ? *config.c
                        : EqualContributionFactor(result.digraph, config.phases);
    problem.digraph = &result.reduced;
    problem.phases = config.phases;
    problem.lambda = config.lambda;
    problem.c = result.c;
    problem.gap = config.gap;
    problem.time_limit_s = config.time_limit_s;
    result.solution = SolveBalance(problem);
    emit(stage, "solution.json",
         SerializeSolution(result.solution, problem, &result.graph));
    if (config.export_lp) emit(stage, "model.lp", ExportLp(problem));
    Solution untimed = result.solution;
    untimed.wall_seconds = 0.0;
    manifest["solution"] = {{"objective", result.solution.objective},
                            {"alpha", result.solution.alpha},
                            {"engineering_cost", result.solution.engineering_cost},
                            {"bound", result.solution.bound},
                            {"gap", result.solution.RelativeGap()},
                            {"proven", result.solution.proven},
                            {"c", result.c}};
    return Fnv1aHex(SerializeSolution(untimed, problem, &result.graph));
  });

  run_stage("report", [&](json& stage) {
    const std::string csv = ExportReport(result.solution, problem, result.graph);
    emit(stage, "report.csv", csv);
    return Fnv1aHex(csv);
  });

  manifest["status"] = result.solution.proven ? "ok" : "timeout";
  write_manifest();
  return result;
}

void SweepSpec::Validate() const {
  if (lambdas.empty() || weights.empty() || fractions.empty() || gaps.empty() ||
      seeds.empty()) {
    ConfigError("sweep grids must be non-empty");
  }
  if (replications < 1) ConfigError("replications must be >= 1");
  if (threads < 1) ConfigError("threads must be >= 1");
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) ConfigError("sweep lambda must be in [0, 1]");
  }
  for (const WeightConfig& w : weights) AsConfigError("sweep weights", [&] { w.Validate(); });
  for (double f : fractions) {
    if (!(f >= 0.0 && f < 1.0)) ConfigError("sweep fraction must be in [0, 1)");
  }
  for (double g : gaps) {
    if (!(g >= 0.0 && g < 1.0)) ConfigError("sweep gap must be in [0, 1)");
  }
}

SweepSpec ParseSweepSpec(std::string_view document) {
  SweepSpec spec;
  try {
    const json doc = json::parse(document);
    RejectUnknownKeys(doc,
                      {"lambdas", "weights", "fractions", "gaps", "seeds",
                       "replications", "threads"},
                      "sweep");
    if (doc.contains("lambdas")) spec.lambdas = doc["lambdas"].get<std::vector<double>>();
    if (doc.contains("weights")) {
      spec.weights.clear();
      for (const json& w : doc["weights"]) spec.weights.push_back(ParseWeights(w, "weights"));
    }
    if (doc.contains("fractions")) spec.fractions = doc["fractions"].get<std::vector<double>>();
    if (doc.contains("gaps")) spec.gaps = doc["gaps"].get<std::vector<double>>();
    if (doc.contains("seeds")) spec.seeds = doc["seeds"].get<std::vector<uint64_t>>();
    spec.replications = doc.value("replications", spec.replications);
    spec.threads = doc.value("threads", spec.threads);
  } catch (const json::exception& e) {
    ConfigError(std::string("sweep: ") + e.what());
  }
  spec.Validate();
  return spec;
}

SweepResult SweepExperiment(const SweepSpec& spec, const RunConfig& config) {
  spec.Validate();
  config.Validate(true);
  const PartGraph graph = LoadPartGraph(ReadFile(config.assembly));
  const NormalizedAttributes norm = NormalizeAttributes(graph);
  std::optional<GeometryConstraints> geometry;
  if (config.collision_check) {
    if (!config.mesh_dir.empty()) {
      std::map<std::string, JointFrame> frames;
      if (!config.frames.empty()) frames = ParseFrames(ReadFile(config.frames));
      geometry = PreprocessMeshes(graph, LoadPartMeshes(graph, config.mesh_dir), frames);
    } else {
      geometry = ImportGeometryConstraints(ReadFile(config.constraints));
    }
  }
  const std::vector<std::string> tech_by_joint = [&] {
    std::vector<std::string> t;
    for (const Joint& j : graph.joints()) t.push_back(j.technology);
    return t;
  }();

  // Full digraph and c per weight triple.
  std::vector<CutsetDigraph> digraphs(spec.weights.size());
  std::vector<double> factors(spec.weights.size(), 1.0);
  std::vector<std::string> plan_errors(spec.weights.size());
  for (size_t w = 0; w < spec.weights.size(); ++w) {
    try {
      DigraphOptions options;
      if (geometry) options.geometry = &*geometry;
      options.max_edges = config.max_edges;
      digraphs[w] = GenerateDigraph(graph, norm, spec.weights[w], options);
      factors[w] = config.c ? *config.c
                            : EqualContributionFactor(digraphs[w], config.phases);
    } catch (const Error& e) {
      plan_errors[w] = e.what();
    }
  }

  struct Key {
    size_t lambda, weights, fraction, gap, seed;
  };
  std::vector<Key> keys;
  std::vector<SweepRow> rows;
  int cell = 0;
  for (size_t li = 0; li < spec.lambdas.size(); ++li) {
    for (size_t wi = 0; wi < spec.weights.size(); ++wi) {
      for (size_t fi = 0; fi < spec.fractions.size(); ++fi) {
        for (size_t gi = 0; gi < spec.gaps.size(); ++gi) {
          for (size_t si = 0; si < spec.seeds.size(); ++si, ++cell) {
            for (int r = 0; r < spec.replications; ++r) {
              SweepRow row;
              row.cell = cell;
              row.replication = r;
              row.lambda = spec.lambdas[li];
              row.weights = spec.weights[wi];
              row.fraction = spec.fractions[fi];
              row.gap = spec.gaps[gi];
              row.seed = spec.seeds[si] + static_cast<uint64_t>(r);
              rows.push_back(row);
              keys.push_back({li, wi, fi, gi, si});
            }
          }
        }
      }
    }
  }

  auto evaluate = [&](size_t i) {
    SweepRow& row = rows[i];
    const size_t w = keys[i].weights;
    if (!plan_errors[w].empty()) {
      row.error = plan_errors[w];
      return;
    }
    try {
      ReductionConfig rc = config.reduction;
      rc.fraction = row.fraction;
      rc.seed = row.seed;
      ReductionStats stats;
      const CutsetDigraph reduced = ReduceEdges(digraphs[w], rc, &stats);
      row.edges_before = stats.edges_before;
      row.edges_after = stats.edges_after;
      BalanceProblem problem;
      problem.digraph = &reduced;
      problem.phases = config.phases;
      problem.lambda = row.lambda;
      problem.c = factors[w];
      problem.gap = row.gap;
      problem.time_limit_s = config.time_limit_s;
      const Solution s = SolveBalance(problem);
      row.solve_seconds = s.wall_seconds;
      row.objective = s.objective;
      row.alpha = s.alpha;
      row.engineering_cost = s.engineering_cost;
      row.proven = s.proven;
      std::vector<std::string> tech(reduced.num_ops());
      for (int o = 0; o < reduced.num_ops(); ++o) {
        tech[o] = tech_by_joint[*graph.JointIndex(reduced.op_ids()[o])];
      }
      row.technology_changes = CountAttributeChanges(s, tech);
    } catch (const Error& e) {
      row.error = e.what();
    }
  };

  if (spec.threads <= 1) {
    for (size_t i = 0; i < rows.size(); ++i) evaluate(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    for (int t = 0; t < spec.threads; ++t) {
      workers.emplace_back([&] {
        for (size_t i = next++; i < rows.size(); i = next++) evaluate(i);
      });
    }
    for (std::thread& t : workers) t.join();
  }

  const size_t base_fraction = static_cast<size_t>(
      std::min_element(spec.fractions.begin(), spec.fractions.end()) -
      spec.fractions.begin());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows.size(); ++j) {
      const Key& a = keys[i];
      const Key& b = keys[j];
      if (b.fraction != base_fraction || a.lambda != b.lambda ||
          a.weights != b.weights || a.gap != b.gap || a.seed != b.seed ||
          rows[i].replication != rows[j].replication) {
        continue;
      }
      if (rows[i].error.empty() && rows[j].error.empty() &&
          rows[i].solve_seconds > 0.0) {
        rows[i].speedup = rows[j].solve_seconds / rows[i].solve_seconds;
      }
    }
  }

  SweepResult result;
  std::ostringstream out;
  const std::string head =
      "lambda,mu_technology,mu_handling,mu_tolerance,fraction,gap,";
  out << "cell,replication," << head
      << "seed,edges_before,edges_after,solve_time_s,objective,alpha,"
         "engineering_cost,technology_changes,proven,speedup,error\n";
  for (const SweepRow& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.cell << ',' << r.replication << ',' << Num(r.lambda) << ','
        << Num(r.weights.technology) << ',' << Num(r.weights.handling) << ','
        << Num(r.weights.tolerance) << ',' << Num(r.fraction) << ','
        << Num(r.gap) << ',' << r.seed << ',' << r.edges_before << ','
        << r.edges_after << ',' << Num(r.solve_seconds) << ','
        << Num(r.objective) << ',' << Num(r.alpha) << ','
        << Num(r.engineering_cost) << ',' << r.technology_changes << ','
        << (r.proven ? 1 : 0) << ',' << Num(r.speedup) << ',' << err << '\n';
  }
  result.rows_csv = out.str();

  std::ostringstream sum;
  sum << "cell," << head << "base_seed,replications_ok";
  const std::vector<std::pair<std::string, std::function<double(const SweepRow&)>>>
      columns = {
          {"objective", [](const SweepRow& r) { return r.objective; }},
          {"alpha", [](const SweepRow& r) { return r.alpha; }},
          {"engineering_cost", [](const SweepRow& r) { return r.engineering_cost; }},
          {"edges_after", [](const SweepRow& r) { return double(r.edges_after); }},
          {"technology_changes",
           [](const SweepRow& r) { return double(r.technology_changes); }},
          {"solve_time_s", [](const SweepRow& r) { return r.solve_seconds; }},
          {"speedup", [](const SweepRow& r) { return r.speedup; }},
      };
  for (const auto& [name, f] : columns) sum << ',' << name << "_mean," << name << "_std";
  sum << '\n';
  for (size_t begin = 0; begin < rows.size(); begin += spec.replications) {
    const SweepRow& first = rows[begin];
    std::vector<const SweepRow*> ok;
    for (int r = 0; r < spec.replications; ++r) {
      if (rows[begin + r].error.empty()) ok.push_back(&rows[begin + r]);
    }
    sum << first.cell << ',' << Num(first.lambda) << ','
        << Num(first.weights.technology) << ',' << Num(first.weights.handling)
        << ',' << Num(first.weights.tolerance) << ',' << Num(first.fraction)
        << ',' << Num(first.gap) << ',' << first.seed << ',' << ok.size();
    for (const auto& [name, f] : columns) {
      double mean = 0.0, var = 0.0;
      for (const SweepRow* r : ok) mean += f(*r);
      if (!ok.empty()) mean /= ok.size();
      for (const SweepRow* r : ok) var += (f(*r) - mean) * (f(*r) - mean);
      const double sd = ok.size() > 1 ? std::sqrt(var / (ok.size() - 1)) : 0.0;
      sum << ',' << Num(mean) << ',' << Num(sd);
    }
    sum << '\n';
  }
  result.summary_csv = sum.str();
  result.rows = std::move(rows);
  return result;
}

}  // namespace asmline
