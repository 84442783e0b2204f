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

#include "asmline/assembly_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "asmline/error.h"
#include "json.hpp"

namespace asmline {

using nlohmann::json;

PartGraph::PartGraph(std::vector<Part> parts, std::vector<Joint> joints,
                     int handling_min, int handling_max)
    : parts_(std::move(parts)),
      joints_(std::move(joints)),
      handling_min_(handling_min),
      handling_max_(handling_max) {
  std::stable_sort(parts_.begin(), parts_.end(),
                   [](const Part& a, const Part& b) { return a.id < b.id; });
  std::stable_sort(joints_.begin(), joints_.end(),
                   [](const Joint& a, const Joint& b) { return a.id < b.id; });
  for (int i = 0; i < num_parts(); ++i) part_index_.emplace(parts_[i].id, i);
  for (int i = 0; i < num_joints(); ++i) {
    joint_index_.emplace(joints_[i].id, i);
  }
  incident_.assign(parts_.size(), {});
  endpoints_.reserve(joints_.size());
  for (int j = 0; j < num_joints(); ++j) {
    const auto a = PartIndex(joints_[j].part_a);
    const auto b = PartIndex(joints_[j].part_b);
    endpoints_.emplace_back(a.value_or(-1), b.value_or(-1));
    if (a) incident_[*a].push_back(j);
    if (b && b != a) incident_[*b].push_back(j);
  }
}

std::optional<int> PartGraph::PartIndex(std::string_view id) const {
  const auto it = part_index_.find(id);
  if (it == part_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> PartGraph::JointIndex(std::string_view id) const {
  const auto it = joint_index_.find(id);
  if (it == joint_index_.end()) return std::nullopt;
  return it->second;
}

std::string_view DiagnosticName(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kEmptyGraph: return "empty-graph";
    case DiagnosticKind::kDuplicatePartId: return "duplicate-part-id";
    case DiagnosticKind::kDuplicateJointId: return "duplicate-joint-id";
    case DiagnosticKind::kDanglingReference: return "dangling-reference";
    case DiagnosticKind::kSelfJoint: return "self-joint";
    case DiagnosticKind::kNegativeMass: return "negative-mass";
    case DiagnosticKind::kHandlingOutOfRange: return "handling-out-of-range";
    case DiagnosticKind::kNonpositiveTime: return "nonpositive-time";
    case DiagnosticKind::kToleranceBelowOne: return "tolerance-below-one";
    case DiagnosticKind::kNonFiniteValue: return "non-finite-value";
    case DiagnosticKind::kDisconnectedGraph: return "disconnected-graph";
  }
  return "unknown";
}

namespace {

bool IsConnected(const PartGraph& g) {
  if (g.num_parts() <= 1) return true;
  std::vector<int> parent(g.num_parts());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = g.num_parts();
  for (int j = 0; j < g.num_joints(); ++j) {
    const int a = g.EndpointA(j);
    const int b = g.EndpointB(j);
    if (a < 0 || b < 0) continue;
    const int ra = find(a);
    const int rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

template <typename T>
T Required(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string(where) + " is missing key '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string(where) + "." + key + ": " + e.what());
  }
}

}  // namespace

std::vector<Diagnostic> ValidateGraph(const PartGraph& g) {
  std::vector<Diagnostic> out;
  auto add = [&](DiagnosticKind kind, std::string subject, std::string msg) {
    out.push_back({kind, std::move(subject), std::move(msg)});
  };
  if (g.num_parts() == 0) {
    add(DiagnosticKind::kEmptyGraph, "", "assembly has no parts");
    return out;
  }
  std::set<std::string> seen;
  for (const Part& p : g.parts()) {
    if (!seen.insert(p.id).second) {
      add(DiagnosticKind::kDuplicatePartId, p.id, "duplicate part id");
    }
    if (!std::isfinite(p.mass_kg)) {
      add(DiagnosticKind::kNonFiniteValue, p.id, "mass is not finite");
    } else if (p.mass_kg < 0) {
      add(DiagnosticKind::kNegativeMass, p.id, "mass is negative");
    }
    if (p.handling < g.handling_min() || p.handling > g.handling_max()) {
      add(DiagnosticKind::kHandlingOutOfRange, p.id,
          "handling level " + std::to_string(p.handling) + " outside [" +
              std::to_string(g.handling_min()) + ", " +
              std::to_string(g.handling_max()) + "]");
    }
  }
  seen.clear();
  bool dangling = false;
  for (int j = 0; j < g.num_joints(); ++j) {
    const Joint& joint = g.joints()[j];
    if (!seen.insert(joint.id).second) {
      add(DiagnosticKind::kDuplicateJointId, joint.id, "duplicate joint id");
    }
    if (g.EndpointA(j) < 0 || g.EndpointB(j) < 0) {
      dangling = true;
      add(DiagnosticKind::kDanglingReference, joint.id,
          "joint references unknown part '" +
              (g.EndpointA(j) < 0 ? joint.part_a : joint.part_b) + "'");
    } else if (joint.part_a == joint.part_b) {
      add(DiagnosticKind::kSelfJoint, joint.id, "joint connects a part to itself");
    }
    if (!std::isfinite(joint.time)) {
      add(DiagnosticKind::kNonFiniteValue, joint.id, "time is not finite");
    } else if (joint.time <= 0) {
      add(DiagnosticKind::kNonpositiveTime, joint.id, "time must be positive");
    }
    if (joint.tolerance < 1) {
      add(DiagnosticKind::kToleranceBelowOne, joint.id,
          "tolerance level must be at least 1");
    }
  }
  if (!dangling && !IsConnected(g)) {
    add(DiagnosticKind::kDisconnectedGraph, "",
        "part graph is not connected");
  }
  return out;
}

PartGraph LoadPartGraph(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument, e.what());
  }
  if (!doc.is_object() || !doc.contains("parts") || !doc["parts"].is_array() ||
      !doc.contains("joints") || !doc["joints"].is_array()) {
    throw Error(ErrorCode::kMalformedDocument,
                "assembly document needs 'parts' and 'joints' arrays");
  }
  std::vector<Part> parts;
  for (const json& p : doc["parts"]) {
    Part part;
    part.id = Required<std::string>(p, "id", "part");
    part.name = p.value("name", part.id);
    part.mass_kg = Required<double>(p, "mass_kg", "part");
    part.handling = Required<int>(p, "handling", "part");
    parts.push_back(std::move(part));
  }
  std::vector<Joint> joints;
  for (const json& j : doc["joints"]) {
    Joint joint;
    joint.id = Required<std::string>(j, "id", "joint");
    joint.part_a = Required<std::string>(j, "part_a", "joint");
    joint.part_b = Required<std::string>(j, "part_b", "joint");
    joint.time = Required<double>(j, "time", "joint");
    joint.tolerance = Required<int>(j, "tolerance", "joint");
    joint.technology = Required<std::string>(j, "technology", "joint");
    joints.push_back(std::move(joint));
  }
  int lo = 1;
  int hi = 3;
  if (doc.contains("handling_levels")) {
    const auto levels = doc["handling_levels"];
    if (!levels.is_array() || levels.size() != 2 ||
        !levels[0].is_number_integer() || !levels[1].is_number_integer()) {
      throw Error(ErrorCode::kMalformedDocument,
                  "'handling_levels' must be [min, max]");
    }
    lo = levels[0].get<int>();
    hi = levels[1].get<int>();
  }
  PartGraph graph(std::move(parts), std::move(joints), lo, hi);

  const auto diagnostics = ValidateGraph(graph);
  // Report the most specific structural problem first.
  for (DiagnosticKind kind :
       {DiagnosticKind::kDuplicatePartId, DiagnosticKind::kDuplicateJointId,
        DiagnosticKind::kDanglingReference, DiagnosticKind::kDisconnectedGraph}) {
    for (const Diagnostic& d : diagnostics) {
      if (d.kind != kind) continue;
      const ErrorCode code =
          kind == DiagnosticKind::kDanglingReference ? ErrorCode::kDanglingReference
          : kind == DiagnosticKind::kDisconnectedGraph
              ? ErrorCode::kDisconnectedGraph
              : ErrorCode::kDuplicateId;
      throw Error(code, d.subject.empty() ? d.message
                                          : d.subject + ": " + d.message);
    }
  }
  if (!diagnostics.empty()) {
    const Diagnostic& d = diagnostics.front();
    throw Error(ErrorCode::kInvalidArgument,
                std::string(DiagnosticName(d.kind)) + " " + d.subject + ": " +
                    d.message);
  }
  return graph;
}

std::string SerializePartGraph(const PartGraph& g) {
  json doc;
  doc["handling_levels"] = {g.handling_min(), g.handling_max()};
  doc["parts"] = json::array();
  for (const Part& p : g.parts()) {
    doc["parts"].push_back({{"id", p.id},
                            {"name", p.name},
                            {"mass_kg", p.mass_kg},
                            {"handling", p.handling}});
  }
  doc["joints"] = json::array();
  for (const Joint& j : g.joints()) {
    doc["joints"].push_back({{"id", j.id},
                             {"part_a", j.part_a},
                             {"part_b", j.part_b},
                             {"time", j.time},
                             {"tolerance", j.tolerance},
                             {"technology", j.technology}});
  }
  return doc.dump(2) + "\n";
}

std::vector<double> MinMaxNormalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0)) return out;
  for (size_t i = 0; i < values.size(); ++i) {
    // Pin the endpoints so already-normalized input maps to itself exactly.
    if (values[i] == *lo) {
      out[i] = 0.0;
    } else if (values[i] == *hi) {
      out[i] = 1.0;
    } else {
      out[i] = std::clamp((values[i] - *lo) / range, 0.0, 1.0);
    }
  }
  return out;
}

std::vector<double> OrdinalEncode(std::span<const std::string> labels) {
  std::vector<std::string> distinct(labels.begin(), labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> out;
  out.reserve(labels.size());
  const double steps = distinct.size() > 1 ? distinct.size() - 1.0 : 1.0;
  for (const std::string& label : labels) {
    const auto rank =
        std::lower_bound(distinct.begin(), distinct.end(), label) -
        distinct.begin();
    out.push_back(distinct.size() > 1 ? rank / steps : 0.0);
  }
  return out;
}

NormalizedAttributes NormalizeAttributes(const PartGraph& g) {
  std::vector<double> tolerance;
  std::vector<double> time;
  std::vector<std::string> technology;
  for (const Joint& j : g.joints()) {
    tolerance.push_back(j.tolerance);
    time.push_back(j.time);
    technology.push_back(j.technology);
  }
  std::vector<double> handling;
  std::vector<double> mass;
  for (const Part& p : g.parts()) {
    handling.push_back(p.handling);
    mass.push_back(p.mass_kg);
  }
  NormalizedAttributes out;
  out.joint_technology = OrdinalEncode(technology);
  out.joint_tolerance = MinMaxNormalize(tolerance);
  out.joint_time = MinMaxNormalize(time);
  out.part_handling = MinMaxNormalize(handling);
  out.part_mass = MinMaxNormalize(mass);
  return out;
}

}  // namespace asmline
