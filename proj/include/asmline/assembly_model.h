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

#ifndef ASMLINE_ASSEMBLY_MODEL_H_
#define ASMLINE_ASSEMBLY_MODEL_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asmline {

struct Part {
  std::string id;
  std::string name;
  double mass_kg = 0.0;
  int handling = 1;

  bool operator==(const Part&) const = default;
};

struct Joint {
  std::string id;
  std::string part_a;
  std::string part_b;
  // Operation-time proxy, e.g. welding length in millimeters.
  double time = 0.0;
  int tolerance = 1;
  std::string technology;

  bool operator==(const Joint&) const = default;
};

// Parts and joints are kept sorted by id, so two documents that differ only
// in element order load to equal graphs. Part and joint indices used across
// the library refer to these sorted positions.
class PartGraph {
 public:
  PartGraph() = default;
  // Sorts by id and builds the lookup tables. Does not validate; use
  // ValidateGraph() for that.
  PartGraph(std::vector<Part> parts, std::vector<Joint> joints,
            int handling_min = 1, int handling_max = 3);

  const std::vector<Part>& parts() const { return parts_; }
  const std::vector<Joint>& joints() const { return joints_; }
  int num_parts() const { return static_cast<int>(parts_.size()); }
  int num_joints() const { return static_cast<int>(joints_.size()); }
  int handling_min() const { return handling_min_; }
  int handling_max() const { return handling_max_; }

  std::optional<int> PartIndex(std::string_view id) const;
  std::optional<int> JointIndex(std::string_view id) const;

  // Endpoint part indices of a joint. Both must resolve; callers that may
  // hold an unvalidated graph should run ValidateGraph() first.
  int EndpointA(int joint) const { return endpoints_[joint].first; }
  int EndpointB(int joint) const { return endpoints_[joint].second; }

  // Joint indices incident to a part.
  const std::vector<int>& IncidentJoints(int part) const {
    return incident_[part];
  }

  bool operator==(const PartGraph& other) const {
    return parts_ == other.parts_ && joints_ == other.joints_ &&
           handling_min_ == other.handling_min_ &&
           handling_max_ == other.handling_max_;
  }

 private:
  std::vector<Part> parts_;
  std::vector<Joint> joints_;
  int handling_min_ = 1;
  int handling_max_ = 3;
  std::map<std::string, int, std::less<>> part_index_;
  std::map<std::string, int, std::less<>> joint_index_;
  std::vector<std::pair<int, int>> endpoints_;
  std::vector<std::vector<int>> incident_;
};

// Min-max normalized attributes, indexed like PartGraph::joints() and
// PartGraph::parts().
struct NormalizedAttributes {
  std::vector<double> joint_technology;
  std::vector<double> joint_tolerance;
  std::vector<double> joint_time;
  std::vector<double> part_handling;
  std::vector<double> part_mass;
};

enum class DiagnosticKind {
  kEmptyGraph,
  kDuplicatePartId,
  kDuplicateJointId,
  kDanglingReference,
  kSelfJoint,
  kNegativeMass,
  kHandlingOutOfRange,
  kNonpositiveTime,
  kToleranceBelowOne,
  kNonFiniteValue,
  kDisconnectedGraph,
};

std::string_view DiagnosticName(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::string subject;  // offending part/joint id, empty for graph-level
  std::string message;
};

// Parses an assembly description (JSON). Throws Error with kMalformedDocument,
// kDuplicateId, kDanglingReference, kDisconnectedGraph, or kInvalidArgument
// for other invariant violations.
PartGraph LoadPartGraph(std::string_view document);

// Inverse of LoadPartGraph(); output is deterministic.
std::string SerializePartGraph(const PartGraph& graph);

std::vector<Diagnostic> ValidateGraph(const PartGraph& graph);

// (v - min) / (max - min); a constant input maps to all zeros.
std::vector<double> MinMaxNormalize(std::span<const double> values);

// Distinct labels sorted lexicographically and mapped to equally spaced
// codes in [0, 1]. A single label maps to 0.
std::vector<double> OrdinalEncode(std::span<const std::string> labels);

NormalizedAttributes NormalizeAttributes(const PartGraph& graph);

}  // namespace asmline

#endif  // ASMLINE_ASSEMBLY_MODEL_H_
