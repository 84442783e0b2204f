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

#ifndef ASMLINE_CONSTRAINTS_H_
#define ASMLINE_CONSTRAINTS_H_

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace asmline {

enum class Relation : int { kSelf = 0, kContact = 1, kBlocking = 2, kFree = 3 };

// Symmetric part-pair relationship codes.
struct RelationalMatrix {
  std::vector<std::string> part_order;
  std::vector<std::vector<int>> codes;

  Relation At(int i, int j) const { return static_cast<Relation>(codes[i][j]); }
  bool operator==(const RelationalMatrix&) const = default;
};

// Joint-local coordinate system. `rotation` maps joint-local axes to world
// axes (its columns are the local x, y, z axes in world coordinates).
struct JointFrame {
  std::string joint_id;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  bool operator==(const JointFrame& o) const {
    return joint_id == o.joint_id && origin == o.origin &&
           rotation == o.rotation;
  }
};

// Throws Error(kInvalidFrame) unless RᵀR = I within `tolerance` and det R = +1.
void CheckFrame(const JointFrame& frame, double tolerance = 1e-9);

// Degree-of-freedom matrix of `part_id` moving relative to the mating part of
// `joint_id`, expressed in frame `frame_id`. Rows are x, y, z; columns are
// T+, T-, R+, R-. An entry of 1 means the motion is free.
struct DofMatrix {
  enum Column { kTranslatePos = 0, kTranslateNeg = 1, kRotatePos = 2, kRotateNeg = 3 };

  std::string joint_id;
  std::string part_id;
  std::string frame_id;
  std::array<std::array<int, 4>, 3> m{};

  bool operator==(const DofMatrix&) const = default;
};

struct GeometryConstraints {
  RelationalMatrix relations;
  std::map<std::string, JointFrame> frames;  // keyed by frame id
  std::vector<DofMatrix> dofs;

  // DoF matrix of `part_id` for `joint_id`, or nullptr.
  const DofMatrix* FindDof(std::string_view joint_id,
                           std::string_view part_id) const;
  bool operator==(const GeometryConstraints&) const = default;
};

// Throws Error(kDanglingReference) when a DofMatrix names an unknown frame.
std::string ExportGeometryConstraints(const GeometryConstraints& constraints);
GeometryConstraints ImportGeometryConstraints(std::string_view document);

}  // namespace asmline

#endif  // ASMLINE_CONSTRAINTS_H_
