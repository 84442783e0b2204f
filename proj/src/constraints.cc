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

#include "asmline/constraints.h"

#include <cmath>

#include <Eigen/LU>

#include "asmline/error.h"
#include "json.hpp"

namespace asmline {

using nlohmann::json;

void CheckFrame(const JointFrame& frame, double tolerance) {
  const Eigen::Matrix3d& r = frame.rotation;
  if (!r.allFinite() || !frame.origin.allFinite()) {
    throw Error(ErrorCode::kInvalidFrame,
                "frame " + frame.joint_id + " has non-finite entries");
  }
  const double off = (r.transpose() * r - Eigen::Matrix3d::Identity())
                         .cwiseAbs()
                         .maxCoeff();
  if (off > tolerance) {
    throw Error(ErrorCode::kInvalidFrame,
                "frame " + frame.joint_id + " rotation is not orthonormal");
  }
  if (std::abs(r.determinant() - 1.0) > tolerance) {
    throw Error(ErrorCode::kInvalidFrame,
                "frame " + frame.joint_id + " rotation is a reflection");
  }
}

const DofMatrix* GeometryConstraints::FindDof(std::string_view joint_id,
                                              std::string_view part_id) const {
  for (const DofMatrix& d : dofs) {
    if (d.joint_id == joint_id && d.part_id == part_id) return &d;
  }
  return nullptr;
}

namespace {

void CheckReferences(const GeometryConstraints& c) {
  for (const DofMatrix& d : c.dofs) {
    if (!c.frames.contains(d.frame_id)) {
      throw Error(ErrorCode::kDanglingReference,
                  "DoF matrix for joint " + d.joint_id + " references unknown "
                  "frame '" + d.frame_id + "'");
    }
  }
}

}  // namespace

std::string ExportGeometryConstraints(const GeometryConstraints& c) {
  CheckReferences(c);
  json doc;
  doc["part_order"] = c.relations.part_order;
  doc["relations"] = c.relations.codes;
  doc["frames"] = json::object();
  for (const auto& [id, frame] : c.frames) {
    json rot = json::array();
    for (int i = 0; i < 3; ++i) {
      rot.push_back({frame.rotation(i, 0), frame.rotation(i, 1),
                     frame.rotation(i, 2)});
    }
    doc["frames"][id] = {
        {"joint_id", frame.joint_id},
        {"origin", {frame.origin.x(), frame.origin.y(), frame.origin.z()}},
        {"rotation", rot}};
  }
  doc["dof"] = json::array();
  for (const DofMatrix& d : c.dofs) {
    doc["dof"].push_back({{"joint_id", d.joint_id},
                          {"part_id", d.part_id},
                          {"frame_id", d.frame_id},
                          {"matrix", d.m}});
  }
  return doc.dump(2) + "\n";
}

GeometryConstraints ImportGeometryConstraints(std::string_view document) {
  GeometryConstraints c;
  try {
    const json doc = json::parse(document);
    c.relations.part_order =
        doc.value("part_order", std::vector<std::string>{});
    c.relations.codes = doc.at("relations").get<std::vector<std::vector<int>>>();
    for (const auto& [id, f] : doc.at("frames").items()) {
      JointFrame frame;
      frame.joint_id = f.value("joint_id", id);
      const auto o = f.at("origin").get<std::array<double, 3>>();
      frame.origin = Eigen::Vector3d(o[0], o[1], o[2]);
      const auto r = f.at("rotation").get<std::array<std::array<double, 3>, 3>>();
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) frame.rotation(i, j) = r[i][j];
      }
      c.frames.emplace(id, frame);
    }
    for (const json& d : doc.at("dof")) {
      DofMatrix dof;
      dof.joint_id = d.at("joint_id").get<std::string>();
      dof.part_id = d.at("part_id").get<std::string>();
      dof.frame_id = d.value("frame_id", dof.joint_id);
      dof.m = d.at("matrix").get<std::array<std::array<int, 4>, 3>>();
      c.dofs.push_back(std::move(dof));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("constraint document: ") + e.what());
  }
  const size_t n = c.relations.codes.size();
  if (!c.relations.part_order.empty() && c.relations.part_order.size() != n) {
    throw Error(ErrorCode::kMalformedDocument,
                "part_order length does not match relations");
  }
  for (const auto& row : c.relations.codes) {
    if (row.size() != n) {
      throw Error(ErrorCode::kMalformedDocument, "relations must be square");
    }
  }
  for (const DofMatrix& d : c.dofs) {
    for (const auto& row : d.m) {
      for (int v : row) {
        if (v != 0 && v != 1) {
          throw Error(ErrorCode::kMalformedDocument,
                      "DoF matrix entries must be 0 or 1");
        }
      }
    }
  }
  CheckReferences(c);
  return c;
}

}  // namespace asmline
