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

#ifndef ASMLINE_MESH_H_
#define ASMLINE_MESH_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Geometry>

namespace asmline {

struct TriangleMesh {
  std::string part_id;
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;

  Eigen::AlignedBox3d Bounds() const;
  double BoundsDiagonal() const;
  Eigen::Vector3d Corner(int triangle, int k) const {
    return vertices[triangles[triangle][k]];
  }
};

struct StlParseOptions {
  // Vertices closer than this are merged. Non-positive selects
  // 1e-9 x max(1, bounding-box diagonal).
  double merge_tolerance = 0.0;
};

struct StlParseResult {
  TriangleMesh mesh;
  int triangles_in_file = 0;
  int degenerate_dropped = 0;
};

// Accepts binary and ASCII STL. Throws Error with kTruncatedFile,
// kCountMismatch, kNonFiniteCoordinate or kMalformedDocument.
StlParseResult ParseStl(std::string_view bytes, std::string part_id = "",
                        const StlParseOptions& options = {});

// Binary writer; facet normals are recomputed from the winding.
std::string WriteStlBinary(const TriangleMesh& mesh);
std::string WriteStlAscii(const TriangleMesh& mesh);

TriangleMesh Transformed(const TriangleMesh& mesh,
                         const Eigen::Isometry3d& transform);

// Closed axis-aligned box with outward-facing triangles (12 triangles).
TriangleMesh MakeBox(const Eigen::Vector3d& min_corner,
                     const Eigen::Vector3d& max_corner,
                     std::string part_id = "");

// Concatenates closed meshes into one (e.g. a part built from several boxes).
TriangleMesh MergeMeshes(const std::vector<TriangleMesh>& meshes,
                         std::string part_id);

}  // namespace asmline

#endif  // ASMLINE_MESH_H_
