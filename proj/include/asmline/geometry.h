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

#ifndef ASMLINE_GEOMETRY_H_
#define ASMLINE_GEOMETRY_H_

#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "asmline/constraints.h"
#include "asmline/mesh.h"

namespace asmline {

// Low-level predicates on single triangles, exposed for testing.
namespace geom {

double PointTriangleDistance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                             const Eigen::Vector3d& b, const Eigen::Vector3d& c);

// Minimum distance between two closed triangles (0 when they intersect).
double TriangleDistance(std::span<const Eigen::Vector3d, 3> t1,
                        std::span<const Eigen::Vector3d, 3> t2);

// True when each triangle crosses the other's plane by more than `eps` and
// the crossing segments overlap by more than `eps`. Coplanar or
// edge-touching triangles do not penetrate.
bool TrianglesPenetrate(std::span<const Eigen::Vector3d, 3> t1,
                        std::span<const Eigen::Vector3d, 3> t2, double eps);

// Ray parameter of the hit, or a negative value on a miss. Only hits with
// t > t_min count.
double RayTriangleHit(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                      const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      const Eigen::Vector3d& c, double t_min = 0.0);

}  // namespace geom

// Ray-parity inside test against a closed mesh. Points on the surface give
// an unspecified answer.
bool PointInMesh(const Eigen::Vector3d& point, const TriangleMesh& mesh);

// 1e-6 x the larger bounding-box diagonal of the pair.
double DefaultContactTolerance(const TriangleMesh& a, const TriangleMesh& b);

// Surfaces within `tol` of each other, or one mesh inside the other.
// Non-positive `tol` selects DefaultContactTolerance().
bool DetectContact(const TriangleMesh& a, const TriangleMesh& b,
                   double tol = 0.0);

// True when some ray cast from a vertex of `a` along one of `directions`
// hits `b`.
bool DetectBlocking(const TriangleMesh& a, const TriangleMesh& b,
                    std::span<const Eigen::Vector3d> directions);

// The six signed columns of `axes`.
std::vector<Eigen::Vector3d> SignedAxisDirections(
    const Eigen::Matrix3d& axes = Eigen::Matrix3d::Identity());

// Positive-volume overlap: some pair of triangles penetrates, or one mesh
// lies inside the other. Touching surfaces do not count.
bool MeshesInterpenetrate(const TriangleMesh& a, const TriangleMesh& b,
                          double eps);

struct RelationOptions {
  double contact_tolerance = 0.0;  // <= 0: per-pair default
  std::vector<Eigen::Vector3d> directions = SignedAxisDirections();
};

// Contact is tested first, then blocking (rays cast from either mesh),
// otherwise free. Needs at least two meshes.
RelationalMatrix BuildRelationalMatrix(std::span<const TriangleMesh> meshes,
                                       const RelationOptions& options = {});

struct DofProbeSet {
  enum class Pivot { kFrameOrigin, kMovedCentroid };

  std::vector<double> distances;   // model units
  std::vector<double> angles_deg;
  Pivot pivot = Pivot::kFrameOrigin;
  double eps = 0.0;  // <= 0: 1e-6 x larger bounding-box diagonal
};

// distances {0.01, 0.1, 0.5} x diagonal of `moved`, angles {5, 15} degrees.
DofProbeSet DefaultProbes(const TriangleMesh& moved);

// Probes every signed translation and rotation about the frame axes; an
// entry is 0 when any probe makes `moved` interpenetrate `fixed`.
// Throws kInvalidFrame, kInvalidArgument (empty probe sets) or
// kPreconditionViolated (pair neither in contact nor blocking).
DofMatrix ExtractDofMatrix(const TriangleMesh& moved, const TriangleMesh& fixed,
                           const JointFrame& frame, const DofProbeSet& probes);

}  // namespace asmline

#endif  // ASMLINE_GEOMETRY_H_
