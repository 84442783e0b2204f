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

#include "asmline/geometry.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "asmline/error.h"

namespace asmline {
namespace geom {
namespace {

using Vec = Eigen::Vector3d;

Vec ClosestPointOnTriangle(const Vec& p, const Vec& a, const Vec& b,
                           const Vec& c) {
  const Vec ab = b - a;
  const Vec ac = c - a;
  const Vec ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double SegmentSegmentDistance(const Vec& p1, const Vec& q1, const Vec& p2,
                              const Vec& q2) {
  const Vec d1 = q1 - p1;
  const Vec d2 = q2 - p2;
  const Vec r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0;
  double t = 0;
  constexpr double kTiny = 1e-300;
  if (a <= kTiny && e <= kTiny) return r.norm();
  if (a <= kTiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kTiny) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

// Does segment pq cross the interior or boundary of triangle abc? Coplanar
// segments are left to the distance tests.
bool SegmentCrossesTriangle(const Vec& p, const Vec& q, const Vec& a,
                            const Vec& b, const Vec& c) {
  const Vec n = (b - a).cross(c - a);
  const double dp = n.dot(p - a);
  const double dq = n.dot(q - a);
  if ((dp > 0 && dq > 0) || (dp < 0 && dq < 0) || dp == dq) return false;
  const Vec x = p + (q - p) * (dp / (dp - dq));
  const double s1 = n.dot((b - a).cross(x - a));
  const double s2 = n.dot((c - b).cross(x - b));
  const double s3 = n.dot((a - c).cross(x - c));
  return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

// Signed distances of `t` to the plane of `plane`, snapped to 0 within eps.
std::array<double, 3> PlaneDistances(std::span<const Vec, 3> t,
                                     std::span<const Vec, 3> plane,
                                     double eps, Vec* normal) {
  Vec n = (plane[1] - plane[0]).cross(plane[2] - plane[0]);
  const double len = n.norm();
  std::array<double, 3> d{0, 0, 0};
  if (len == 0) return d;
  n /= len;
  *normal = n;
  for (int i = 0; i < 3; ++i) {
    d[i] = n.dot(t[i] - plane[0]);
    if (std::abs(d[i]) < eps) d[i] = 0;
  }
  return d;
}

bool Straddles(const std::array<double, 3>& d) {
  const bool pos = d[0] > 0 || d[1] > 0 || d[2] > 0;
  const bool neg = d[0] < 0 || d[1] < 0 || d[2] < 0;
  return pos && neg;
}

// Extent of the triangle's cut by the other plane, projected on `axis`.
std::pair<double, double> CutInterval(std::span<const Vec, 3> t,
                                      const std::array<double, 3>& d,
                                      const Vec& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto take = [&](const Vec& p) {
    const double s = axis.dot(p);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  };
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (d[i] == 0) take(t[i]);
    if (d[i] * d[j] < 0) take(t[i] + (t[j] - t[i]) * (d[i] / (d[i] - d[j])));
  }
  return {lo, hi};
}

}  // namespace

double PointTriangleDistance(const Vec& p, const Vec& a, const Vec& b,
                             const Vec& c) {
  return (p - ClosestPointOnTriangle(p, a, b, c)).norm();
}

double TriangleDistance(std::span<const Vec, 3> t1, std::span<const Vec, 3> t2) {
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (SegmentCrossesTriangle(t1[i], t1[j], t2[0], t2[1], t2[2]) ||
        SegmentCrossesTriangle(t2[i], t2[j], t1[0], t1[1], t1[2])) {
      return 0.0;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    best = std::min(best, PointTriangleDistance(t1[i], t2[0], t2[1], t2[2]));
    best = std::min(best, PointTriangleDistance(t2[i], t1[0], t1[1], t1[2]));
    for (int k = 0; k < 3; ++k) {
      best = std::min(best, SegmentSegmentDistance(t1[i], t1[(i + 1) % 3],
                                                   t2[k], t2[(k + 1) % 3]));
    }
  }
  return best;
}

bool TrianglesPenetrate(std::span<const Vec, 3> t1, std::span<const Vec, 3> t2,
                        double eps) {
  Vec n1 = Vec::Zero();
  Vec n2 = Vec::Zero();
  const auto d1 = PlaneDistances(t1, t2, eps, &n2);
  if (!Straddles(d1)) return false;
  const auto d2 = PlaneDistances(t2, t1, eps, &n1);
  if (!Straddles(d2)) return false;
  Vec axis = n1.cross(n2);
  const double len = axis.norm();
  if (len < 1e-12) return false;
  axis /= len;
  const auto [lo1, hi1] = CutInterval(t1, d1, axis);
  const auto [lo2, hi2] = CutInterval(t2, d2, axis);
  return std::min(hi1, hi2) - std::max(lo1, lo2) > eps;
}

double RayTriangleHit(const Vec& origin, const Vec& dir, const Vec& a,
                      const Vec& b, const Vec& c, double t_min) {
  const Vec e1 = b - a;
  const Vec e2 = c - a;
  const Vec p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return -1.0;
  const double inv = 1.0 / det;
  const Vec s = origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0 || u > 1) return -1.0;
  const Vec q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < 0 || u + v > 1) return -1.0;
  const double t = e2.dot(q) * inv;
  return t > t_min ? t : -1.0;
}

}  // namespace geom

namespace {

using Vec = Eigen::Vector3d;
using Tri = std::array<Vec, 3>;

Tri TriangleAt(const TriangleMesh& m, int t) {
  return {m.Corner(t, 0), m.Corner(t, 1), m.Corner(t, 2)};
}

std::vector<Eigen::AlignedBox3d> TriangleBounds(const TriangleMesh& m,
                                                double pad) {
  std::vector<Eigen::AlignedBox3d> out;
  out.reserve(m.triangles.size());
  const Vec margin = Vec::Constant(pad);
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    Eigen::AlignedBox3d box;
    for (int k = 0; k < 3; ++k) box.extend(m.Corner(t, k));
    box.min() -= margin;
    box.max() += margin;
    out.push_back(box);
  }
  return out;
}

bool RayHitsBox(const Vec& origin, const Vec& dir,
                const Eigen::AlignedBox3d& box) {
  double t0 = 0;
  double t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(dir[k]) < 1e-300) {
      if (origin[k] < box.min()[k] || origin[k] > box.max()[k]) return false;
      continue;
    }
    double a = (box.min()[k] - origin[k]) / dir[k];
    double b = (box.max()[k] - origin[k]) / dir[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return true;
}

// Distance from p to the surface of m.
double SurfaceDistance(const Vec& p, const TriangleMesh& m) {
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    best = std::min(best, geom::PointTriangleDistance(p, m.Corner(t, 0),
                                                      m.Corner(t, 1),
                                                      m.Corner(t, 2)));
  }
  return best;
}

// Some point of `inner` lies strictly inside `outer`. Assumes no surface
// penetration, so one off-surface sample decides. Returns true when every
// sample lies on the surface of `outer` (coincident meshes).
bool ContainedIn(const TriangleMesh& inner, const TriangleMesh& outer,
                 double eps) {
  if (inner.vertices.empty() || outer.triangles.empty()) return false;
  if (!outer.Bounds().intersects(inner.Bounds())) return false;
  for (const Vec& v : inner.vertices) {
    if (SurfaceDistance(v, outer) > eps) return PointInMesh(v, outer);
  }
  for (int t = 0; t < static_cast<int>(inner.triangles.size()); ++t) {
    const Vec c =
        (inner.Corner(t, 0) + inner.Corner(t, 1) + inner.Corner(t, 2)) / 3.0;
    if (SurfaceDistance(c, outer) > eps) return PointInMesh(c, outer);
  }
  return true;
}

}  // namespace

bool PointInMesh(const Vec& point, const TriangleMesh& mesh) {
  // Fixed oblique directions; the next one is tried when a ray grazes an
  // edge or vertex.
  static const std::array<Vec, 5> kDirections = {
      Vec(0.5773502691896258, 0.5773502691896258, 0.5773502691896258),
      Vec(0.8017837257372732, -0.2672612419124244, 0.5345224838248488),
      Vec(-0.3015113445777636, 0.9045340337332909, 0.3015113445777636),
      Vec(0.2182178902359924, 0.4364357804719848, -0.8728715609439696),
      Vec(-0.7071067811865476, -0.5, 0.5)};
  for (const Vec& raw : kDirections) {
    const Vec dir = raw.normalized();
    int hits = 0;
    bool ambiguous = false;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()) && !ambiguous;
         ++t) {
      const Vec a = mesh.Corner(t, 0);
      const Vec b = mesh.Corner(t, 1);
      const Vec c = mesh.Corner(t, 2);
      const Vec n = (b - a).cross(c - a);
      const double along = n.dot(dir);
      const double scale = n.norm();
      if (std::abs(along) < 1e-12 * scale) {
        // Grazing a face edge-on: only a problem if the ray lies in it.
        if (std::abs(n.dot(point - a)) <=
            1e-12 * scale * std::max(1.0, (point - a).norm())) {
          ambiguous = true;
        }
        continue;
      }
      const double tp = n.dot(a - point) / along;
      if (tp <= 0) continue;
      const Vec x = point + tp * dir;
      const double s1 = n.dot((b - a).cross(x - a));
      const double s2 = n.dot((c - b).cross(x - b));
      const double s3 = n.dot((a - c).cross(x - c));
      const double edge_eps = 1e-12 * scale * scale;
      if (std::abs(s1) < edge_eps || std::abs(s2) < edge_eps ||
          std::abs(s3) < edge_eps) {
        // Hit on an edge or vertex; the crossing count is unreliable.
        const bool in = (s1 >= -edge_eps && s2 >= -edge_eps && s3 >= -edge_eps);
        if (in) ambiguous = true;
        continue;
      }
      if (s1 > 0 && s2 > 0 && s3 > 0) ++hits;
      if (s1 < 0 && s2 < 0 && s3 < 0) ++hits;
    }
    if (!ambiguous) return hits % 2 == 1;
  }
  return false;
}

double DefaultContactTolerance(const TriangleMesh& a, const TriangleMesh& b) {
  return 1e-6 * std::max(a.BoundsDiagonal(), b.BoundsDiagonal());
}

bool DetectContact(const TriangleMesh& a, const TriangleMesh& b, double tol) {
  if (a.triangles.empty() || b.triangles.empty()) return false;
  if (!(tol > 0)) tol = DefaultContactTolerance(a, b);
  Eigen::AlignedBox3d box_a = a.Bounds();
  box_a.min() -= Vec::Constant(tol);
  box_a.max() += Vec::Constant(tol);
  if (!box_a.intersects(b.Bounds())) return false;

  const auto bounds_a = TriangleBounds(a, tol);
  const auto bounds_b = TriangleBounds(b, 0.0);
  for (int i = 0; i < static_cast<int>(a.triangles.size()); ++i) {
    if (!bounds_a[i].intersects(b.Bounds())) continue;
    const Tri ta = TriangleAt(a, i);
    for (int j = 0; j < static_cast<int>(b.triangles.size()); ++j) {
      if (!bounds_a[i].intersects(bounds_b[j])) continue;
      const Tri tb = TriangleAt(b, j);
      if (geom::TriangleDistance(ta, tb) <= tol) return true;
    }
  }
  // No surface within reach: only nesting remains.
  return PointInMesh(a.vertices.front(), b) || PointInMesh(b.vertices.front(), a);
}

bool DetectBlocking(const TriangleMesh& a, const TriangleMesh& b,
                    std::span<const Vec> directions) {
  if (b.triangles.empty()) return false;
  const Eigen::AlignedBox3d box_b = b.Bounds();
  const auto bounds_b = TriangleBounds(b, 0.0);
  for (const Vec& origin : a.vertices) {
    for (const Vec& dir : directions) {
      if (!RayHitsBox(origin, dir, box_b)) continue;
      for (int j = 0; j < static_cast<int>(b.triangles.size()); ++j) {
        if (!RayHitsBox(origin, dir, bounds_b[j])) continue;
        if (geom::RayTriangleHit(origin, dir, b.Corner(j, 0), b.Corner(j, 1),
                                 b.Corner(j, 2)) > 0) {
          return true;
        }
      }
    }
  }
  return false;
}

std::vector<Vec> SignedAxisDirections(const Eigen::Matrix3d& axes) {
  std::vector<Vec> out;
  for (int k = 0; k < 3; ++k) {
    out.push_back(axes.col(k));
    out.push_back(-axes.col(k));
  }
  return out;
}

bool MeshesInterpenetrate(const TriangleMesh& a, const TriangleMesh& b,
                          double eps) {
  if (a.triangles.empty() || b.triangles.empty()) return false;
  if (!a.Bounds().intersects(b.Bounds())) return false;
  const auto bounds_a = TriangleBounds(a, 0.0);
  const auto bounds_b = TriangleBounds(b, 0.0);
  const Eigen::AlignedBox3d box_b = b.Bounds();
  for (int i = 0; i < static_cast<int>(a.triangles.size()); ++i) {
    if (!bounds_a[i].intersects(box_b)) continue;
    const Tri ta = TriangleAt(a, i);
    for (int j = 0; j < static_cast<int>(b.triangles.size()); ++j) {
      if (!bounds_a[i].intersects(bounds_b[j])) continue;
      if (geom::TrianglesPenetrate(ta, TriangleAt(b, j), eps)) return true;
    }
  }
  return ContainedIn(a, b, eps) || ContainedIn(b, a, eps);
}

RelationalMatrix BuildRelationalMatrix(std::span<const TriangleMesh> meshes,
                                       const RelationOptions& options) {
  if (meshes.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "relational matrix needs at least two meshes");
  }
  const int n = static_cast<int>(meshes.size());
  RelationalMatrix rm;
  rm.codes.assign(n, std::vector<int>(n, static_cast<int>(Relation::kSelf)));
  for (const TriangleMesh& m : meshes) rm.part_order.push_back(m.part_id);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Relation r = Relation::kFree;
      if (DetectContact(meshes[i], meshes[j], options.contact_tolerance)) {
        r = Relation::kContact;
      } else if (DetectBlocking(meshes[i], meshes[j], options.directions) ||
                 DetectBlocking(meshes[j], meshes[i], options.directions)) {
        r = Relation::kBlocking;
      }
      rm.codes[i][j] = rm.codes[j][i] = static_cast<int>(r);
    }
  }
  return rm;
}

DofProbeSet DefaultProbes(const TriangleMesh& moved) {
  const double diag = moved.BoundsDiagonal();
  DofProbeSet probes;
  probes.distances = {0.01 * diag, 0.1 * diag, 0.5 * diag};
  probes.angles_deg = {5.0, 15.0};
  return probes;
}

DofMatrix ExtractDofMatrix(const TriangleMesh& moved, const TriangleMesh& fixed,
                           const JointFrame& frame, const DofProbeSet& probes) {
  CheckFrame(frame);
  if (probes.distances.empty() || probes.angles_deg.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "DoF probing needs non-empty distance and angle sets");
  }
  const auto axes = SignedAxisDirections(frame.rotation);
  if (!DetectContact(moved, fixed) && !DetectBlocking(moved, fixed, axes) &&
      !DetectBlocking(fixed, moved, axes)) {
    throw Error(ErrorCode::kPreconditionViolated,
                "parts " + moved.part_id + " and " + fixed.part_id +
                    " are free; DoF matrices need contact or blocking");
  }
  const double eps =
      probes.eps > 0 ? probes.eps
                     : 1e-6 * std::max(moved.BoundsDiagonal(),
                                       fixed.BoundsDiagonal());
  Vec pivot = frame.origin;
  if (probes.pivot == DofProbeSet::Pivot::kMovedCentroid) {
    pivot = Vec::Zero();
    for (const Vec& v : moved.vertices) pivot += v;
    pivot /= std::max<size_t>(1, moved.vertices.size());
  }

  auto blocked_translation = [&](const Vec& dir) {
    for (double d : probes.distances) {
      Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
      t.translate(d * dir);
      if (MeshesInterpenetrate(Transformed(moved, t), fixed, eps)) return true;
    }
    return false;
  };
  auto blocked_rotation = [&](const Vec& axis, double sign) {
    for (double deg : probes.angles_deg) {
      const double rad = sign * deg * std::numbers::pi / 180.0;
      Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
      t.translate(pivot);
      t.rotate(Eigen::AngleAxisd(rad, axis));
      t.translate(-pivot);
      if (MeshesInterpenetrate(Transformed(moved, t), fixed, eps)) return true;
    }
    return false;
  };

  DofMatrix dof;
  dof.joint_id = frame.joint_id;
  dof.frame_id = frame.joint_id;
  dof.part_id = moved.part_id;
  for (int k = 0; k < 3; ++k) {
    const Vec axis = frame.rotation.col(k);
    dof.m[k][DofMatrix::kTranslatePos] = blocked_translation(axis) ? 0 : 1;
    dof.m[k][DofMatrix::kTranslateNeg] = blocked_translation(-axis) ? 0 : 1;
    dof.m[k][DofMatrix::kRotatePos] = blocked_rotation(axis, 1.0) ? 0 : 1;
    dof.m[k][DofMatrix::kRotateNeg] = blocked_rotation(axis, -1.0) ? 0 : 1;
  }
  return dof;
}

}  // namespace asmline
