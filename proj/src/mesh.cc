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

#include "asmline/mesh.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <unordered_map>

#include "asmline/error.h"

namespace asmline {
namespace {

constexpr size_t kHeaderBytes = 80;
constexpr size_t kRecordBytes = 50;

static_assert(std::endian::native == std::endian::little,
              "STL I/O assumes a little-endian host");

uint32_t ReadU32(const char* p) {
  uint32_t v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

float ReadF32(const char* p) {
  float v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

bool LooksAscii(std::string_view bytes) {
  size_t i = 0;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) {
    ++i;
  }
  if (bytes.substr(i, 5) != "solid") return false;
  // Some binary exporters also start the header with "solid"; a size that
  // matches the binary layout wins.
  if (bytes.size() >= kHeaderBytes + 4) {
    const uint64_t n = ReadU32(bytes.data() + kHeaderBytes);
    if (kHeaderBytes + 4 + n * kRecordBytes == bytes.size()) return false;
  }
  return true;
}

struct RawTriangle {
  std::array<Eigen::Vector3d, 3> p;
};

void CheckFinite(const Eigen::Vector3d& v) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kNonFiniteCoordinate, "STL vertex is not finite");
  }
}

std::vector<RawTriangle> ReadBinary(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes + 4) {
    throw Error(ErrorCode::kTruncatedFile, "binary STL shorter than its header");
  }
  const uint64_t declared = ReadU32(bytes.data() + kHeaderBytes);
  const uint64_t available = (bytes.size() - kHeaderBytes - 4) / kRecordBytes;
  if (available < declared) {
    throw Error(ErrorCode::kTruncatedFile,
                "binary STL declares " + std::to_string(declared) +
                    " triangles but holds " + std::to_string(available));
  }
  if (kHeaderBytes + 4 + declared * kRecordBytes != bytes.size()) {
    throw Error(ErrorCode::kCountMismatch,
                "binary STL has trailing bytes after " +
                    std::to_string(declared) + " triangles");
  }
  std::vector<RawTriangle> out(declared);
  const char* rec = bytes.data() + kHeaderBytes + 4;
  for (uint64_t t = 0; t < declared; ++t, rec += kRecordBytes) {
    for (int k = 0; k < 3; ++k) {
      const char* v = rec + 12 + 12 * k;
      out[t].p[k] = Eigen::Vector3d(ReadF32(v), ReadF32(v + 4), ReadF32(v + 8));
      CheckFinite(out[t].p[k]);
    }
  }
  return out;
}

std::vector<RawTriangle> ReadAscii(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::string token;
  in >> token;  // solid
  std::getline(in, token);  // optional name
  std::vector<RawTriangle> out;
  bool ended = false;
  while (in >> token) {
    if (token == "endsolid") {
      ended = true;
      break;
    }
    if (token != "facet") {
      throw Error(ErrorCode::kMalformedDocument,
                  "unexpected token '" + token + "' in ASCII STL");
    }
    std::string rest;
    std::getline(in, rest);  // normal nx ny nz
    in >> token;
    if (token != "outer") {
      throw Error(in ? ErrorCode::kMalformedDocument : ErrorCode::kTruncatedFile,
                  "expected 'outer loop'");
    }
    in >> token;  // loop
    RawTriangle tri;
    int count = 0;
    while (in >> token && token == "vertex") {
      std::string xs, ys, zs;
      in >> xs >> ys >> zs;
      if (!in) throw Error(ErrorCode::kTruncatedFile, "truncated vertex");
      Eigen::Vector3d v;
      try {
        v = Eigen::Vector3d(std::stod(xs), std::stod(ys), std::stod(zs));
      } catch (const std::out_of_range&) {
        throw Error(ErrorCode::kNonFiniteCoordinate, "vertex out of range");
      } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::kMalformedDocument, "bad vertex coordinate");
      }
      CheckFinite(v);
      if (count < 3) tri.p[count] = v;
      ++count;
    }
    if (!in) throw Error(ErrorCode::kTruncatedFile, "ASCII STL ends mid-facet");
    if (count != 3) {
      throw Error(ErrorCode::kCountMismatch,
                  "facet has " + std::to_string(count) + " vertices");
    }
    if (token != "endloop") {
      throw Error(ErrorCode::kMalformedDocument, "expected 'endloop'");
    }
    in >> token;
    if (token != "endfacet") {
      throw Error(in ? ErrorCode::kMalformedDocument : ErrorCode::kTruncatedFile,
                  "expected 'endfacet'");
    }
    out.push_back(tri);
  }
  if (!ended) throw Error(ErrorCode::kTruncatedFile, "ASCII STL lacks 'endsolid'");
  return out;
}

struct CellKey {
  int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  size_t operator()(const CellKey& k) const {
    uint64_t h = 1469598103934665603ull;
    for (int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<uint64_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

void AppendFloat(std::string& out, float f) {
  char buf[4];
  std::memcpy(buf, &f, 4);
  out.append(buf, 4);
}

Eigen::Vector3d FacetNormal(const TriangleMesh& mesh, int t) {
  const Eigen::Vector3d n = (mesh.Corner(t, 1) - mesh.Corner(t, 0))
                                .cross(mesh.Corner(t, 2) - mesh.Corner(t, 0));
  const double len = n.norm();
  return len > 0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
}

}  // namespace

Eigen::AlignedBox3d TriangleMesh::Bounds() const {
  Eigen::AlignedBox3d box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

double TriangleMesh::BoundsDiagonal() const {
  if (vertices.empty()) return 0.0;
  return Bounds().diagonal().norm();
}

StlParseResult ParseStl(std::string_view bytes, std::string part_id,
                        const StlParseOptions& options) {
  const std::vector<RawTriangle> raw =
      LooksAscii(bytes) ? ReadAscii(bytes) : ReadBinary(bytes);

  StlParseResult result;
  result.triangles_in_file = static_cast<int>(raw.size());
  result.mesh.part_id = std::move(part_id);

  Eigen::AlignedBox3d box;
  for (const auto& t : raw) {
    for (const auto& p : t.p) box.extend(p);
  }
  double tol = options.merge_tolerance;
  if (!(tol > 0)) {
    tol = 1e-9 * std::max(1.0, raw.empty() ? 0.0 : box.diagonal().norm());
  }

  std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
  auto key_of = [&](const Eigen::Vector3d& p) {
    return CellKey{static_cast<int64_t>(std::floor(p.x() / tol)),
                   static_cast<int64_t>(std::floor(p.y() / tol)),
                   static_cast<int64_t>(std::floor(p.z() / tol))};
  };
  auto vertex_id = [&](const Eigen::Vector3d& p) {
    const CellKey k = key_of(p);
    for (int64_t dx = -1; dx <= 1; ++dx) {
      for (int64_t dy = -1; dy <= 1; ++dy) {
        for (int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == grid.end()) continue;
          for (int id : it->second) {
            if ((result.mesh.vertices[id] - p).norm() <= tol) return id;
          }
        }
      }
    }
    const int id = static_cast<int>(result.mesh.vertices.size());
    result.mesh.vertices.push_back(p);
    grid[k].push_back(id);
    return id;
  };

  for (const auto& t : raw) {
    std::array<int, 3> idx{vertex_id(t.p[0]), vertex_id(t.p[1]),
                           vertex_id(t.p[2])};
    const Eigen::Vector3d& a = result.mesh.vertices[idx[0]];
    const double area2 = (result.mesh.vertices[idx[1]] - a)
                             .cross(result.mesh.vertices[idx[2]] - a)
                             .norm();
    if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] ||
        area2 <= tol * tol) {
      ++result.degenerate_dropped;
      continue;
    }
    result.mesh.triangles.push_back(idx);
  }
  return result;
}

std::string WriteStlBinary(const TriangleMesh& mesh) {
  // The header must not start with "solid" or readers take it for ASCII.
  std::string out(kHeaderBytes, '\0');
  const std::string header = "binary STL " + mesh.part_id;
  out.replace(0, std::min(header.size(), kHeaderBytes), header, 0,
              std::min(header.size(), kHeaderBytes));
  const uint32_t n = static_cast<uint32_t>(mesh.triangles.size());
  char count[4];
  std::memcpy(count, &n, 4);
  out.append(count, 4);
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const Eigen::Vector3d normal = FacetNormal(mesh, t);
    for (int k = 0; k < 3; ++k) AppendFloat(out, static_cast<float>(normal[k]));
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d p = mesh.Corner(t, c);
      for (int k = 0; k < 3; ++k) AppendFloat(out, static_cast<float>(p[k]));
    }
    out.append(2, '\0');
  }
  return out;
}

std::string WriteStlAscii(const TriangleMesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  const std::string name = mesh.part_id.empty() ? "mesh" : mesh.part_id;
  out << "solid " << name << "\n";
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const Eigen::Vector3d n = FacetNormal(mesh, t);
    out << "  facet normal " << n.x() << " " << n.y() << " " << n.z() << "\n"
        << "    outer loop\n";
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d p = mesh.Corner(t, c);
      out << "      vertex " << p.x() << " " << p.y() << " " << p.z() << "\n";
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid " << name << "\n";
  return out.str();
}

TriangleMesh Transformed(const TriangleMesh& mesh,
                         const Eigen::Isometry3d& transform) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = transform * v;
  return out;
}

TriangleMesh MakeBox(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                     std::string part_id) {
  TriangleMesh m;
  m.part_id = std::move(part_id);
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(),
                            (i & 4) ? hi.z() : lo.z());
  }
  // Outward winding, two triangles per face.
  m.triangles = {{0, 2, 1}, {1, 2, 3},   // z = lo
                 {4, 5, 6}, {5, 7, 6},   // z = hi
                 {0, 1, 4}, {1, 5, 4},   // y = lo
                 {2, 6, 3}, {3, 6, 7},   // y = hi
                 {0, 4, 2}, {2, 4, 6},   // x = lo
                 {1, 3, 5}, {3, 7, 5}};  // x = hi
  return m;
}

TriangleMesh MergeMeshes(const std::vector<TriangleMesh>& meshes,
                         std::string part_id) {
  TriangleMesh out;
  out.part_id = std::move(part_id);
  for (const TriangleMesh& m : meshes) {
    const int offset = static_cast<int>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (auto t : m.triangles) {
      out.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    }
  }
  return out;
}

}  // namespace asmline
