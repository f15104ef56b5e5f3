#include "elastomon/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "elastomon/errors.hpp"

namespace elastomon {

std::string_view face_name(Face face) {
  switch (face) {
    case Face::XMinus: return "x-";
    case Face::XPlus: return "x+";
    case Face::YMinus: return "y-";
    case Face::YPlus: return "y+";
    case Face::ZMinus: return "z-";
    case Face::ZPlus: return "z+";
  }
  return "?";
}

Face parse_face(std::string_view name) {
  for (Face f : kAllFaces) {
    if (face_name(f) == name) return f;
  }
  throw InvalidArgument("unknown face label '" + std::string(name) + "' (expected x-, x+, y-, y+, z- or z+)");
}

int face_axis(Face face) { return static_cast<int>(face) / 2; }

bool face_is_max(Face face) { return static_cast<int>(face) % 2 == 1; }

Vec3 face_normal(Face face) {
  Vec3 n = Vec3::Zero();
  n[face_axis(face)] = face_is_max(face) ? 1.0 : -1.0;
  return n;
}

double BoxMesh::signed_volume(std::size_t tet) const {
  const auto& t = tets[tet];
  const Vec3 a = nodes[t[1]] - nodes[t[0]];
  const Vec3 b = nodes[t[2]] - nodes[t[0]];
  const Vec3 c = nodes[t[3]] - nodes[t[0]];
  return a.dot(b.cross(c)) / 6.0;
}

Vec3 BoxMesh::centroid(std::size_t tet) const {
  const auto& t = tets[tet];
  return 0.25 * (nodes[t[0]] + nodes[t[1]] + nodes[t[2]] + nodes[t[3]]);
}

double BoxMesh::tri_area(std::size_t tri) const {
  const auto& n = boundary_tris[tri].nodes;
  return 0.5 * (nodes[n[1]] - nodes[n[0]]).cross(nodes[n[2]] - nodes[n[0]]).norm();
}

Vec3 BoxMesh::tri_centroid(std::size_t tri) const {
  const auto& n = boundary_tris[tri].nodes;
  return (nodes[n[0]] + nodes[n[1]] + nodes[n[2]]) / 3.0;
}

std::array<int, 3> BoxMesh::cell_of(const Vec3& point) const {
  std::array<int, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double h = extents[a] / resolution[a];
    int i = static_cast<int>(std::floor((point[a] - origin[a]) / h));
    idx[a] = std::clamp(i, 0, resolution[a] - 1);
  }
  return idx;
}

namespace {

void check_grid(const GridSize& g, const char* what) {
  if (g.nx < 1 || g.ny < 1 || g.nz < 1) {
    throw InvalidArgument(std::string(what) + " components must be >= 1");
  }
}

}  // namespace

BoxMesh build_box_mesh(const Vec3& origin, const Vec3& extents, GridSize resolution) {
  check_grid(resolution, "mesh resolution");
  if (!(extents.array() > 0.0).all() || !extents.allFinite()) {
    throw InvalidArgument("mesh extents must be positive");
  }

  BoxMesh mesh;
  mesh.origin = origin;
  mesh.extents = extents;
  mesh.resolution = resolution;

  const int nx = resolution.nx, ny = resolution.ny, nz = resolution.nz;
  auto node_id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        // Endpoints are set exactly so box faces are flat to the last bit.
        Vec3 p;
        p[0] = i == nx ? origin[0] + extents[0] : origin[0] + extents[0] * i / nx;
        p[1] = j == ny ? origin[1] + extents[1] : origin[1] + extents[1] * j / ny;
        p[2] = k == nz ? origin[2] + extents[2] : origin[2] + extents[2] * k / nz;
        mesh.nodes.push_back(p);
      }
    }
  }

  // Kuhn subdivision: one tet per monotone path from corner 000 to 111.
  static constexpr std::array<std::array<int, 3>, 6> kAxisOrders = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  mesh.tets.reserve(static_cast<std::size_t>(6 * resolution.count()));
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        for (const auto& order : kAxisOrders) {
          std::array<int, 3> c = {i, j, k};
          std::array<int, 4> tet{};
          tet[0] = node_id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[order[s]];
            tet[s + 1] = node_id(c[0], c[1], c[2]);
          }
          mesh.tets.push_back(tet);
          if (mesh.signed_volume(mesh.tets.size() - 1) < 0.0) {
            std::swap(mesh.tets.back()[2], mesh.tets.back()[3]);
          }
        }
      }
    }
  }

  // A tet face is on the boundary iff all three nodes sit on the same box face.
  auto node_ijk = [&](int id) {
    std::array<int, 3> ijk{};
    ijk[0] = id % (nx + 1);
    ijk[1] = (id / (nx + 1)) % (ny + 1);
    ijk[2] = id / ((nx + 1) * (ny + 1));
    return ijk;
  };
  static constexpr std::array<std::array<int, 3>, 4> kTetFaces = {
      {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};
  for (const auto& tet : mesh.tets) {
    for (const auto& lf : kTetFaces) {
      const std::array<int, 3> tri = {tet[lf[0]], tet[lf[1]], tet[lf[2]]};
      const auto a = node_ijk(tri[0]), b = node_ijk(tri[1]), c = node_ijk(tri[2]);
      for (Face f : kAllFaces) {
        const int ax = face_axis(f);
        const int plane = face_is_max(f) ? resolution[ax] : 0;
        if (a[ax] == plane && b[ax] == plane && c[ax] == plane) {
          mesh.boundary_tris.push_back({tri, f});
          break;
        }
      }
    }
  }
  return mesh;
}

std::array<int, 3> PixelPartition::pixel_coords(int k) const {
  const int px = pixel_resolution.nx, py = pixel_resolution.ny;
  return {k % px, (k / px) % py, k / (px * py)};
}

PixelPartition build_pixel_partition(const BoxMesh& mesh, GridSize pixel_resolution) {
  check_grid(pixel_resolution, "pixel resolution");
  for (int a = 0; a < 3; ++a) {
    if (mesh.resolution[a] % pixel_resolution[a] != 0) {
      throw InvalidArgument("mesh resolution must be an integer multiple of the pixel resolution on every axis");
    }
  }
  PixelPartition part;
  part.pixel_resolution = pixel_resolution;
  part.pixel_elements.resize(static_cast<std::size_t>(pixel_resolution.count()));
  part.element_to_pixel.resize(mesh.tet_count());
  for (std::size_t t = 0; t < mesh.tet_count(); ++t) {
    const auto cell = mesh.cell_of(mesh.centroid(t));
    std::array<int, 3> pix{};
    for (int a = 0; a < 3; ++a) {
      pix[a] = cell[a] / (mesh.resolution[a] / pixel_resolution[a]);
    }
    const int k = part.pixel_index(pix[0], pix[1], pix[2]);
    part.element_to_pixel[t] = k;
    part.pixel_elements[k].push_back(static_cast<int>(t));
  }
  return part;
}

namespace {

std::array<int, 2> in_plane_axes(Face f) {
  switch (face_axis(f)) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

}  // namespace

PatchSet build_patch_set(const BoxMesh& mesh, int per_face_grid, Face dirichlet_face) {
  if (per_face_grid < 1) throw InvalidArgument("per-face patch grid must be >= 1");
  for (Face f : kAllFaces) {
    if (f == dirichlet_face) continue;
    for (int ax : in_plane_axes(f)) {
      if (mesh.resolution[ax] % per_face_grid != 0) {
        throw InvalidArgument("face resolution is not divisible by the per-face patch grid");
      }
    }
  }

  PatchSet set;
  set.dirichlet_face = dirichlet_face;
  set.per_face_grid = per_face_grid;
  const int q = per_face_grid;

  std::array<int, 6> face_offset{};
  face_offset.fill(-1);
  for (Face f : kAllFaces) {
    if (f == dirichlet_face) continue;
    face_offset[static_cast<int>(f)] = set.size();
    for (int iv = 0; iv < q; ++iv) {
      for (int iu = 0; iu < q; ++iu) {
        Patch p;
        p.face = f;
        p.iu = iu;
        p.iv = iv;
        set.patches.push_back(std::move(p));
      }
    }
  }

  for (std::size_t t = 0; t < mesh.boundary_tris.size(); ++t) {
    const Face f = mesh.boundary_tris[t].face;
    const int offset = face_offset[static_cast<int>(f)];
    if (offset < 0) continue;
    const auto axes = in_plane_axes(f);
    const auto cell = mesh.cell_of(mesh.tri_centroid(t));
    const int iu = cell[axes[0]] / (mesh.resolution[axes[0]] / q);
    const int iv = cell[axes[1]] / (mesh.resolution[axes[1]] / q);
    Patch& patch = set.patches[offset + iv * q + iu];
    patch.tris.push_back(static_cast<int>(t));
    patch.area += mesh.tri_area(t);
  }

  for (Patch& p : set.patches) {
    p.traction = face_normal(p.face) / std::sqrt(p.area);
  }
  return set;
}

Eigen::MatrixXd traction_gram(const BoxMesh& mesh, const PatchSet& patches) {
  const int m = patches.size();
  // Tractions are constant per triangle, so a one-point rule is exact.
  std::vector<std::vector<int>> tri_patches(mesh.boundary_tris.size());
  for (int l = 0; l < m; ++l) {
    for (int t : patches.patches[l].tris) tri_patches[t].push_back(l);
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t t = 0; t < tri_patches.size(); ++t) {
    const double area = mesh.tri_area(t);
    for (int l : tri_patches[t]) {
      for (int k : tri_patches[t]) {
        gram(l, k) += patches.patches[l].traction.dot(patches.patches[k].traction) * area;
      }
    }
  }
  return gram;
}

}  // namespace elastomon
