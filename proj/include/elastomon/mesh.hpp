#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace elastomon {

using Vec3 = Eigen::Vector3d;

/// The six faces of an axis-aligned box.
enum class Face : std::uint8_t { XMinus, XPlus, YMinus, YPlus, ZMinus, ZPlus };

inline constexpr std::array<Face, 6> kAllFaces = {Face::XMinus, Face::XPlus, Face::YMinus,
                                                  Face::YPlus,  Face::ZMinus, Face::ZPlus};

std::string_view face_name(Face face);
/// Accepts "x-", "x+", ..., "z+". Throws InvalidArgument otherwise.
Face parse_face(std::string_view name);
/// Coordinate axis (0, 1, 2) normal to the face.
int face_axis(Face face);
bool face_is_max(Face face);
Vec3 face_normal(Face face);

struct GridSize {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  [[nodiscard]] long long count() const { return 1LL * nx * ny * nz; }
  [[nodiscard]] int operator[](int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  friend bool operator==(const GridSize&, const GridSize&) = default;
};

struct BoundaryTri {
  std::array<int, 3> nodes;
  Face face;
};

/// Structured tetrahedral mesh of an axis-aligned box. Each hexahedral cell
/// is split into six tetrahedra around its main diagonal, so neighbouring
/// cells agree on the split of their shared face.
struct BoxMesh {
  Vec3 origin = Vec3::Zero();
  Vec3 extents = Vec3::Ones();
  GridSize resolution;
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 4>> tets;
  std::vector<BoundaryTri> boundary_tris;

  [[nodiscard]] std::size_t node_count() const { return nodes.size(); }
  [[nodiscard]] std::size_t tet_count() const { return tets.size(); }

  [[nodiscard]] double signed_volume(std::size_t tet) const;
  [[nodiscard]] Vec3 centroid(std::size_t tet) const;
  [[nodiscard]] double tri_area(std::size_t tri) const;
  [[nodiscard]] Vec3 tri_centroid(std::size_t tri) const;
  /// Index of the hexahedral cell (along each axis) containing the point.
  [[nodiscard]] std::array<int, 3> cell_of(const Vec3& point) const;
};

BoxMesh build_box_mesh(const Vec3& origin, const Vec3& extents, GridSize resolution);

/// Voxel partition of the mesh; every pixel is a union of whole hex cells.
struct PixelPartition {
  GridSize pixel_resolution;
  std::vector<int> element_to_pixel;
  std::vector<std::vector<int>> pixel_elements;

  [[nodiscard]] int pixel_count() const { return static_cast<int>(pixel_elements.size()); }
  [[nodiscard]] int pixel_index(int ix, int iy, int iz) const {
    return ix + pixel_resolution.nx * (iy + pixel_resolution.ny * iz);
  }
  [[nodiscard]] std::array<int, 3> pixel_coords(int k) const;
};

PixelPartition build_pixel_partition(const BoxMesh& mesh, GridSize pixel_resolution);

struct Patch {
  Face face;
  int iu = 0;  // cell index along the first in-plane axis
  int iv = 0;  // cell index along the second in-plane axis
  std::vector<int> tris;
  double area = 0.0;
  /// Constant traction on the patch: outward normal scaled to unit L2 norm.
  Vec3 traction = Vec3::Zero();
};

/// Neumann patches on the five faces that are not clamped.
struct PatchSet {
  Face dirichlet_face = Face::ZMinus;
  int per_face_grid = 1;
  std::vector<Patch> patches;

  [[nodiscard]] int size() const { return static_cast<int>(patches.size()); }
};

PatchSet build_patch_set(const BoxMesh& mesh, int per_face_grid, Face dirichlet_face = Face::ZMinus);

/// Boundary L2 Gram matrix of the patch tractions.
Eigen::MatrixXd traction_gram(const BoxMesh& mesh, const PatchSet& patches);

}  // namespace elastomon
