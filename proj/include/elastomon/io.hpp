#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "elastomon/mesh.hpp"
#include "elastomon/monreg.hpp"

namespace elastomon::io {

/// Shortest-roundtrip-safe formatting: 17 significant digits.
std::string format_double(double value);

/// Full matrix, row-major, comma-separated, LF line endings.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

void write_scalar(const std::string& path, double value);
double read_scalar(const std::string& path);

struct VoxelRow {
  int pixel = 0;
  std::array<int, 3> index{};
  double nu = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  bool inside_truth = false;
};

/// Header: pixel,ix,iy,iz,nu,kappa,lambda,mu,inside_truth
void write_voxels_csv(const std::string& path, const std::vector<VoxelRow>& rows);

/// Header: k,beta_k,bound_k with bound_k = min(a_max, beta_k).
void write_constraints_csv(const std::string& path, const MonRegConstraints& constraints);

/// VTK legacy ASCII unstructured grid with optional per-cell scalars.
void write_vtk(const std::string& path, const BoxMesh& mesh, const std::map<std::string, std::vector<double>>& cell_data);

/// FNV-1a hash over node coordinates and connectivity, as 16 hex digits.
std::string mesh_hash(const BoxMesh& mesh);

}  // namespace elastomon::io
