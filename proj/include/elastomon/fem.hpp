#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "elastomon/mesh.hpp"

namespace elastomon {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Piecewise-constant Lamé parameters, one pair per tetrahedron (Pa).
struct LameField {
  std::vector<double> lambda;
  std::vector<double> mu;

  static LameField homogeneous(std::size_t elements, double lambda0, double mu0);

  [[nodiscard]] std::size_t size() const { return lambda.size(); }
  /// Throws InvalidArgument unless both arrays have `elements` entries, all > 0.
  void validate(std::size_t elements) const;
};

/// Constant basis-function gradients and volumes of every tetrahedron.
struct ElementGeometry {
  std::vector<Eigen::Matrix<double, 4, 3>> grads;  // row a = grad of hat function a
  std::vector<double> volume;
};

ElementGeometry compute_geometry(const BoxMesh& mesh);

/// Mapping of nodal displacement components to unknowns after clamping one face.
struct DofMap {
  std::vector<int> node_dof;  // first of three consecutive dofs, -1 when clamped
  int free_dofs = 0;

  [[nodiscard]] bool is_clamped(std::size_t node) const { return node_dof[node] < 0; }
};

DofMap build_dof_map(const BoxMesh& mesh, Face dirichlet_face);

/// 12x12 element blocks, ordered (node a, component i) -> 3a+i. The full
/// element matrix is lambda * lambda_part + mu * mu_part.
struct ElementStiffness {
  Eigen::Matrix<double, 12, 12> lambda_part;
  Eigen::Matrix<double, 12, 12> mu_part;
};

ElementStiffness element_stiffness(const Eigen::Matrix<double, 4, 3>& grads, double volume);

/// Global stiffness on the free dofs (clamped rows and columns eliminated).
SparseMatrix assemble_stiffness(const BoxMesh& mesh, const ElementGeometry& geometry, const DofMap& dofs,
                                const LameField& field);
SparseMatrix assemble_stiffness(const BoxMesh& mesh, const LameField& field, Face dirichlet_face = Face::ZMinus);

/// Consistent nodal load of patch `l` restricted to the free dofs.
Eigen::VectorXd assemble_patch_load(const BoxMesh& mesh, const DofMap& dofs, const PatchSet& patches, int l);

/// Nodal displacements; clamped nodes hold exact zeros.
struct DisplacementField {
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> nodal;

  [[nodiscard]] Vec3 at(std::size_t node) const { return nodal.row(static_cast<Eigen::Index>(node)).transpose(); }
};

DisplacementField expand_displacement(const DofMap& dofs, const Eigen::VectorXd& free_values);
Eigen::VectorXd restrict_displacement(const DofMap& dofs, const DisplacementField& u);

enum class LinearSolverKind { SparseCholesky, ConjugateGradient };
std::string_view solver_name(LinearSolverKind kind);

/// Factorizes the stiffness once and reuses it for every load. Falls back to
/// preconditioned CG (relative residual 1e-10) when the factorization fails.
class ElasticSolver {
public:
  ElasticSolver(SparseMatrix stiffness, double tol);
  ElasticSolver(const ElasticSolver&) = delete;
  ElasticSolver& operator=(const ElasticSolver&) = delete;
  ~ElasticSolver();

  /// Returns u with ||K u - load|| <= tol * ||load||; throws NumericalFailure otherwise.
  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& load) const;
  [[nodiscard]] LinearSolverKind kind() const;
  [[nodiscard]] const SparseMatrix& stiffness() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot solve. Throws InvalidArgument for tol outside (0, 1e-6].
Eigen::VectorXd solve_displacement(const SparseMatrix& stiffness, const Eigen::VectorXd& load, double tol);

struct ForwardSolution {
  Eigen::MatrixXd ntd;                          // M x M, entry (l, k) = <g_l, u_k>
  std::vector<DisplacementField> displacements;  // one per patch load
  LinearSolverKind solver = LinearSolverKind::SparseCholesky;
  double max_energy_mismatch = 0.0;             // max_k |f_k.u_k - u_k.K u_k| / |f_k.u_k|
};

ForwardSolution compute_forward(const BoxMesh& mesh, const LameField& field, const PatchSet& patches, double tol);

/// NtD matrix only.
Eigen::MatrixXd compute_ntd(const BoxMesh& mesh, const LameField& field, const PatchSet& patches, double tol);

/// 3x3 displacement gradient of u on tetrahedron `tet`.
Eigen::Matrix3d displacement_gradient(const BoxMesh& mesh, const ElementGeometry& geometry,
                                      const DisplacementField& u, std::size_t tet);

/// Integral over the domain of 2 dmu eps(u):eps(v) + dlambda div(u) div(v)
/// for per-element weights.
double weighted_energy(const BoxMesh& mesh, const ElementGeometry& geometry, const std::vector<double>& dlambda,
                       const std::vector<double>& dmu, const DisplacementField& u, const DisplacementField& v);

}  // namespace elastomon
