#include "elastomon/fem.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "elastomon/errors.hpp"

namespace elastomon {

LameField LameField::homogeneous(std::size_t elements, double lambda0, double mu0) {
  LameField f;
  f.lambda.assign(elements, lambda0);
  f.mu.assign(elements, mu0);
  return f;
}

void LameField::validate(std::size_t elements) const {
  if (lambda.size() != elements || mu.size() != elements) {
    throw InvalidArgument("Lame field size does not match the element count");
  }
  for (std::size_t e = 0; e < elements; ++e) {
    if (!(lambda[e] > 0.0) || !(mu[e] > 0.0) || !std::isfinite(lambda[e]) || !std::isfinite(mu[e])) {
      throw InvalidArgument("Lame parameters must be finite and strictly positive (element " + std::to_string(e) +
                            ")");
    }
  }
}

ElementGeometry compute_geometry(const BoxMesh& mesh) {
  ElementGeometry geo;
  geo.grads.resize(mesh.tet_count());
  geo.volume.resize(mesh.tet_count());
  for (std::size_t t = 0; t < mesh.tet_count(); ++t) {
    const auto& tet = mesh.tets[t];
    Eigen::Matrix3d jac;
    for (int c = 0; c < 3; ++c) jac.col(c) = mesh.nodes[tet[c + 1]] - mesh.nodes[tet[0]];
    const double det = jac.determinant();
    if (!(det > 0.0)) throw InvalidArgument("degenerate or inverted tetrahedron " + std::to_string(t));
    // Rows of J^{-1} are the gradients of hat functions 1..3.
    const Eigen::Matrix3d inv = jac.inverse();
    Eigen::Matrix<double, 4, 3> g;
    g.row(1) = inv.row(0);
    g.row(2) = inv.row(1);
    g.row(3) = inv.row(2);
    g.row(0) = -(g.row(1) + g.row(2) + g.row(3));
    geo.grads[t] = g;
    geo.volume[t] = det / 6.0;
  }
  return geo;
}

DofMap build_dof_map(const BoxMesh& mesh, Face dirichlet_face) {
  DofMap map;
  map.node_dof.assign(mesh.node_count(), -1);
  const int axis = face_axis(dirichlet_face);
  const double plane = face_is_max(dirichlet_face) ? mesh.origin[axis] + mesh.extents[axis] : mesh.origin[axis];
  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    if (mesh.nodes[n][axis] == plane) continue;
    map.node_dof[n] = map.free_dofs;
    map.free_dofs += 3;
  }
  return map;
}

ElementStiffness element_stiffness(const Eigen::Matrix<double, 4, 3>& grads, double volume) {
  ElementStiffness ke;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double gab = grads.row(a).dot(grads.row(b));
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          ke.lambda_part(3 * a + i, 3 * b + j) = volume * grads(a, i) * grads(b, j);
          ke.mu_part(3 * a + i, 3 * b + j) = volume * ((i == j ? gab : 0.0) + grads(a, j) * grads(b, i));
        }
      }
    }
  }
  return ke;
}

SparseMatrix assemble_stiffness(const BoxMesh& mesh, const ElementGeometry& geometry, const DofMap& dofs,
                                const LameField& field) {
  field.validate(mesh.tet_count());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.tet_count() * 144);
  for (std::size_t t = 0; t < mesh.tet_count(); ++t) {
    const auto ke = element_stiffness(geometry.grads[t], geometry.volume[t]);
    const Eigen::Matrix<double, 12, 12> k = field.lambda[t] * ke.lambda_part + field.mu[t] * ke.mu_part;
    const auto& tet = mesh.tets[t];
    for (int a = 0; a < 4; ++a) {
      const int ra = dofs.node_dof[tet[a]];
      if (ra < 0) continue;
      for (int b = 0; b < 4; ++b) {
        const int cb = dofs.node_dof[tet[b]];
        if (cb < 0) continue;
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            triplets.emplace_back(ra + i, cb + j, k(3 * a + i, 3 * b + j));
          }
        }
      }
    }
  }
  SparseMatrix K(dofs.free_dofs, dofs.free_dofs);
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

SparseMatrix assemble_stiffness(const BoxMesh& mesh, const LameField& field, Face dirichlet_face) {
  return assemble_stiffness(mesh, compute_geometry(mesh), build_dof_map(mesh, dirichlet_face), field);
}

Eigen::VectorXd assemble_patch_load(const BoxMesh& mesh, const DofMap& dofs, const PatchSet& patches, int l) {
  if (l < 0 || l >= patches.size()) throw InvalidArgument("patch index out of range");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dofs.free_dofs);
  const Patch& patch = patches.patches[l];
  for (int t : patch.tris) {
    const double share = mesh.tri_area(t) / 3.0;
    for (int n : mesh.boundary_tris[t].nodes) {
      const int d = dofs.node_dof[n];
      if (d < 0) continue;
      f.segment<3>(d) += share * patch.traction;
    }
  }
  return f;
}

DisplacementField expand_displacement(const DofMap& dofs, const Eigen::VectorXd& free_values) {
  DisplacementField u;
  u.nodal.setZero(static_cast<Eigen::Index>(dofs.node_dof.size()), 3);
  for (std::size_t n = 0; n < dofs.node_dof.size(); ++n) {
    const int d = dofs.node_dof[n];
    if (d >= 0) u.nodal.row(static_cast<Eigen::Index>(n)) = free_values.segment<3>(d).transpose();
  }
  return u;
}

Eigen::VectorXd restrict_displacement(const DofMap& dofs, const DisplacementField& u) {
  Eigen::VectorXd v(dofs.free_dofs);
  for (std::size_t n = 0; n < dofs.node_dof.size(); ++n) {
    const int d = dofs.node_dof[n];
    if (d >= 0) v.segment<3>(d) = u.at(n);
  }
  return v;
}

std::string_view solver_name(LinearSolverKind kind) {
  return kind == LinearSolverKind::SparseCholesky ? "sparse-cholesky" : "conjugate-gradient";
}

struct ElasticSolver::Impl {
  SparseMatrix K;
  double tol = 1e-10;
  LinearSolverKind kind = LinearSolverKind::SparseCholesky;
  Eigen::SimplicialLLT<SparseMatrix> llt;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
};

ElasticSolver::ElasticSolver(SparseMatrix stiffness, double tol) : impl_(std::make_unique<Impl>()) {
  if (!(tol > 0.0) || tol > 1e-6) throw InvalidArgument("solver tolerance must lie in (0, 1e-6]");
  impl_->K = std::move(stiffness);
  impl_->tol = tol;
  impl_->llt.compute(impl_->K);
  if (impl_->llt.info() != Eigen::Success) {
    impl_->kind = LinearSolverKind::ConjugateGradient;
    impl_->cg.setTolerance(std::min(tol, 1e-10));
    impl_->cg.setMaxIterations(20 * static_cast<Eigen::Index>(impl_->K.rows()) + 100);
    impl_->cg.compute(impl_->K);
    if (impl_->cg.info() != Eigen::Success) {
      throw NumericalFailure("stiffness matrix is singular or indefinite: Cholesky and CG setup both failed");
    }
  }
}

ElasticSolver::~ElasticSolver() = default;

LinearSolverKind ElasticSolver::kind() const { return impl_->kind; }

const SparseMatrix& ElasticSolver::stiffness() const { return impl_->K; }

Eigen::VectorXd ElasticSolver::solve(const Eigen::VectorXd& load) const {
  if (load.size() != impl_->K.rows()) throw InvalidArgument("load vector size does not match the stiffness matrix");
  const double load_norm = load.norm();
  if (load_norm == 0.0) return Eigen::VectorXd::Zero(load.size());

  Eigen::VectorXd u;
  if (impl_->kind == LinearSolverKind::SparseCholesky) {
    u = impl_->llt.solve(load);
    // One step of iterative refinement keeps the residual near machine precision.
    Eigen::VectorXd r = load - impl_->K * u;
    if (r.norm() > impl_->tol * load_norm) {
      u += impl_->llt.solve(r);
    }
  } else {
    u = impl_->cg.solve(load);
    if (impl_->cg.info() != Eigen::Success) throw NumericalFailure("conjugate gradient did not converge");
  }
  const double residual = (impl_->K * u - load).norm();
  if (!std::isfinite(residual) || residual > impl_->tol * load_norm) {
    throw NumericalFailure("elastic solve residual " + std::to_string(residual / load_norm) +
                           " exceeds the requested tolerance");
  }
  return u;
}

Eigen::VectorXd solve_displacement(const SparseMatrix& stiffness, const Eigen::VectorXd& load, double tol) {
  ElasticSolver solver(stiffness, tol);
  return solver.solve(load);
}

ForwardSolution compute_forward(const BoxMesh& mesh, const LameField& field, const PatchSet& patches, double tol) {
  const ElementGeometry geo = compute_geometry(mesh);
  const DofMap dofs = build_dof_map(mesh, patches.dirichlet_face);
  ElasticSolver solver(assemble_stiffness(mesh, geo, dofs, field), tol);

  const int m = patches.size();
  std::vector<Eigen::VectorXd> loads(m), sols(m);
  for (int l = 0; l < m; ++l) loads[l] = assemble_patch_load(mesh, dofs, patches, l);

  ForwardSolution out;
  out.solver = solver.kind();
  for (int k = 0; k < m; ++k) {
    sols[k] = solver.solve(loads[k]);
    const double work = loads[k].dot(sols[k]);
    const double energy = sols[k].dot(solver.stiffness() * sols[k]);
    out.max_energy_mismatch = std::max(out.max_energy_mismatch, std::abs(work - energy) / std::abs(work));
  }

  out.ntd.resize(m, m);
  for (int l = 0; l < m; ++l) {
    for (int k = 0; k < m; ++k) out.ntd(l, k) = loads[l].dot(sols[k]);
  }
  out.displacements.reserve(m);
  for (int k = 0; k < m; ++k) out.displacements.push_back(expand_displacement(dofs, sols[k]));
  return out;
}

Eigen::MatrixXd compute_ntd(const BoxMesh& mesh, const LameField& field, const PatchSet& patches, double tol) {
  return compute_forward(mesh, field, patches, tol).ntd;
}

Eigen::Matrix3d displacement_gradient(const BoxMesh& mesh, const ElementGeometry& geometry,
                                      const DisplacementField& u, std::size_t tet) {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  const auto& nodes = mesh.tets[tet];
  for (int a = 0; a < 4; ++a) {
    g += u.at(nodes[a]) * geometry.grads[tet].row(a);
  }
  return g;
}

double weighted_energy(const BoxMesh& mesh, const ElementGeometry& geometry, const std::vector<double>& dlambda,
                       const std::vector<double>& dmu, const DisplacementField& u, const DisplacementField& v) {
  if (dlambda.size() != mesh.tet_count() || dmu.size() != mesh.tet_count()) {
    throw InvalidArgument("weight arrays must have one entry per element");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.tet_count(); ++t) {
    if (dlambda[t] == 0.0 && dmu[t] == 0.0) continue;
    const Eigen::Matrix3d gu = displacement_gradient(mesh, geometry, u, t);
    const Eigen::Matrix3d gv = displacement_gradient(mesh, geometry, v, t);
    const Eigen::Matrix3d eu = 0.5 * (gu + gu.transpose());
    const Eigen::Matrix3d ev = 0.5 * (gv + gv.transpose());
    total += geometry.volume[t] * (2.0 * dmu[t] * (eu.array() * ev.array()).sum() + dlambda[t] * gu.trace() * gv.trace());
  }
  return total;
}

}  // namespace elastomon
