#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "elastomon/io.hpp"

using namespace elastomon;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("matrix CSV round-trip is exact") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(7, 7);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng) * std::pow(10.0, static_cast<int>(i % 30) - 15);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -0.0;
  const std::string path = "io_tmp_matrix.csv";
  io::write_matrix_csv(path, m);
  const Eigen::MatrixXd back = io::read_matrix_csv(path);
  CHECK(back == m);
  CHECK(slurp(path).find('\r') == std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("malformed CSV is rejected") {
  const std::string path = "io_tmp_bad.csv";
  std::ofstream(path) << "1,2\n3\n";
  CHECK_THROWS_AS(io::read_matrix_csv(path), InvalidArgument);
  std::ofstream(path) << "1,x\n";
  CHECK_THROWS_AS(io::read_matrix_csv(path), InvalidArgument);
  std::remove(path.c_str());
  CHECK_THROWS_AS(io::read_matrix_csv("no_such_file.csv"), InvalidArgument);
}

TEST_CASE("voxel CSV header and rows") {
  const std::string path = "io_tmp_voxels.csv";
  io::VoxelRow r;
  r.pixel = 3;
  r.index = {1, 1, 0};
  r.nu = 0.5;
  r.kappa = 1.5;
  r.lambda = 2.0;
  r.mu = 3.0;
  r.inside_truth = true;
  io::write_voxels_csv(path, {r});
  CHECK(slurp(path) == "pixel,ix,iy,iz,nu,kappa,lambda,mu,inside_truth\n3,1,1,0,0.5,1.5,2,3,1\n");
  std::remove(path.c_str());
}

TEST_CASE("constraints CSV") {
  MonRegConstraints c;
  c.a_max = 2.0;
  c.beta = {1.0, 4.0};
  const std::string path = "io_tmp_constraints.csv";
  io::write_constraints_csv(path, c);
  CHECK(slurp(path) == "k,beta_k,bound_k\n0,1,1\n1,4,2\n");
  std::remove(path.c_str());
}

TEST_CASE("VTK writer layout") {
  const auto mesh = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {1, 1, 1});
  const std::string path = "io_tmp.vtk";
  io::write_vtk(path, mesh, {{"value", std::vector<double>(6, 1.0)}});
  const std::string s = slurp(path);
  CHECK(s.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(s.find("POINTS 8 double") != std::string::npos);
  CHECK(s.find("CELLS 6 30") != std::string::npos);
  CHECK(s.find("CELL_DATA 6") != std::string::npos);
  CHECK_THROWS_AS(io::write_vtk(path, mesh, {{"bad", std::vector<double>(5, 1.0)}}), InvalidArgument);
  std::remove(path.c_str());
}

TEST_CASE("mesh hash distinguishes meshes and is stable") {
  const auto a = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {2, 2, 2});
  const auto b = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {2, 2, 3});
  CHECK(io::mesh_hash(a) == io::mesh_hash(build_box_mesh(Vec3::Zero(), Vec3::Ones(), {2, 2, 2})));
  CHECK(io::mesh_hash(a) != io::mesh_hash(b));
  CHECK(io::mesh_hash(a).size() == 16);
}
