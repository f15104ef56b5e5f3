#include "elastomon/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "elastomon/errors.hpp"

namespace elastomon::io {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw InvalidArgument("non-numeric entry in '" + path + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw InvalidArgument("ragged rows in '" + path + "'");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

void write_scalar(const std::string& path, double value) {
  auto out = open_out(path);
  out << format_double(value) << '\n';
}

double read_scalar(const std::string& path) {
  std::ifstream in(path);
  double v = 0.0;
  if (!(in >> v)) throw InvalidArgument("cannot read a number from '" + path + "'");
  return v;
}

void write_voxels_csv(const std::string& path, const std::vector<VoxelRow>& rows) {
  auto out = open_out(path);
  out << "pixel,ix,iy,iz,nu,kappa,lambda,mu,inside_truth\n";
  for (const auto& r : rows) {
    out << r.pixel << ',' << r.index[0] << ',' << r.index[1] << ',' << r.index[2] << ',' << format_double(r.nu) << ','
        << format_double(r.kappa) << ',' << format_double(r.lambda) << ',' << format_double(r.mu) << ','
        << (r.inside_truth ? 1 : 0) << '\n';
  }
}

void write_constraints_csv(const std::string& path, const MonRegConstraints& c) {
  auto out = open_out(path);
  out << "k,beta_k,bound_k\n";
  for (std::size_t k = 0; k < c.beta.size(); ++k) {
    out << k << ',' << format_double(c.beta[k]) << ',' << format_double(c.bound(k)) << '\n';
  }
}

void write_vtk(const std::string& path, const BoxMesh& mesh, const std::map<std::string, std::vector<double>>& cell_data) {
  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\nelastomon mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& p : mesh.nodes) out << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2]) << '\n';
  out << "CELLS " << mesh.tet_count() << ' ' << 5 * mesh.tet_count() << '\n';
  for (const auto& t : mesh.tets) out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  out << "CELL_TYPES " << mesh.tet_count() << '\n';
  for (std::size_t t = 0; t < mesh.tet_count(); ++t) out << "10\n";
  if (cell_data.empty()) return;
  out << "CELL_DATA " << mesh.tet_count() << '\n';
  for (const auto& [name, values] : cell_data) {
    if (values.size() != mesh.tet_count()) throw InvalidArgument("cell data '" + name + "' has the wrong length");
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) out << format_double(v) << '\n';
  }
}

std::string mesh_hash(const BoxMesh& mesh) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& p : mesh.nodes) mix(p.data(), 3 * sizeof(double));
  for (const auto& t : mesh.tets) mix(t.data(), sizeof t);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace elastomon::io
