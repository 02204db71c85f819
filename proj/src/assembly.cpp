#include "assembly.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "errors.hpp"
#include "linsolve.hpp"

namespace dleig {

LocalMatrices local_matrices(const Point& p1, const Point& p2, const Point& p3) {
  const double area = triangle_signed_area(p1, p2, p3);
  if (!(std::abs(area) > 0.0)) fail(Status::DegenerateElement, "local_matrices: zero-area triangle");

  // P1 gradients: grad(phi_i) = (b_i, c_i) / (2 area)
  const double b[3] = {p2.y - p3.y, p3.y - p1.y, p1.y - p2.y};
  const double c[3] = {p3.x - p2.x, p1.x - p3.x, p2.x - p1.x};

  LocalMatrices out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.stiffness[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
      out.mass[i][j] = (i == j ? 2.0 : 1.0) * (area / 12.0);
    }
  }
  return out;
}

std::pair<Csr, Csr> assemble_unreduced(const Mesh& mesh) {
  const int nv = mesh.num_vertices();
  CsrBuilder a_builder(nv);
  CsrBuilder m_builder(nv);
  for (const auto& t : mesh.triangles) {
    const auto local = local_matrices(mesh.vertices[static_cast<std::size_t>(t[0])],
                                      mesh.vertices[static_cast<std::size_t>(t[1])],
                                      mesh.vertices[static_cast<std::size_t>(t[2])]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a_builder.add(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)], local.stiffness[i][j]);
        m_builder.add(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)], local.mass[i][j]);
      }
    }
  }
  return {a_builder.build(), m_builder.build()};
}

AssembledSystem assemble(const Mesh& mesh) {
  AssembledSystem sys;
  sys.vertex_to_dof.assign(mesh.vertices.size(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.boundary_flags[static_cast<std::size_t>(v)]) {
      sys.vertex_to_dof[static_cast<std::size_t>(v)] = static_cast<int>(sys.dof_to_vertex.size());
      sys.dof_to_vertex.push_back(v);
    }
  }
  sys.n_dof = static_cast<int>(sys.dof_to_vertex.size());
  if (sys.n_dof == 0) fail(Status::EmptySystem, "assemble: mesh has no interior vertices");

  CsrBuilder a_builder(sys.n_dof);
  CsrBuilder m_builder(sys.n_dof);
  for (const auto& t : mesh.triangles) {
    const auto local = local_matrices(mesh.vertices[static_cast<std::size_t>(t[0])],
                                      mesh.vertices[static_cast<std::size_t>(t[1])],
                                      mesh.vertices[static_cast<std::size_t>(t[2])]);
    for (int i = 0; i < 3; ++i) {
      const int di = sys.vertex_to_dof[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = sys.vertex_to_dof[static_cast<std::size_t>(t[static_cast<std::size_t>(j)])];
        if (dj < 0) continue;
        a_builder.add(di, dj, local.stiffness[i][j]);
        m_builder.add(di, dj, local.mass[i][j]);
      }
    }
  }
  sys.stiffness = a_builder.build();
  sys.mass = m_builder.build();
  return sys;
}

std::vector<double> load_vector(const Mesh& mesh, const AssembledSystem& system, const ScalarField& f) {
  std::vector<double> b(static_cast<std::size_t>(system.n_dof), 0.0);
  for (const auto& t : mesh.triangles) {
    const Point& p0 = mesh.vertices[static_cast<std::size_t>(t[0])];
    const Point& p1 = mesh.vertices[static_cast<std::size_t>(t[1])];
    const Point& p2 = mesh.vertices[static_cast<std::size_t>(t[2])];
    const double area = triangle_signed_area(p0, p1, p2);
    // mid-edge nodes; phi values there are 1/2 on the two adjacent edges, 0 opposite
    const double f01 = f(0.5 * (p0.x + p1.x), 0.5 * (p0.y + p1.y));
    const double f12 = f(0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y));
    const double f20 = f(0.5 * (p2.x + p0.x), 0.5 * (p2.y + p0.y));
    const double w = area / 3.0;
    const double contrib[3] = {w * 0.5 * (f01 + f20), w * 0.5 * (f01 + f12), w * 0.5 * (f12 + f20)};
    for (int i = 0; i < 3; ++i) {
      const int dof = system.vertex_to_dof[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])];
      if (dof >= 0) b[static_cast<std::size_t>(dof)] += contrib[i];
    }
  }
  return b;
}

std::vector<double> l2_project(const Mesh& mesh, const AssembledSystem& system, const ScalarField& f) {
  const auto b = load_vector(mesh, system, f);
  const auto mass_factor = SkylineFactorization<double>::factor(system.mass);
  return mass_factor.solve(std::span<const double>(b));
}

void dump_matrix(const Csr& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Status::IoError, "cannot open matrix dump file for writing: " + path);
  out << matrix.n << ' ' << matrix.n << ' ' << matrix.nnz() << '\n';
  char buf[64];
  for (int i = 0; i < matrix.n; ++i) {
    for (int k = matrix.row_ptr[static_cast<std::size_t>(i)]; k < matrix.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, matrix.cols[static_cast<std::size_t>(k)], matrix.vals[static_cast<std::size_t>(k)]);
      out << buf;
    }
  }
  if (!out) fail(Status::IoError, "failed writing matrix dump: " + path);
}

}  // namespace dleig
