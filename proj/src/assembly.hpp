#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "mesh.hpp"
#include "sparse.hpp"

namespace dleig {

using ScalarField = std::function<double(double, double)>;

struct LocalMatrices {
  std::array<std::array<double, 3>, 3> stiffness;  // int grad(phi_i).grad(phi_j)
  std::array<std::array<double, 3>, 3> mass;       // int phi_i phi_j = area/12 * [[2,1,1],[1,2,1],[1,1,2]]
};

LocalMatrices local_matrices(const Point& p1, const Point& p2, const Point& p3);

// Galerkin matrices restricted to interior degrees of freedom (homogeneous
// Dirichlet conditions imposed by row/column deletion). Interior dofs are
// numbered row-major among interior vertices.
struct AssembledSystem {
  Csr stiffness;  // A
  Csr mass;       // M
  std::vector<int> dof_to_vertex;
  std::vector<int> vertex_to_dof;  // -1 for boundary vertices
  int n_dof = 0;
};

AssembledSystem assemble(const Mesh& mesh);

// Matrices over all vertices, boundary rows included. The unreduced mass sums
// to the domain area and the unreduced stiffness annihilates constants.
std::pair<Csr, Csr> assemble_unreduced(const Mesh& mesh);

// Load vector b_i = int f phi_i over interior basis functions, 3-point
// mid-edge Gauss rule per triangle (exact for quadratic integrands).
std::vector<double> load_vector(const Mesh& mesh, const AssembledSystem& system, const ScalarField& f);

// L2 projection onto the interior P1 space: solves M c = b.
std::vector<double> l2_project(const Mesh& mesh, const AssembledSystem& system, const ScalarField& f);

// Coordinate text dump, header "n n nnz" then one "i j value" line per entry.
void dump_matrix(const Csr& matrix, const std::string& path);

}  // namespace dleig
