#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sim.hpp"

namespace dleig {

// Dirichlet eigenvalue pi^2 (m^2/w^2 + n^2/l^2) of the rectangle with side
// lengths w (x extent) and l (y extent).
double exact_eigenvalue(const Rect& rect, int m, int n);

// Distance from exact_eigenvalue(rect, m, n) to the nearest distinct exact
// eigenvalue of the rectangle.
double spectral_gap(const Rect& rect, int m, int n);

struct ConvergenceRecord {
  double h = 0.0;        // reported as 1/n
  double lambda_h = 0.0;
  double error = 0.0;    // |lambda_h - lambda_exact|
  std::optional<double> order;  // log2(error_prev / error); absent in the first row
};

// For each n: mesh -> assemble -> search a window centered on the exact target
// eigenvalue with width 40% of the spectral gap. Exactly one estimate must land
// in the window, otherwise an ambiguous-target error names the offending n.
std::vector<ConvergenceRecord> convergence_study(const Rect& rect, std::span<const int> n_list, int target_m,
                                                 int target_n, const SimOptions& sim = {});

// Piecewise-linear function on generate_uniform_mesh(n, rect), evaluable
// anywhere in the rectangle.
class StructuredP1 {
 public:
  StructuredP1(const Rect& rect, int n, std::vector<double> nodal_values);
  static StructuredP1 from_interior(const Rect& rect, int n, std::span<const double> interior_coefficients);
  double operator()(double x, double y) const;

 private:
  Rect rect_;
  int n_;
  std::vector<double> nodal_;
};

// Composite 3-point mid-edge quadrature of ||f||_L2 on a fine structured grid.
double reference_l2_norm(const Rect& rect, const ScalarField& f, int n_fine = 256);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Property runs behind the `check` subcommand: projection-norm convergence,
// the equiboundedness probe, and the reference-mesh consistency decay.
std::vector<CheckResult> run_condition_checks();

}  // namespace dleig
