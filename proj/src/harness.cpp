#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"

namespace dleig {

double exact_eigenvalue(const Rect& rect, int m, int n) {
  if (m < 1 || n < 1) fail(Status::InvalidArgument, "exact_eigenvalue: mode numbers must be >= 1");
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) {
    fail(Status::InvalidArgument, "exact_eigenvalue: degenerate rectangle");
  }
  const double w = rect.width();
  const double l = rect.height();
  return M_PI * M_PI * (static_cast<double>(m) * m / (w * w) + static_cast<double>(n) * n / (l * l));
}

double spectral_gap(const Rect& rect, int m, int n) {
  const double target = exact_eigenvalue(rect, m, n);
  // Seed the search with the axis neighbors, then scan every mode that can
  // still be closer.
  double best = std::abs(exact_eigenvalue(rect, m + 1, n) - target);
  best = std::min(best, std::abs(exact_eigenvalue(rect, m, n + 1) - target));
  if (m > 1) best = std::min(best, std::abs(exact_eigenvalue(rect, m - 1, n) - target));
  if (n > 1) best = std::min(best, std::abs(exact_eigenvalue(rect, m, n - 1) - target));

  const double cap = target + best;
  const int imax = static_cast<int>(std::ceil(rect.width() * std::sqrt(cap) / M_PI)) + 1;
  const int jmax = static_cast<int>(std::ceil(rect.height() * std::sqrt(cap) / M_PI)) + 1;
  for (int i = 1; i <= imax; ++i) {
    for (int j = 1; j <= jmax; ++j) {
      const double lambda = exact_eigenvalue(rect, i, j);
      const double dist = std::abs(lambda - target);
      if (dist > 1e-12 * target) best = std::min(best, dist);
    }
  }
  return best;
}

std::vector<ConvergenceRecord> convergence_study(const Rect& rect, std::span<const int> n_list, int target_m,
                                                 int target_n, const SimOptions& sim) {
  if (n_list.empty()) fail(Status::InvalidArgument, "study: empty refinement list");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (n_list[k] < 1) fail(Status::InvalidArgument, "study: refinement parameters must be >= 1");
    if (k > 0 && n_list[k] != 2 * n_list[k - 1]) {
      fail(Status::InvalidArgument, "study: refinement list must double at each step");
    }
  }

  const double target = exact_eigenvalue(rect, target_m, target_n);
  const double gap = spectral_gap(rect, target_m, target_n);
  const double width = 0.4 * gap;
  Region window;
  window.re0 = target - 0.5 * width;
  window.re1 = target + 0.5 * width;
  window.im0 = -width / 8.0;
  window.im1 = width / 8.0;

  SimOptions options = sim;
  if (options.size_tol == 0.0) options.size_tol = 1e-2 * width;

  std::vector<ConvergenceRecord> records;
  records.reserve(n_list.size());
  for (int n : n_list) {
    const Mesh mesh = generate_uniform_mesh(n, rect);
    OperatorFunction op(assemble(mesh));
    const SearchResult found = search(op, window, options);
    if (found.estimates.size() != 1) {
      fail(Status::AmbiguousTarget, "study: n=" + std::to_string(n) + " produced " +
                                        std::to_string(found.estimates.size()) + " estimates in the target window");
    }
    ConvergenceRecord rec;
    rec.h = 1.0 / static_cast<double>(n);
    rec.lambda_h = found.estimates.front().value.real();
    rec.error = std::abs(rec.lambda_h - target);
    if (!records.empty()) rec.order = std::log2(records.back().error / rec.error);
    records.push_back(rec);
  }
  return records;
}

StructuredP1::StructuredP1(const Rect& rect, int n, std::vector<double> nodal_values)
    : rect_(rect), n_(n), nodal_(std::move(nodal_values)) {
  if (n_ < 1) fail(Status::InvalidArgument, "StructuredP1: n must be >= 1");
  if (nodal_.size() != static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(n_ + 1)) {
    fail(Status::DimensionMismatch, "StructuredP1: nodal value count mismatch");
  }
}

StructuredP1 StructuredP1::from_interior(const Rect& rect, int n, std::span<const double> interior_coefficients) {
  if (static_cast<int>(interior_coefficients.size()) != (n - 1) * (n - 1)) {
    fail(Status::DimensionMismatch, "StructuredP1: interior coefficient count mismatch");
  }
  std::vector<double> nodal(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0.0);
  std::size_t k = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) nodal[static_cast<std::size_t>(j) * (n + 1) + static_cast<std::size_t>(i)] = interior_coefficients[k++];
  }
  return StructuredP1(rect, n, std::move(nodal));
}

double StructuredP1::operator()(double x, double y) const {
  const double dx = rect_.width() / n_;
  const double dy = rect_.height() / n_;
  int ix = static_cast<int>(std::floor((x - rect_.x0) / dx));
  int iy = static_cast<int>(std::floor((y - rect_.y0) / dy));
  ix = std::clamp(ix, 0, n_ - 1);
  iy = std::clamp(iy, 0, n_ - 1);
  const double lx = (x - rect_.x0 - ix * dx) / dx;
  const double ly = (y - rect_.y0 - iy * dy) / dy;
  const auto at = [&](int i, int j) { return nodal_[static_cast<std::size_t>(j) * (n_ + 1) + static_cast<std::size_t>(i)]; };
  // the cell diagonal runs lower-left to upper-right
  if (lx >= ly) return at(ix, iy) * (1.0 - lx) + at(ix + 1, iy) * (lx - ly) + at(ix + 1, iy + 1) * ly;
  return at(ix, iy) * (1.0 - ly) + at(ix + 1, iy + 1) * lx + at(ix, iy + 1) * (ly - lx);
}

double reference_l2_norm(const Rect& rect, const ScalarField& f, int n_fine) {
  if (n_fine < 1) fail(Status::InvalidArgument, "reference_l2_norm: n_fine must be >= 1");
  const double dx = rect.width() / n_fine;
  const double dy = rect.height() / n_fine;
  const double cell_area = dx * dy;
  const auto sq = [&](double x, double y) {
    const double v = f(x, y);
    return v * v;
  };
  double acc = 0.0;
  for (int j = 0; j < n_fine; ++j) {
    for (int i = 0; i < n_fine; ++i) {
      const double x0 = rect.x0 + i * dx, y0 = rect.y0 + j * dy;
      const double x1 = x0 + dx, y1 = y0 + dy;
      // lower triangle (x0,y0)-(x1,y0)-(x1,y1), upper (x0,y0)-(x1,y1)-(x0,y1)
      acc += (cell_area / 6.0) * (sq(0.5 * (x0 + x1), y0) + sq(x1, 0.5 * (y0 + y1)) + sq(0.5 * (x0 + x1), 0.5 * (y0 + y1)));
      acc += (cell_area / 6.0) * (sq(0.5 * (x0 + x1), 0.5 * (y0 + y1)) + sq(0.5 * (x0 + x1), y1) + sq(x0, 0.5 * (y0 + y1)));
    }
  }
  return std::sqrt(acc);
}

namespace {

double mass_norm(const AssembledSystem& sys, std::span<const double> v) {
  const auto mv = sys.mass.multiply(v);
  double s = 0.0;
  for (std::size_t i = 0; i < mv.size(); ++i) s += v[i] * mv[i];
  return std::sqrt(std::max(s, 0.0));
}

std::string format_list(std::span<const double> values, const char* fmt) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, fmt, values[i]);
    if (i > 0) out += ' ';
    out += buf;
  }
  return out;
}

}  // namespace

std::vector<CheckResult> run_condition_checks() {
  std::vector<CheckResult> results;
  const Rect unit{0.0, 0.0, 1.0, 1.0};
  const ScalarField f = [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); };

  {  // projection norms converge to the reference L2 norm
    const double ref = reference_l2_norm(unit, f, 256);
    std::vector<double> errors;
    for (int n : {4, 8, 16, 32}) {
      const Mesh mesh = generate_uniform_mesh(n, unit);
      const AssembledSystem sys = assemble(mesh);
      const auto ph = l2_project(mesh, sys, f);
      errors.push_back(std::abs(mass_norm(sys, ph) - ref));
    }
    bool passed = errors.back() < 1e-4;
    std::vector<double> orders;
    for (std::size_t k = 1; k < errors.size(); ++k) {
      passed = passed && errors[k] < errors[k - 1];
      orders.push_back(std::log2(errors[k - 1] / errors[k]));
      passed = passed && orders.back() >= 1.5;
    }
    results.push_back({"projection-norm-convergence", passed,
                       "| ||p_h f||_M - ||f|| | = " + format_list(errors, "%.3e") + ", orders " + format_list(orders, "%.2f")});
  }

  {  // operator norm estimates stay put under refinement and below the resolvent bound
    const Complex zs[] = {{10.0, 0.0}, {20.0, 5.0}, {100.0, 0.0}};
    double est[2][3];
    double lambda_min[2];
    int idx = 0;
    for (int n : {10, 20}) {
      const Mesh mesh = generate_uniform_mesh(n, unit);
      OperatorFunction op(assemble(mesh));
      lambda_min[idx] = dense_generalized_eig(op.system().stiffness, op.system().mass).values.front();
      for (int zi = 0; zi < 3; ++zi) est[idx][zi] = op.operator_norm_estimate(zs[zi]);
      ++idx;
    }
    bool passed = true;
    std::string detail;
    char buf[160];
    for (int zi = 0; zi < 3; ++zi) {
      const double variation = std::abs(est[0][zi] - est[1][zi]) / std::min(est[0][zi], est[1][zi]);
      passed = passed && variation < 0.05;
      for (int k = 0; k < 2; ++k) {
        const double bound = 1.0 / lambda_min[k] + 1.0 / std::abs(zs[zi]);
        passed = passed && est[k][zi] <= bound * (1.0 + 1e-9);
      }
      std::snprintf(buf, sizeof buf, "%sz=(%g,%g): est=%.6f/%.6f var=%.2f%% bound=%.6f", zi ? "; " : "",
                    zs[zi].real(), zs[zi].imag(), est[0][zi], est[1][zi], 100.0 * variation,
                    1.0 / lambda_min[0] + 1.0 / std::abs(zs[zi]));
      detail += buf;
    }
    results.push_back({"equiboundedness-probe", passed, detail});
  }

  {  // consistency against a reference-mesh solution operator
    const double lambda = 10.0;
    std::vector<double> errors;
    for (int n : {4, 8, 16}) {
      const Mesh mesh = generate_uniform_mesh(n, unit);
      const AssembledSystem sys = assemble(mesh);
      OperatorFunction op(sys);
      const auto ph_f = l2_project(mesh, sys, f);
      auto lhs = op.apply_Th(std::span<const double>(ph_f));
      for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= ph_f[i] / lambda;

      const int n_ref = 4 * n;
      const Mesh ref_mesh = generate_uniform_mesh(n_ref, unit);
      const AssembledSystem ref_sys = assemble(ref_mesh);
      OperatorFunction ref_op(ref_sys);
      const auto u_ref = ref_op.apply_Th(std::span<const double>(l2_project(ref_mesh, ref_sys, f)));
      const StructuredP1 u_fn = StructuredP1::from_interior(unit, n_ref, u_ref);
      const ScalarField f_image = [&](double x, double y) { return u_fn(x, y) - f(x, y) / lambda; };
      const auto rhs = l2_project(mesh, sys, f_image);

      std::vector<double> diff(lhs.size());
      for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = lhs[i] - rhs[i];
      errors.push_back(mass_norm(sys, diff));
    }
    bool passed = true;
    std::vector<double> orders;
    for (std::size_t k = 1; k < errors.size(); ++k) {
      orders.push_back(std::log2(errors[k - 1] / errors[k]));
      passed = passed && orders.back() >= 1.8;
    }
    results.push_back({"consistency-decay", passed,
                       "||F_h p_h f - p_h F f||_M = " + format_list(errors, "%.3e") + ", orders " + format_list(orders, "%.2f")});
  }

  return results;
}

}  // namespace dleig
