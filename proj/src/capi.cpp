#include "dleig.h"

#include <cstring>
#include <string>

#include "errors.hpp"
#include "harness.hpp"
#include "mesh.hpp"
#include "opfun.hpp"
#include "sim.hpp"

struct dleig_mesh {
  dleig::Mesh mesh;
};

struct dleig_problem {
  dleig::Mesh mesh;
  dleig::OperatorFunction op;
  explicit dleig_problem(dleig::Mesh m) : mesh(std::move(m)), op(dleig::assemble(mesh)) {}
};

namespace {

thread_local std::string g_last_error;

dleig_status to_status(const dleig::Error& e) {
  g_last_error = e.what();
  return static_cast<dleig_status>(static_cast<int>(e.code()));
}

template <class Fn>
dleig_status guarded(Fn&& fn) {
  try {
    fn();
    return DLEIG_OK;
  } catch (const dleig::Error& e) {
    return to_status(e);
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DLEIG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DLEIG_ERR_INTERNAL;
  }
}

dleig_status require(bool ok, const char* message) {
  if (ok) return DLEIG_OK;
  g_last_error = message;
  return DLEIG_ERR_INVALID_ARGUMENT;
}

dleig::SimOptions to_core(const dleig_sim_options* options) {
  dleig::SimOptions core;
  if (options == nullptr) return core;
  core.quad_points = options->quad_points;
  core.threshold = options->threshold;
  core.size_tol = options->size_tol;
  core.max_depth = options->max_depth;
  core.seed = options->seed;
  core.margin = options->margin;
  core.max_contour_retries = options->max_contour_retries;
  core.threads = options->threads;
  return core;
}

void copy_string(char* dst, std::size_t cap, const std::string& src) {
  const std::size_t len = std::min(cap - 1, src.size());
  std::memcpy(dst, src.data(), len);
  dst[len] = '\0';
}

}  // namespace

extern "C" {

const char* dleig_status_name(dleig_status status) {
  return dleig::status_name(static_cast<dleig::Status>(static_cast<int>(status)));
}

const char* dleig_last_error(void) { return g_last_error.c_str(); }

dleig_status dleig_mesh_create_uniform(int n, double x0, double y0, double x1, double y1, dleig_mesh** out) {
  if (auto s = require(out != nullptr, "mesh_create_uniform: null output handle")) return s;
  *out = nullptr;
  return guarded([&] { *out = new dleig_mesh{dleig::generate_uniform_mesh(n, {x0, y0, x1, y1})}; });
}

dleig_status dleig_mesh_refine(const dleig_mesh* mesh, dleig_mesh** out) {
  if (auto s = require(mesh != nullptr && out != nullptr, "mesh_refine: null handle")) return s;
  *out = nullptr;
  return guarded([&] { *out = new dleig_mesh{dleig::refine_uniform(mesh->mesh)}; });
}

dleig_status dleig_mesh_read(const char* path, dleig_mesh** out, int* reoriented) {
  if (auto s = require(path != nullptr && out != nullptr, "mesh_read: null argument")) return s;
  *out = nullptr;
  return guarded([&] {
    dleig::MeshReadReport report;
    *out = new dleig_mesh{dleig::read_mesh(path, &report)};
    if (reoriented != nullptr) *reoriented = report.reoriented;
  });
}

dleig_status dleig_mesh_write(const dleig_mesh* mesh, const char* path) {
  if (auto s = require(mesh != nullptr && path != nullptr, "mesh_write: null argument")) return s;
  return guarded([&] { dleig::write_mesh(mesh->mesh, path); });
}

void dleig_mesh_free(dleig_mesh* mesh) { delete mesh; }

dleig_status dleig_mesh_counts(const dleig_mesh* mesh, int* num_vertices, int* num_triangles, int* num_interior) {
  if (auto s = require(mesh != nullptr, "mesh_counts: null handle")) return s;
  if (num_vertices != nullptr) *num_vertices = mesh->mesh.num_vertices();
  if (num_triangles != nullptr) *num_triangles = mesh->mesh.num_triangles();
  if (num_interior != nullptr) *num_interior = mesh->mesh.num_interior();
  return DLEIG_OK;
}

dleig_status dleig_mesh_size(const dleig_mesh* mesh, double* h) {
  if (auto s = require(mesh != nullptr && h != nullptr, "mesh_size: null argument")) return s;
  *h = mesh->mesh.h;
  return DLEIG_OK;
}

dleig_status dleig_problem_create(const dleig_mesh* mesh, dleig_problem** out) {
  if (auto s = require(mesh != nullptr && out != nullptr, "problem_create: null handle")) return s;
  *out = nullptr;
  return guarded([&] { *out = new dleig_problem(mesh->mesh); });
}

void dleig_problem_free(dleig_problem* problem) { delete problem; }

dleig_status dleig_problem_ndof(const dleig_problem* problem, int* n_dof) {
  if (auto s = require(problem != nullptr && n_dof != nullptr, "problem_ndof: null argument")) return s;
  *n_dof = problem->op.dim();
  return DLEIG_OK;
}

dleig_status dleig_problem_dump_matrices(const dleig_problem* problem, const char* path_prefix) {
  if (auto s = require(problem != nullptr && path_prefix != nullptr, "dump_matrices: null argument")) return s;
  return guarded([&] {
    const std::string prefix(path_prefix);
    dleig::dump_matrix(problem->op.system().stiffness, prefix + ".A.txt");
    dleig::dump_matrix(problem->op.system().mass, prefix + ".M.txt");
  });
}

dleig_status dleig_problem_oracle(const dleig_problem* problem, double* values, int capacity, int* count) {
  if (auto s = require(problem != nullptr && values != nullptr && count != nullptr, "oracle: null argument")) return s;
  return guarded([&] {
    *count = problem->op.dim();
    if (capacity < *count) dleig::fail(dleig::Status::Capacity, "oracle: output capacity too small");
    const auto eig = dleig::dense_generalized_eig(problem->op.system().stiffness, problem->op.system().mass);
    for (int i = 0; i < *count; ++i) values[i] = eig.values[static_cast<std::size_t>(i)];
  });
}

void dleig_sim_options_init(dleig_sim_options* options) {
  if (options == nullptr) return;
  const dleig::SimOptions core;
  options->quad_points = core.quad_points;
  options->threshold = core.threshold;
  options->size_tol = core.size_tol;
  options->max_depth = core.max_depth;
  options->seed = core.seed;
  options->margin = core.margin;
  options->max_contour_retries = core.max_contour_retries;
  options->threads = core.threads;
}

dleig_status dleig_search(const dleig_problem* problem, dleig_region region, const dleig_sim_options* options,
                          dleig_estimate* estimates, int capacity, int* count, int* num_warnings) {
  if (auto s = require(problem != nullptr && estimates != nullptr && count != nullptr, "search: null argument")) return s;
  return guarded([&] {
    const dleig::SearchResult result =
        dleig::search(problem->op, {region.re0, region.re1, region.im0, region.im1}, to_core(options));
    *count = static_cast<int>(result.estimates.size());
    if (num_warnings != nullptr) *num_warnings = static_cast<int>(result.warnings.size());
    if (capacity < *count) dleig::fail(dleig::Status::Capacity, "search: output capacity too small");
    for (int i = 0; i < *count; ++i) {
      const auto& est = result.estimates[static_cast<std::size_t>(i)];
      estimates[i] = {est.value.real(), est.value.imag(), est.enclosure_radius, est.polish_residual,
                      est.polished ? 1 : 0};
    }
  });
}

dleig_status dleig_indicator_map(const dleig_problem* problem, dleig_region region, int nx, int ny,
                                 const dleig_sim_options* options, double* triples) {
  if (auto s = require(problem != nullptr && triples != nullptr, "indicator_map: null argument")) return s;
  return guarded([&] {
    const auto samples =
        dleig::indicator_map(problem->op, {region.re0, region.re1, region.im0, region.im1}, nx, ny, to_core(options));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      triples[3 * i] = samples[i].re;
      triples[3 * i + 1] = samples[i].im;
      triples[3 * i + 2] = samples[i].indicator;
    }
  });
}

double dleig_exact_eigenvalue(double width, double height, int m, int n) {
  try {
    return dleig::exact_eigenvalue({0.0, 0.0, width, height}, m, n);
  } catch (const dleig::Error& e) {
    g_last_error = e.what();
    return -1.0;
  }
}

dleig_status dleig_study(double x0, double y0, double x1, double y1, const int* n_list, int n_count, int target_m,
                         int target_n, const dleig_sim_options* options, dleig_study_row* rows) {
  if (auto s = require(n_list != nullptr && rows != nullptr && n_count > 0, "study: null or empty arguments")) return s;
  return guarded([&] {
    const auto records = dleig::convergence_study({x0, y0, x1, y1}, std::span<const int>(n_list, static_cast<std::size_t>(n_count)),
                                                  target_m, target_n, to_core(options));
    for (std::size_t i = 0; i < records.size(); ++i) {
      rows[i].h = records[i].h;
      rows[i].lambda_h = records[i].lambda_h;
      rows[i].error = records[i].error;
      rows[i].order = records[i].order.value_or(0.0);
      rows[i].has_order = records[i].order.has_value() ? 1 : 0;
    }
  });
}

dleig_status dleig_check(dleig_check_result* results, int capacity, int* count) {
  if (auto s = require(results != nullptr && count != nullptr, "check: null argument")) return s;
  return guarded([&] {
    const auto checks = dleig::run_condition_checks();
    *count = static_cast<int>(checks.size());
    if (capacity < *count) dleig::fail(dleig::Status::Capacity, "check: output capacity too small");
    for (int i = 0; i < *count; ++i) {
      copy_string(results[i].name, sizeof results[i].name, checks[static_cast<std::size_t>(i)].name);
      copy_string(results[i].detail, sizeof results[i].detail, checks[static_cast<std::size_t>(i)].detail);
      results[i].passed = checks[static_cast<std::size_t>(i)].passed ? 1 : 0;
    }
  });
}

}  // extern "C"
