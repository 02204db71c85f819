/*
 * dleig — Dirichlet Laplacian eigenvalues on polygonal domains.
 *
 * P1 finite elements turn the eigenvalue problem into a matrix pencil
 * (A, M) restricted to interior vertices; eigenvalues are located by a
 * contour-quadrature spectral indicator search over boxes in the complex
 * plane and polished by shifted inverse iteration.
 *
 * All functions return a dleig_status; on failure dleig_last_error() holds
 * a thread-local description. Handles are opaque and must be released with
 * the matching _free call.
 */
#ifndef DLEIG_H
#define DLEIG_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dleig_status {
  DLEIG_OK = 0,
  DLEIG_ERR_INVALID_ARGUMENT = 1,
  DLEIG_ERR_PARSE = 2,
  DLEIG_ERR_VALIDATION = 3,
  DLEIG_ERR_DEGENERATE_ELEMENT = 4,
  DLEIG_ERR_EMPTY_SYSTEM = 5,
  DLEIG_ERR_DIMENSION_MISMATCH = 6,
  DLEIG_ERR_NEAR_SINGULAR = 7,
  DLEIG_ERR_EIGENVALUE_PROXIMITY = 8,
  DLEIG_ERR_CONTOUR_COLLISION = 9,
  DLEIG_ERR_AMBIGUOUS_TARGET = 10,
  DLEIG_ERR_UNRESOLVED_CLUSTER = 11,
  DLEIG_ERR_CAPACITY = 12,
  DLEIG_ERR_IO = 13,
  DLEIG_ERR_INTERNAL = 14
} dleig_status;

const char* dleig_status_name(dleig_status status);

/* Message for the most recent failure on the calling thread. */
const char* dleig_last_error(void);

/* ---- meshes -------------------------------------------------------- */

typedef struct dleig_mesh dleig_mesh;

/* Structured triangulation of the rectangle [x0,x1] x [y0,y1] with n
 * subdivisions per side; cells split along the lower-left to upper-right
 * diagonal. */
dleig_status dleig_mesh_create_uniform(int n, double x0, double y0, double x1, double y1, dleig_mesh** out);

/* Midpoint refinement: every triangle splits into 4, h halves. */
dleig_status dleig_mesh_refine(const dleig_mesh* mesh, dleig_mesh** out);

/* Text format: "nv nt", nv lines "x y flag", nt lines "i j k" (0-based).
 * Clockwise triangles are reoriented; *reoriented (optional) counts them. */
dleig_status dleig_mesh_read(const char* path, dleig_mesh** out, int* reoriented);
dleig_status dleig_mesh_write(const dleig_mesh* mesh, const char* path);

void dleig_mesh_free(dleig_mesh* mesh);

dleig_status dleig_mesh_counts(const dleig_mesh* mesh, int* num_vertices, int* num_triangles, int* num_interior);
dleig_status dleig_mesh_size(const dleig_mesh* mesh, double* h);

/* ---- assembled eigenvalue problems --------------------------------- */

typedef struct dleig_problem dleig_problem;

/* Assembles P1 stiffness/mass with Dirichlet elimination and prepares the
 * operator function F_h(z) = T_h - z^{-1} I. */
dleig_status dleig_problem_create(const dleig_mesh* mesh, dleig_problem** out);
void dleig_problem_free(dleig_problem* problem);

dleig_status dleig_problem_ndof(const dleig_problem* problem, int* n_dof);

/* Writes <prefix>.A.txt and <prefix>.M.txt in coordinate text form:
 * header "n n nnz", then one "i j value" line per entry (0-based). */
dleig_status dleig_problem_dump_matrices(const dleig_problem* problem, const char* path_prefix);

/* Dense generalized eigensolver over the full pencil, ascending; the
 * independent reference for the contour search (n_dof <= 2000). `capacity`
 * is the size of `values`; *count receives n_dof. */
dleig_status dleig_problem_oracle(const dleig_problem* problem, double* values, int capacity, int* count);

/* ---- spectral indicator search -------------------------------------- */

typedef struct dleig_region {
  double re0, re1, im0, im1;
} dleig_region;

typedef struct dleig_sim_options {
  int quad_points;        /* contour quadrature nodes (even, >= 8); default 32 */
  double threshold;       /* indicator survival threshold; default 1e-3 */
  double size_tol;        /* absolute box tolerance; 0 = 1e-6 * region diameter */
  int max_depth;          /* subdivision depth cap; default 40 */
  uint64_t seed;          /* probe vector seed; default 20240601 */
  double margin;          /* contour radius margin; default 0.1 */
  int max_contour_retries;/* radius nudges after contour collisions; default 5 */
  int threads;            /* box evaluation threads; default 1 */
} dleig_sim_options;

void dleig_sim_options_init(dleig_sim_options* options);

typedef struct dleig_estimate {
  double value_re, value_im;
  double enclosure_radius;
  double polish_residual;
  int polished;
} dleig_estimate;

/* Locates eigenvalues of F_h in the region. `capacity` sizes `estimates`;
 * *count receives the number found (sorted by real part). *num_warnings
 * (optional) counts unresolved clusters left at max depth. */
dleig_status dleig_search(const dleig_problem* problem, dleig_region region, const dleig_sim_options* options,
                          dleig_estimate* estimates, int capacity, int* count, int* num_warnings);

/* Indicator values on an nx-by-ny cell grid covering the region; fills
 * 3*nx*ny doubles as (re, im, indicator) row-major triples. Cells whose
 * contour cannot be evaluated carry NaN. */
dleig_status dleig_indicator_map(const dleig_problem* problem, dleig_region region, int nx, int ny,
                                 const dleig_sim_options* options, double* triples);

/* ---- studies and property checks ------------------------------------ */

double dleig_exact_eigenvalue(double width, double height, int m, int n);

typedef struct dleig_study_row {
  double h;         /* 1/n */
  double lambda_h;
  double error;     /* |lambda_h - lambda_exact| */
  double order;     /* log2(error_prev/error); row 0 carries has_order = 0 */
  int has_order;
} dleig_study_row;

/* Convergence study on the rectangle: one row per entry of n_list (strictly
 * doubling). rows must hold n_count entries. */
dleig_status dleig_study(double x0, double y0, double x1, double y1, const int* n_list, int n_count, int target_m,
                         int target_n, const dleig_sim_options* options, dleig_study_row* rows);

typedef struct dleig_check_result {
  char name[64];
  char detail[192];
  int passed;
} dleig_check_result;

/* Runs the projection/equiboundedness/consistency property suite. */
dleig_status dleig_check(dleig_check_result* results, int capacity, int* count);

#ifdef __cplusplus
}
#endif

#endif /* DLEIG_H */
