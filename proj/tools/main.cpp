// dleig command line: solve | study | oracle | indicator-map | check
//
// Every subcommand accepts --config FILE with plain key=value lines; explicit
// flags override config values. Output goes to stdout or --out PATH.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dleig.h"
#include "json.hpp"

namespace {

using nlohmann::json;

int exit_code_for(dleig_status status) {
  switch (status) {
    case DLEIG_OK:
      return 0;
    case DLEIG_ERR_INVALID_ARGUMENT:
    case DLEIG_ERR_PARSE:
    case DLEIG_ERR_VALIDATION:
    case DLEIG_ERR_DEGENERATE_ELEMENT:
    case DLEIG_ERR_EMPTY_SYSTEM:
    case DLEIG_ERR_DIMENSION_MISMATCH:
    case DLEIG_ERR_IO:
      return 1;
    default:
      return 2;
  }
}

[[noreturn]] void die(dleig_status status) {
  std::fprintf(stderr, "error (%s): %s\n", dleig_status_name(status), dleig_last_error());
  std::exit(exit_code_for(status));
}

void check_status(dleig_status status) {
  if (status != DLEIG_OK) die(status);
}

struct MeshHandle {
  dleig_mesh* ptr = nullptr;
  ~MeshHandle() { dleig_mesh_free(ptr); }
};

struct ProblemHandle {
  dleig_problem* ptr = nullptr;
  ~ProblemHandle() { dleig_problem_free(ptr); }
};

struct Output {
  FILE* stream = stdout;
  ~Output() {
    if (stream != nullptr && stream != stdout) std::fclose(stream);
  }
  void open(const std::string& path) {
    if (path.empty()) return;
    stream = std::fopen(path.c_str(), "w");
    if (stream == nullptr) {
      std::fprintf(stderr, "error (io-error): cannot open output file: %s\n", path.c_str());
      std::exit(1);
    }
  }
};

std::vector<double> parse_doubles(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error (invalid-argument): bad %s value '%s'\n", what, tok.c_str());
      std::exit(1);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.size() != expected) {
    std::fprintf(stderr, "error (invalid-argument): %s needs %zu comma-separated values\n", what, expected);
    std::exit(1);
  }
  return values;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error (invalid-argument): bad %s value '%s'\n", what, tok.c_str());
      std::exit(1);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

// Options shared by the eigenvalue-searching subcommands.
struct SimFlags {
  int quad_points = 0;
  double threshold = 0.0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool has_quad = false, has_threshold = false, has_tol = false, has_seed = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--quad-points", quad_points, "contour quadrature nodes (even, >= 8)")->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", threshold, "indicator survival threshold");
    cmd->add_option("--tol", tol, "absolute box size tolerance");
    cmd->add_option("--seed", seed, "random probe seed");
  }

  dleig_sim_options resolve(CLI::App* cmd) const {
    dleig_sim_options options;
    dleig_sim_options_init(&options);
    if (cmd->count("--quad-points") > 0) options.quad_points = quad_points;
    if (cmd->count("--threshold") > 0) options.threshold = threshold;
    if (cmd->count("--tol") > 0) options.size_tol = tol;
    if (cmd->count("--seed") > 0) options.seed = seed;
    return options;
  }
};

void add_config(CLI::App* cmd) {
  cmd->set_config("--config", "", "option file with plain key=value lines");
}

MeshHandle make_mesh(CLI::App* cmd, int nx, const std::string& mesh_path) {
  const bool has_nx = cmd->count("--nx") > 0;
  const bool has_mesh = cmd->count("--mesh") > 0;
  if (has_nx == has_mesh) {
    std::fprintf(stderr, "error (invalid-argument): give exactly one of --nx or --mesh\n");
    std::exit(1);
  }
  MeshHandle mesh;
  if (has_nx) {
    check_status(dleig_mesh_create_uniform(nx, 0.0, 0.0, 1.0, 1.0, &mesh.ptr));
  } else {
    int reoriented = 0;
    check_status(dleig_mesh_read(mesh_path.c_str(), &mesh.ptr, &reoriented));
    if (reoriented > 0) std::fprintf(stderr, "note: reoriented %d clockwise triangle(s)\n", reoriented);
  }
  return mesh;
}

int run_solve(CLI::App* cmd, int nx, const std::string& mesh_path, const std::string& region_text,
              const SimFlags& sim, const std::string& format, const std::string& out_path,
              const std::string& dump_path) {
  const auto r = parse_doubles(region_text, 4, "--region");
  const dleig_region region{r[0], r[1], r[2], r[3]};

  MeshHandle mesh = make_mesh(cmd, nx, mesh_path);
  ProblemHandle problem;
  check_status(dleig_problem_create(mesh.ptr, &problem.ptr));
  if (!dump_path.empty()) check_status(dleig_problem_dump_matrices(problem.ptr, dump_path.c_str()));

  int n_dof = 0;
  check_status(dleig_problem_ndof(problem.ptr, &n_dof));
  std::vector<dleig_estimate> estimates(static_cast<std::size_t>(n_dof) + 8);
  int count = 0, warnings = 0;
  const dleig_sim_options options = sim.resolve(cmd);
  check_status(dleig_search(problem.ptr, region, &options, estimates.data(), static_cast<int>(estimates.size()),
                            &count, &warnings));

  Output out;
  out.open(out_path);
  if (format == "csv") {
    std::fprintf(out.stream, "value,enclosure_radius,polish_residual,polished\n");
    for (int i = 0; i < count; ++i) {
      std::fprintf(out.stream, "%.12f,%.6e,%.6e,%d\n", estimates[static_cast<std::size_t>(i)].value_re,
                   estimates[static_cast<std::size_t>(i)].enclosure_radius,
                   estimates[static_cast<std::size_t>(i)].polish_residual, estimates[static_cast<std::size_t>(i)].polished);
    }
  } else if (format == "md") {
    std::fprintf(out.stream, "| eigenvalue | residual |\n|---|---|\n");
    for (int i = 0; i < count; ++i) {
      std::fprintf(out.stream, "| %.12f | %.2e |\n", estimates[static_cast<std::size_t>(i)].value_re,
                   estimates[static_cast<std::size_t>(i)].polish_residual);
    }
  } else if (format == "json") {
    json doc;
    doc["estimates"] = json::array();
    for (int i = 0; i < count; ++i) {
      const auto& e = estimates[static_cast<std::size_t>(i)];
      doc["estimates"].push_back({{"value", e.value_re},
                                  {"enclosure_radius", e.enclosure_radius},
                                  {"polish_residual", e.polish_residual},
                                  {"polished", e.polished != 0}});
    }
    doc["warnings"] = warnings;
    std::fprintf(out.stream, "%s\n", doc.dump(2).c_str());
  } else {
    for (int i = 0; i < count; ++i) std::fprintf(out.stream, "%.12f\n", estimates[static_cast<std::size_t>(i)].value_re);
  }
  if (warnings > 0) {
    std::fprintf(stderr, "warning: %d unresolved cluster(s) left at max depth\n", warnings);
    return 2;
  }
  return 0;
}

int run_study(CLI::App* cmd, const std::string& nx_text, const std::string& target_text, const SimFlags& sim,
              const std::string& format, const std::string& out_path) {
  const auto n_list = parse_ints(nx_text, "--nx");
  const auto target = parse_ints(target_text, "--target");
  if (target.size() != 2) {
    std::fprintf(stderr, "error (invalid-argument): --target needs 'm,n'\n");
    return 1;
  }
  std::vector<dleig_study_row> rows(n_list.size());
  const dleig_sim_options options = sim.resolve(cmd);
  check_status(dleig_study(0.0, 0.0, 1.0, 1.0, n_list.data(), static_cast<int>(n_list.size()), target[0], target[1],
                           &options, rows.data()));

  Output out;
  out.open(out_path);
  if (format == "md") {
    std::fprintf(out.stream, "| h | lambda_h | error | order |\n|---|---|---|---|\n");
    for (const auto& row : rows) {
      if (row.has_order != 0) {
        std::fprintf(out.stream, "| 1/%d | %.4f | %.4f | %.4f |\n", static_cast<int>(1.0 / row.h + 0.5), row.lambda_h,
                     row.error, row.order);
      } else {
        std::fprintf(out.stream, "| 1/%d | %.4f | %.4f | - |\n", static_cast<int>(1.0 / row.h + 0.5), row.lambda_h,
                     row.error);
      }
    }
  } else if (format == "json") {
    json doc;
    doc["rows"] = json::array();
    for (const auto& row : rows) {
      json j{{"h", row.h}, {"lambda_h", row.lambda_h}, {"error", row.error}};
      if (row.has_order != 0) j["order"] = row.order;
      doc["rows"].push_back(j);
    }
    std::fprintf(out.stream, "%s\n", doc.dump(2).c_str());
  } else {  // csv
    std::fprintf(out.stream, "h,lambda_h,error,order\n");
    for (const auto& row : rows) {
      if (row.has_order != 0) {
        std::fprintf(out.stream, "%.10g,%.12f,%.12f,%.6f\n", row.h, row.lambda_h, row.error, row.order);
      } else {
        std::fprintf(out.stream, "%.10g,%.12f,%.12f,\n", row.h, row.lambda_h, row.error);
      }
    }
  }
  return 0;
}

int run_oracle(int nx, const std::string& format, const std::string& out_path) {
  MeshHandle mesh;
  check_status(dleig_mesh_create_uniform(nx, 0.0, 0.0, 1.0, 1.0, &mesh.ptr));
  ProblemHandle problem;
  check_status(dleig_problem_create(mesh.ptr, &problem.ptr));
  int n_dof = 0;
  check_status(dleig_problem_ndof(problem.ptr, &n_dof));
  std::vector<double> values(static_cast<std::size_t>(n_dof));
  int count = 0;
  check_status(dleig_problem_oracle(problem.ptr, values.data(), n_dof, &count));

  Output out;
  out.open(out_path);
  if (format == "csv") {
    std::fprintf(out.stream, "value\n");
    for (int i = 0; i < count; ++i) std::fprintf(out.stream, "%.12f\n", values[static_cast<std::size_t>(i)]);
  } else if (format == "json") {
    json doc;
    doc["eigenvalues"] = json::array();
    for (int i = 0; i < count; ++i) doc["eigenvalues"].push_back(values[static_cast<std::size_t>(i)]);
    std::fprintf(out.stream, "%s\n", doc.dump(2).c_str());
  } else {
    for (int i = 0; i < count; ++i) std::fprintf(out.stream, "%.12f\n", values[static_cast<std::size_t>(i)]);
  }
  return 0;
}

int run_indicator_map(CLI::App* cmd, int nx, const std::string& mesh_path, const std::string& region_text,
                      const std::string& grid_text, const SimFlags& sim, const std::string& format,
                      const std::string& out_path) {
  const auto r = parse_doubles(region_text, 4, "--region");
  const dleig_region region{r[0], r[1], r[2], r[3]};
  const auto grid = parse_ints(grid_text, "--grid");
  if (grid.size() != 2 || grid[0] < 1 || grid[1] < 1) {
    std::fprintf(stderr, "error (invalid-argument): --grid needs 'NX,NY' with positive counts\n");
    return 1;
  }

  MeshHandle mesh = make_mesh(cmd, nx, mesh_path);
  ProblemHandle problem;
  check_status(dleig_problem_create(mesh.ptr, &problem.ptr));

  std::vector<double> triples(3 * static_cast<std::size_t>(grid[0]) * static_cast<std::size_t>(grid[1]));
  const dleig_sim_options options = sim.resolve(cmd);
  check_status(dleig_indicator_map(problem.ptr, region, grid[0], grid[1], &options, triples.data()));

  Output out;
  out.open(out_path);
  if (format == "json") {
    json doc = json::array();
    for (std::size_t k = 0; k < triples.size(); k += 3) {
      doc.push_back({{"re", triples[k]}, {"im", triples[k + 1]}, {"indicator", triples[k + 2]}});
    }
    std::fprintf(out.stream, "%s\n", doc.dump(2).c_str());
  } else {
    std::fprintf(out.stream, "re,im,indicator\n");
    for (std::size_t k = 0; k < triples.size(); k += 3) {
      std::fprintf(out.stream, "%.10g,%.10g,%.12e\n", triples[k], triples[k + 1], triples[k + 2]);
    }
  }
  return 0;
}

int run_check(const std::string& format, const std::string& out_path) {
  dleig_check_result results[16];
  int count = 0;
  check_status(dleig_check(results, 16, &count));

  Output out;
  out.open(out_path);
  bool all_passed = true;
  if (format == "json") {
    json doc = json::array();
    for (int i = 0; i < count; ++i) {
      doc.push_back({{"name", results[i].name}, {"passed", results[i].passed != 0}, {"detail", results[i].detail}});
      all_passed = all_passed && results[i].passed != 0;
    }
    std::fprintf(out.stream, "%s\n", doc.dump(2).c_str());
  } else {
    for (int i = 0; i < count; ++i) {
      std::fprintf(out.stream, "%s %s: %s\n", results[i].passed != 0 ? "PASS" : "FAIL", results[i].name,
                   results[i].detail);
      all_passed = all_passed && results[i].passed != 0;
    }
  }
  return all_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet Laplacian eigenvalues by finite elements and contour indicators"};
  app.require_subcommand(1);

  const auto format_check = CLI::IsMember({"csv", "md", "json"});

  // solve
  auto* solve = app.add_subcommand("solve", "locate eigenvalues in a complex region on one mesh");
  int solve_nx = 0;
  std::string solve_mesh, solve_region, solve_format, solve_out, solve_dump;
  SimFlags solve_sim;
  solve->add_option("--nx", solve_nx, "unit-square grid subdivisions")->check(CLI::PositiveNumber);
  solve->add_option("--mesh", solve_mesh, "mesh file to import");
  solve->add_option("--region", solve_region, "search region re0,re1,im0,im1")->required();
  solve_sim.attach(solve);
  solve->add_option("--format", solve_format, "csv|md|json")->check(format_check);
  solve->add_option("--out", solve_out, "output path (default stdout)");
  solve->add_option("--dump-matrices", solve_dump, "write <prefix>.A.txt and <prefix>.M.txt");
  add_config(solve);

  // study
  auto* study = app.add_subcommand("study", "convergence study on the unit square");
  std::string study_nx = "10,20,40,80", study_target = "1,1", study_format, study_out;
  SimFlags study_sim;
  study->add_option("--nx", study_nx, "doubling refinement list, e.g. 10,20,40,80");
  study->add_option("--target", study_target, "exact eigenvalue mode numbers m,n");
  study_sim.attach(study);
  study->add_option("--format", study_format, "csv|md|json")->check(format_check);
  study->add_option("--out", study_out, "output path (default stdout)");
  add_config(study);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "dense reference spectrum of the unit-square pencil");
  int oracle_nx = 0;
  std::string oracle_format, oracle_out;
  oracle->add_option("--nx", oracle_nx, "unit-square grid subdivisions")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--format", oracle_format, "csv|md|json")->check(format_check);
  oracle->add_option("--out", oracle_out, "output path (default stdout)");
  add_config(oracle);

  // indicator-map
  auto* imap = app.add_subcommand("indicator-map", "indicator values on a grid over a complex region");
  int imap_nx = 0;
  std::string imap_mesh, imap_region, imap_grid = "32,32", imap_format, imap_out;
  SimFlags imap_sim;
  imap->add_option("--nx", imap_nx, "unit-square grid subdivisions")->check(CLI::PositiveNumber);
  imap->add_option("--mesh", imap_mesh, "mesh file to import");
  imap->add_option("--region", imap_region, "map region re0,re1,im0,im1")->required();
  imap->add_option("--grid", imap_grid, "map resolution NX,NY");
  imap_sim.attach(imap);
  imap->add_option("--format", imap_format, "csv|md|json")->check(format_check);
  imap->add_option("--out", imap_out, "output path (default stdout)");
  add_config(imap);

  // check
  auto* check = app.add_subcommand("check", "run the projection/boundedness/consistency property suite");
  std::string check_format, check_out;
  check->add_option("--format", check_format, "csv|md|json")->check(format_check);
  check->add_option("--out", check_out, "output path (default stdout)");
  add_config(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      return run_solve(solve, solve_nx, solve_mesh, solve_region, solve_sim, solve_format, solve_out, solve_dump);
    }
    if (study->parsed()) return run_study(study, study_nx, study_target, study_sim, study_format, study_out);
    if (oracle->parsed()) return run_oracle(oracle_nx, oracle_format, oracle_out);
    if (imap->parsed()) {
      return run_indicator_map(imap, imap_nx, imap_mesh, imap_region, imap_grid, imap_sim, imap_format, imap_out);
    }
    if (check->parsed()) return run_check(check_format, check_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
