#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "errors.hpp"
#include "mesh.hpp"

using namespace dleig;

namespace {

const Rect kUnit{0.0, 0.0, 1.0, 1.0};

std::set<std::pair<int, int>> unique_edges(const Mesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles) {
    edges.insert(std::minmax(t[0], t[1]));
    edges.insert(std::minmax(t[1], t[2]));
    edges.insert(std::minmax(t[2], t[0]));
  }
  return edges;
}

std::vector<std::pair<double, double>> sorted_vertices(const Mesh& mesh) {
  std::vector<std::pair<double, double>> v;
  v.reserve(mesh.vertices.size());
  for (const auto& p : mesh.vertices) v.emplace_back(p.x, p.y);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("uniform mesh counts") {
  struct Row {
    int n, nv, nt, interior;
  };
  for (const Row row : {Row{1, 4, 2, 0}, Row{2, 9, 8, 1}, Row{10, 121, 200, 81}}) {
    const Mesh mesh = generate_uniform_mesh(row.n, kUnit);
    CHECK(mesh.num_vertices() == row.nv);
    CHECK(mesh.num_triangles() == row.nt);
    CHECK(mesh.num_interior() == row.interior);
    CHECK(mesh.h == doctest::Approx(std::sqrt(2.0) / row.n).epsilon(1e-14));
  }
  const Mesh mesh = generate_uniform_mesh(2, kUnit);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.boundary_flags[static_cast<std::size_t>(v)]) {
      CHECK(mesh.vertices[static_cast<std::size_t>(v)].x == doctest::Approx(0.5));
      CHECK(mesh.vertices[static_cast<std::size_t>(v)].y == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("uniform mesh geometry invariants") {
  for (int n : {1, 2, 5, 8}) {
    const Mesh mesh = generate_uniform_mesh(n, kUnit);
    CHECK_NOTHROW(validate_mesh(mesh));
    CHECK(std::abs(total_area(mesh) - 1.0) <= 1e-12);
    for (const auto& t : mesh.triangles) {
      CHECK(triangle_signed_area(mesh.vertices[static_cast<std::size_t>(t[0])], mesh.vertices[static_cast<std::size_t>(t[1])],
                                 mesh.vertices[static_cast<std::size_t>(t[2])]) > 0.0);
    }
    const int euler = mesh.num_vertices() - static_cast<int>(unique_edges(mesh).size()) + mesh.num_triangles();
    CHECK(euler == 1);
  }
  const Rect stretched{1.0, 2.0, 3.0, 5.0};
  const Mesh mesh = generate_uniform_mesh(4, stretched);
  CHECK(std::abs(total_area(mesh) - 6.0) <= 6.0 * 1e-12);
  CHECK(mesh.h == doctest::Approx(std::hypot(0.5, 0.75)));
}

TEST_CASE("uniform mesh rejects bad input") {
  CHECK_THROWS_AS(generate_uniform_mesh(0, kUnit), Error);
  CHECK_THROWS_AS(generate_uniform_mesh(-3, kUnit), Error);
  CHECK_THROWS_AS(generate_uniform_mesh(2, Rect{0, 0, 0, 1}), Error);
  try {
    generate_uniform_mesh(0, kUnit);
  } catch (const Error& e) {
    CHECK(e.code() == Status::InvalidArgument);
  }
}

TEST_CASE("refinement matches the doubled generator") {
  for (int n : {1, 3}) {
    const Mesh coarse = generate_uniform_mesh(n, kUnit);
    const Mesh fine = refine_uniform(coarse);
    const Mesh direct = generate_uniform_mesh(2 * n, kUnit);

    CHECK(fine.num_triangles() == 8 * n * n);
    CHECK(fine.num_interior() == (2 * n - 1) * (2 * n - 1));
    CHECK(fine.h == doctest::Approx(coarse.h / 2.0));
    CHECK_NOTHROW(validate_mesh(fine));

    const auto a = sorted_vertices(fine);
    const auto b = sorted_vertices(direct);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].first == doctest::Approx(b[i].first).epsilon(1e-15));
      CHECK(a[i].second == doctest::Approx(b[i].second).epsilon(1e-15));
    }
  }
}

TEST_CASE("mesh io round trip") {
  const std::string path = "tmp_mesh_roundtrip.txt";
  const Mesh mesh = generate_uniform_mesh(2, kUnit);
  write_mesh(mesh, path);
  MeshReadReport report;
  const Mesh back = read_mesh(path, &report);
  CHECK(report.reoriented == 0);
  REQUIRE(back.num_vertices() == mesh.num_vertices());
  REQUIRE(back.num_triangles() == mesh.num_triangles());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    CHECK(back.vertices[static_cast<std::size_t>(v)].x == mesh.vertices[static_cast<std::size_t>(v)].x);
    CHECK(back.vertices[static_cast<std::size_t>(v)].y == mesh.vertices[static_cast<std::size_t>(v)].y);
    CHECK(back.boundary_flags[static_cast<std::size_t>(v)] == mesh.boundary_flags[static_cast<std::size_t>(v)]);
  }
  CHECK(back.triangles == mesh.triangles);
  CHECK(back.h == doctest::Approx(mesh.h).epsilon(1e-15));
  std::filesystem::remove(path);
}

TEST_CASE("mesh reader reorients clockwise triangles") {
  const std::string path = "tmp_mesh_cw.txt";
  {
    std::ofstream out(path);
    out << "4 2\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n0 2 1\n0 2 3\n";  // first triangle clockwise
  }
  MeshReadReport report;
  const Mesh mesh = read_mesh(path, &report);
  CHECK(report.reoriented == 1);
  CHECK_NOTHROW(validate_mesh(mesh));
  std::filesystem::remove(path);
}

TEST_CASE("mesh reader rejects bad files") {
  const std::string path = "tmp_mesh_bad.txt";

  {
    std::ofstream out(path);
    out << "3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 7\n";  // vertex 7 out of range
  }
  CHECK_THROWS_WITH_AS(read_mesh(path), doctest::Contains("out of range"), Error);

  {
    std::ofstream out(path);
    out << "3 1\n0 0 1\nbogus line\n0 1 1\n0 1 2\n";
  }
  try {
    read_mesh(path);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == Status::ParseError);
    CHECK(e.index() == 3);  // 1-based line number
  }

  {
    std::ofstream out(path);
    out << "4 2\n0 0 1\n1 0 1\n0 1 1\n";  // truncated
  }
  CHECK_THROWS_AS(read_mesh(path), Error);

  {
    std::ofstream out(path);
    out << "4 1\n0 0 1\n1 0 1\n1 1 0\n0 1 1\n0 1 2\n";  // vertex 2 flagged interior but lies on the boundary
  }
  try {
    read_mesh(path);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.code() == Status::ValidationError);
  }

  std::filesystem::remove(path);
}
