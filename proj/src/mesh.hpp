#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dleig {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

// Triangulation of a polygon. Triangles are counterclockwise index triples;
// boundary_flags[v] is true exactly when vertex v lies on the boundary.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::uint8_t> boundary_flags;
  double h = 0.0;  // nominal mesh size: longest edge length

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_interior() const;
};

double triangle_signed_area(const Point& a, const Point& b, const Point& c);

// Structured grid of (n+1)^2 vertices, cells split by the lower-left to
// upper-right diagonal. Vertices are numbered row-major by grid position.
Mesh generate_uniform_mesh(int n, const Rect& rect);

// Splits every triangle into 4 congruent children through edge midpoints.
// Midpoints of boundary edges become boundary vertices.
Mesh refine_uniform(const Mesh& mesh);

// Checks the Mesh invariants: positive triangle areas, every edge shared by
// exactly 2 triangles or exactly 1 (boundary), flags matching the boundary.
void validate_mesh(const Mesh& mesh);

double total_area(const Mesh& mesh);
double longest_edge(const Mesh& mesh);

struct MeshReadReport {
  int reoriented = 0;  // clockwise triangles fixed up during reading
};

// Text format: "nv nt", nv lines "x y flag", nt lines "i j k" (0-based).
Mesh read_mesh(const std::string& path, MeshReadReport* report = nullptr);
void write_mesh(const Mesh& mesh, const std::string& path);

}  // namespace dleig
