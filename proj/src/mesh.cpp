#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "errors.hpp"

namespace dleig {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::map<EdgeKey, int> edge_use_counts(const Mesh& mesh) {
  std::map<EdgeKey, int> counts;
  for (const auto& t : mesh.triangles) {
    counts[edge_key(t[0], t[1])]++;
    counts[edge_key(t[1], t[2])]++;
    counts[edge_key(t[2], t[0])]++;
  }
  return counts;
}

}  // namespace

int Mesh::num_interior() const {
  int k = 0;
  for (auto f : boundary_flags) k += (f == 0);
  return k;
}

double triangle_signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh generate_uniform_mesh(int n, const Rect& rect) {
  if (n < 1) fail(Status::InvalidArgument, "generate_uniform_mesh: n must be >= 1");
  if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0)) {
    fail(Status::InvalidArgument, "generate_uniform_mesh: degenerate rectangle");
  }
  const double dx = rect.width() / n;
  const double dy = rect.height() / n;

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  mesh.boundary_flags.reserve(mesh.vertices.capacity());
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.push_back({rect.x0 + i * dx, rect.y0 + j * dy});
      mesh.boundary_flags.push_back(i == 0 || i == n || j == 0 || j == n);
    }
  }

  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  mesh.h = std::hypot(dx, dy);
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  validate_mesh(mesh);
  const auto counts = edge_use_counts(mesh);

  Mesh out;
  out.vertices = mesh.vertices;
  out.boundary_flags = mesh.boundary_flags;

  std::map<EdgeKey, int> midpoint;
  const auto midpoint_of = [&](int a, int b) {
    const EdgeKey key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(out.vertices.size());
    out.vertices.push_back({0.5 * (mesh.vertices[static_cast<std::size_t>(a)].x + mesh.vertices[static_cast<std::size_t>(b)].x),
                            0.5 * (mesh.vertices[static_cast<std::size_t>(a)].y + mesh.vertices[static_cast<std::size_t>(b)].y)});
    out.boundary_flags.push_back(counts.at(key) == 1);
    midpoint.emplace(key, idx);
    return idx;
  };

  out.triangles.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const int m01 = midpoint_of(t[0], t[1]);
    const int m12 = midpoint_of(t[1], t[2]);
    const int m20 = midpoint_of(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({t[1], m12, m01});
    out.triangles.push_back({t[2], m20, m12});
    out.triangles.push_back({m01, m12, m20});
  }
  out.h = longest_edge(out);
  return out;
}

void validate_mesh(const Mesh& mesh) {
  const int nv = mesh.num_vertices();
  if (mesh.boundary_flags.size() != mesh.vertices.size()) {
    fail(Status::ValidationError, "mesh: boundary flag count does not match vertex count");
  }
  if (nv < 3 || mesh.triangles.empty()) {
    fail(Status::ValidationError, "mesh: needs at least 3 vertices and 1 triangle");
  }
  for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
    const auto& t = mesh.triangles[k];
    for (int v : t) {
      if (v < 0 || v >= nv) {
        fail(Status::ValidationError, "mesh: triangle " + std::to_string(k) + " references vertex " + std::to_string(v) + " out of range");
      }
    }
    const double area = triangle_signed_area(mesh.vertices[static_cast<std::size_t>(t[0])],
                                             mesh.vertices[static_cast<std::size_t>(t[1])],
                                             mesh.vertices[static_cast<std::size_t>(t[2])]);
    if (!(area > 0.0)) {
      fail(Status::ValidationError, "mesh: triangle " + std::to_string(k) + " has non-positive area");
    }
  }

  const auto counts = edge_use_counts(mesh);
  std::vector<std::uint8_t> on_boundary(static_cast<std::size_t>(nv), 0);
  for (const auto& [key, count] : counts) {
    if (count > 2) {
      fail(Status::ValidationError, "mesh: edge (" + std::to_string(key.first) + "," + std::to_string(key.second) + ") shared by " + std::to_string(count) + " triangles");
    }
    if (count == 1) {
      on_boundary[static_cast<std::size_t>(key.first)] = 1;
      on_boundary[static_cast<std::size_t>(key.second)] = 1;
    }
  }
  for (int v = 0; v < nv; ++v) {
    if ((mesh.boundary_flags[static_cast<std::size_t>(v)] != 0) != (on_boundary[static_cast<std::size_t>(v)] != 0)) {
      fail(Status::ValidationError, "mesh: boundary flag of vertex " + std::to_string(v) + " disagrees with edge structure");
    }
  }
}

double total_area(const Mesh& mesh) {
  double area = 0.0;
  for (const auto& t : mesh.triangles) {
    area += triangle_signed_area(mesh.vertices[static_cast<std::size_t>(t[0])],
                                 mesh.vertices[static_cast<std::size_t>(t[1])],
                                 mesh.vertices[static_cast<std::size_t>(t[2])]);
  }
  return area;
}

double longest_edge(const Mesh& mesh) {
  double longest = 0.0;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const Point& a = mesh.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>(e)])];
      const Point& b = mesh.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>((e + 1) % 3)])];
      longest = std::max(longest, std::hypot(b.x - a.x, b.y - a.y));
    }
  }
  return longest;
}

namespace {

// Line-oriented reader that reports 1-based line numbers on errors.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return std::istringstream(line);
    }
    fail(Status::ParseError, std::string("line ") + std::to_string(lineno_ + 1) + ": unexpected end of file, expected " + what, lineno_ + 1);
  }

  long lineno() const { return lineno_; }

 private:
  std::istream& in_;
  long lineno_ = 0;
};

[[noreturn]] void parse_fail(long lineno, const std::string& what) {
  fail(Status::ParseError, "line " + std::to_string(lineno) + ": " + what, lineno);
}

}  // namespace

Mesh read_mesh(const std::string& path, MeshReadReport* report) {
  std::ifstream in(path);
  if (!in) fail(Status::IoError, "cannot open mesh file: " + path);
  LineReader reader(in);

  long nv = 0, nt = 0;
  {
    auto line = reader.next("'nv nt' header");
    if (!(line >> nv >> nt) || nv < 0 || nt < 0) parse_fail(reader.lineno(), "malformed 'nv nt' header");
  }

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  mesh.boundary_flags.reserve(static_cast<std::size_t>(nv));
  for (long k = 0; k < nv; ++k) {
    auto line = reader.next("vertex line 'x y flag'");
    double x = 0, y = 0;
    int flag = -1;
    if (!(line >> x >> y >> flag)) parse_fail(reader.lineno(), "malformed vertex line");
    if (flag != 0 && flag != 1) parse_fail(reader.lineno(), "vertex flag must be 0 or 1");
    mesh.vertices.push_back({x, y});
    mesh.boundary_flags.push_back(static_cast<std::uint8_t>(flag));
  }

  int reoriented = 0;
  mesh.triangles.reserve(static_cast<std::size_t>(nt));
  for (long k = 0; k < nt; ++k) {
    auto line = reader.next("triangle line 'i j k'");
    int a = 0, b = 0, c = 0;
    if (!(line >> a >> b >> c)) parse_fail(reader.lineno(), "malformed triangle line");
    for (int v : {a, b, c}) {
      if (v < 0 || v >= nv) {
        fail(Status::ValidationError, "line " + std::to_string(reader.lineno()) + ": triangle references vertex " + std::to_string(v) + " out of range", reader.lineno());
      }
    }
    const double area = triangle_signed_area(mesh.vertices[static_cast<std::size_t>(a)],
                                             mesh.vertices[static_cast<std::size_t>(b)],
                                             mesh.vertices[static_cast<std::size_t>(c)]);
    if (area < 0.0) {
      std::swap(b, c);
      ++reoriented;
    } else if (area == 0.0) {
      fail(Status::ValidationError, "line " + std::to_string(reader.lineno()) + ": degenerate (zero-area) triangle", reader.lineno());
    }
    mesh.triangles.push_back({a, b, c});
  }

  validate_mesh(mesh);
  mesh.h = longest_edge(mesh);
  if (report != nullptr) report->reoriented = reoriented;
  return mesh;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Status::IoError, "cannot open mesh file for writing: " + path);
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  char buf[80];
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", mesh.vertices[v].x, mesh.vertices[v].y, mesh.boundary_flags[v] ? 1 : 0);
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) fail(Status::IoError, "failed writing mesh file: " + path);
}

}  // namespace dleig
