#include "hdgns/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace hdgns {

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::none: return "none";
    case BoundaryTag::wall: return "wall";
    case BoundaryTag::lid: return "lid";
    case BoundaryTag::inflow: return "inflow";
    case BoundaryTag::outflow: return "outflow";
  }
  return "none";
}

BoundaryTag boundary_tag_from_string(const std::string& s) {
  if (s == "wall") return BoundaryTag::wall;
  if (s == "lid") return BoundaryTag::lid;
  if (s == "inflow") return BoundaryTag::inflow;
  if (s == "outflow") return BoundaryTag::outflow;
  if (s == "none") return BoundaryTag::none;
  throw Error("unknown boundary tag '" + s + "'");
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<CellVerts> cells,
           const std::map<EdgeKey, BoundaryTag>& boundary_tags)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const int nc = num_cells();
  areas_.resize(nc);
  diameters_.resize(nc);
  cell_faces_.resize(nc);

  for (int c = 0; c < nc; ++c) {
    const auto& cv = cells_[c];
    for (int v : cv) {
      if (v < 0 || v >= num_vertices())
        throw Error("cell " + std::to_string(c) + " references vertex " +
                    std::to_string(v) + " of " + std::to_string(num_vertices()));
    }
    const Vec2 e1 = vertices_[cv[1]] - vertices_[cv[0]];
    const Vec2 e2 = vertices_[cv[2]] - vertices_[cv[0]];
    const double area = 0.5 * e1.cross(e2);
    if (area <= 0.0)
      throw Error("cell " + std::to_string(c) + " has non-positive area");
    areas_[c] = area;
    double h = 0.0;
    for (int e = 0; e < 3; ++e)
      h = std::max(h, (vertices_[cv[(e + 1) % 3]] - vertices_[cv[e]]).norm());
    diameters_[c] = h;
  }

  auto centroid = [&](int c) {
    const auto& cv = cells_[c];
    return (1.0 / 3.0) * (vertices_[cv[0]] + vertices_[cv[1]] + vertices_[cv[2]]);
  };

  // Faces in deterministic order: first appearance while walking cells.
  std::map<EdgeKey, int> face_of_edge;
  for (int c = 0; c < nc; ++c) {
    for (int e = 0; e < 3; ++e) {
      const int a = cells_[c][e];
      const int b = cells_[c][(e + 1) % 3];
      const EdgeKey key{std::min(a, b), std::max(a, b)};
      auto it = face_of_edge.find(key);
      if (it == face_of_edge.end()) {
        FaceRecord f;
        f.verts = {key.first, key.second};
        f.cells = {c, -1};
        const Vec2 t = vertices_[key.second] - vertices_[key.first];
        f.length = t.norm();
        Vec2 n{t.y / f.length, -t.x / f.length};
        // orient outward from the first adjacent cell
        const Vec2 mid = 0.5 * (vertices_[key.first] + vertices_[key.second]);
        if (n.dot(mid - centroid(c)) < 0.0) n = -1.0 * n;
        f.normal = n;
        const int fi = static_cast<int>(faces_.size());
        faces_.push_back(f);
        face_of_edge.emplace(key, fi);
        cell_faces_[c][e] = fi;
      } else {
        FaceRecord& f = faces_[it->second];
        if (f.cells[1] >= 0)
          throw Error("edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ") has more than two cells");
        f.cells[1] = c;
        cell_faces_[c][e] = it->second;
      }
    }
  }

  for (auto& f : faces_) {
    if (!f.is_boundary()) continue;
    ++num_boundary_faces_;
    auto it = boundary_tags.find({f.verts[0], f.verts[1]});
    if (it != boundary_tags.end()) f.tag = it->second;
  }
}

Vec2 Mesh::cell_centroid(int c) const {
  const auto& cv = cells_[c];
  return (1.0 / 3.0) * (vertices_[cv[0]] + vertices_[cv[1]] + vertices_[cv[2]]);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (double v : areas_) a += v;
  return a;
}

Mesh generate_unit_square(int nx) {
  if (nx < 1) throw Error("generate_unit_square: nx must be >= 1");
  const int nv = nx + 1;
  std::vector<Vec2> verts(static_cast<std::size_t>(nv) * nv);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i)
      verts[j * nv + i] = {double(i) / nx, double(j) / nx};

  std::vector<Mesh::CellVerts> cells;
  cells.reserve(2 * nx * nx);
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = j * nv + i;
      const int b = j * nv + i + 1;
      const int c = (j + 1) * nv + i + 1;
      const int d = (j + 1) * nv + i;
      cells.push_back({a, b, c});  // diagonal a-c
      cells.push_back({a, c, d});
    }
  }

  std::map<Mesh::EdgeKey, BoundaryTag> tags;
  auto add_tag = [&](int a, int b, BoundaryTag t) {
    tags[{std::min(a, b), std::max(a, b)}] = t;
  };
  for (int i = 0; i < nx; ++i) {
    add_tag(i, i + 1, BoundaryTag::wall);                            // y = 0
    add_tag(nx * nv + i, nx * nv + i + 1, BoundaryTag::lid);         // y = 1
  }
  for (int j = 0; j < nx; ++j) {
    add_tag(j * nv, (j + 1) * nv, BoundaryTag::wall);                // x = 0
    add_tag(j * nv + nx, (j + 1) * nv + nx, BoundaryTag::wall);      // x = 1
  }
  return Mesh(std::move(verts), std::move(cells), tags);
}

Mesh generate_bfs(int n) {
  if (n < 1) throw Error("generate_bfs: n must be >= 1");
  const int ni = 10 * n;  // cells along x
  const int nj = 2 * n;   // cells along y
  const double h = 1.0 / n;

  auto in_domain = [&](int i, int j) { return i >= n || j >= n; };

  // compact vertex numbering over used grid points
  std::vector<int> vid(static_cast<std::size_t>(ni + 1) * (nj + 1), -1);
  std::vector<Vec2> verts;
  auto grid = [&](int i, int j) { return j * (ni + 1) + i; };
  for (int j = 0; j <= nj; ++j) {
    for (int i = 0; i <= ni; ++i) {
      bool used = false;
      for (int dj = -1; dj <= 0 && !used; ++dj)
        for (int di = -1; di <= 0 && !used; ++di) {
          const int ci = i + di, cj = j + dj;
          if (ci >= 0 && ci < ni && cj >= 0 && cj < nj && in_domain(ci, cj))
            used = true;
        }
      if (used) {
        vid[grid(i, j)] = static_cast<int>(verts.size());
        verts.push_back({i * h, j * h});
      }
    }
  }

  std::vector<Mesh::CellVerts> cells;
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < ni; ++i) {
      if (!in_domain(i, j)) continue;
      const int a = vid[grid(i, j)];
      const int b = vid[grid(i + 1, j)];
      const int c = vid[grid(i + 1, j + 1)];
      const int d = vid[grid(i, j + 1)];
      cells.push_back({a, b, c});
      cells.push_back({a, c, d});
    }
  }

  std::map<Mesh::EdgeKey, BoundaryTag> tags;
  auto add_tag = [&](int a, int b, BoundaryTag t) {
    tags[{std::min(a, b), std::max(a, b)}] = t;
  };
  // horizontal edges between (i,j)-(i+1,j) are boundary when exactly one of
  // the squares above/below is in the domain; same for vertical edges.
  for (int j = 0; j <= nj; ++j) {
    for (int i = 0; i < ni; ++i) {
      const bool below = j > 0 && in_domain(i, j - 1);
      const bool above = j < nj && in_domain(i, j);
      if (below == above) continue;
      add_tag(vid[grid(i, j)], vid[grid(i + 1, j)], BoundaryTag::wall);
    }
  }
  for (int i = 0; i <= ni; ++i) {
    for (int j = 0; j < nj; ++j) {
      const bool left = i > 0 && in_domain(i - 1, j);
      const bool right = i < ni && in_domain(i, j);
      if (left == right) continue;
      BoundaryTag t = BoundaryTag::wall;
      if (i == 0) t = BoundaryTag::inflow;
      if (i == ni) t = BoundaryTag::outflow;
      add_tag(vid[grid(i, j)], vid[grid(i, j + 1)], t);
    }
  }
  return Mesh(std::move(verts), std::move(cells), tags);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "hdgmesh 1\n";
  out << mesh.num_vertices() << ' ' << mesh.num_cells() << ' '
      << mesh.num_boundary_faces() << '\n';
  char buf[64];
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2 p = mesh.vertex(v);
    std::snprintf(buf, sizeof buf, "%a %a\n", p.x, p.y);
    out << buf;
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cv = mesh.cell(c);
    out << cv[0] << ' ' << cv[1] << ' ' << cv[2] << '\n';
  }
  for (const auto& f : mesh.faces()) {
    if (!f.is_boundary()) continue;
    out << f.verts[0] << ' ' << f.verts[1] << ' ' << to_string(f.tag) << '\n';
  }
}

namespace {

struct LineReader {
  std::istream& in;
  int line = 0;

  std::string next() {
    std::string s;
    while (std::getline(in, s)) {
      ++line;
      if (!s.empty() && s.back() == '\r') s.pop_back();
      if (!s.empty()) return s;
    }
    throw Error("mesh file line " + std::to_string(line + 1) +
                ": unexpected end of file");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("mesh file line " + std::to_string(line) + ": " + what);
  }
};

double parse_double(LineReader& lr, const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') lr.fail("bad number '" + tok + "'");
  return v;
}

long parse_int(LineReader& lr, const std::string& tok) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') lr.fail("bad integer '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> t;
  std::string w;
  while (is >> w) t.push_back(w);
  return t;
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  LineReader lr{in};
  {
    std::string header;
    if (!std::getline(in, header)) throw Error("mesh file line 1: empty file");
    lr.line = 1;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "hdgmesh 1") lr.fail("expected header 'hdgmesh 1'");
  }
  const auto counts = tokens(lr.next());
  if (counts.size() != 3) lr.fail("expected '<nverts> <ncells> <nbfaces>'");
  const long nv = parse_int(lr, counts[0]);
  const long nc = parse_int(lr, counts[1]);
  const long nb = parse_int(lr, counts[2]);
  if (nv < 3 || nc < 1 || nb < 3) lr.fail("implausible mesh size counts");

  std::vector<Vec2> verts(nv);
  for (long v = 0; v < nv; ++v) {
    const auto t = tokens(lr.next());
    if (t.size() != 2) lr.fail("expected 'x y'");
    verts[v] = {parse_double(lr, t[0]), parse_double(lr, t[1])};
  }
  std::vector<Mesh::CellVerts> cells(nc);
  for (long c = 0; c < nc; ++c) {
    const auto t = tokens(lr.next());
    if (t.size() != 3) lr.fail("expected 'v0 v1 v2'");
    for (int e = 0; e < 3; ++e) {
      const long v = parse_int(lr, t[e]);
      if (v < 0 || v >= nv)
        lr.fail("cell references vertex " + std::to_string(v) + " of " +
                std::to_string(nv));
      cells[c][e] = static_cast<int>(v);
    }
    const Vec2 e1 = verts[cells[c][1]] - verts[cells[c][0]];
    const Vec2 e2 = verts[cells[c][2]] - verts[cells[c][0]];
    if (0.5 * e1.cross(e2) <= 0.0) lr.fail("cell has non-positive area");
  }
  std::map<Mesh::EdgeKey, BoundaryTag> tags;
  for (long b = 0; b < nb; ++b) {
    const auto t = tokens(lr.next());
    if (t.size() != 3) lr.fail("expected 'v0 v1 <tag>'");
    const long a = parse_int(lr, t[0]);
    const long c = parse_int(lr, t[1]);
    if (a < 0 || a >= nv || c < 0 || c >= nv) lr.fail("face vertex out of range");
    BoundaryTag tag;
    try {
      tag = boundary_tag_from_string(t[2]);
    } catch (const Error& e) {
      lr.fail(e.what());
    }
    tags[{std::min<long>(a, c), std::max<long>(a, c)}] = tag;
  }
  try {
    return Mesh(std::move(verts), std::move(cells), tags);
  } catch (const Error& e) {
    throw Error("mesh file: " + std::string(e.what()));
  }
}

}  // namespace hdgns
