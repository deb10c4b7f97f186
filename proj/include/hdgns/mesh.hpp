// Conforming triangular meshes of the unit square and the backward-facing
// step domain, with oriented faces, cell-face adjacency and boundary tags.

#ifndef HDGNS_MESH_HPP
#define HDGNS_MESH_HPP

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hdgns/types.hpp"

namespace hdgns {

enum class BoundaryTag { none, wall, lid, inflow, outflow };

std::string to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& s);

struct FaceRecord {
  std::array<int, 2> verts{-1, -1};  ///< endpoint vertices, canonical order
  std::array<int, 2> cells{-1, -1};  ///< adjacent cells; cells[1] < 0 on the boundary
  Vec2 normal;                       ///< unit normal, outward from cells[0]
  double length = 0.0;               ///< face diameter h_F
  BoundaryTag tag = BoundaryTag::none;

  bool is_boundary() const { return cells[1] < 0; }
};

/// Immutable simplicial mesh. Cells are stored counterclockwise; faces are
/// derived from the cell list in a deterministic order, so meshes with the
/// same vertex/cell data always enumerate faces identically.
class Mesh {
 public:
  using CellVerts = std::array<int, 3>;
  using EdgeKey = std::pair<int, int>;

  Mesh(std::vector<Vec2> vertices, std::vector<CellVerts> cells,
       const std::map<EdgeKey, BoundaryTag>& boundary_tags = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_boundary_faces() const { return num_boundary_faces_; }

  Vec2 vertex(int v) const { return vertices_[v]; }
  const CellVerts& cell(int c) const { return cells_[c]; }
  const FaceRecord& face(int f) const { return faces_[f]; }
  const std::vector<FaceRecord>& faces() const { return faces_; }

  /// Face indices of cell c; local face i joins cell vertices i and (i+1)%3.
  const std::array<int, 3>& cell_faces(int c) const { return cell_faces_[c]; }
  /// +1 if the stored face normal is outward for cell c, -1 otherwise.
  double cell_face_sign(int c, int local_face) const {
    return faces_[cell_faces_[c][local_face]].cells[0] == c ? 1.0 : -1.0;
  }

  double cell_area(int c) const { return areas_[c]; }
  /// Cell diameter h_K, defined as the longest edge.
  double cell_diameter(int c) const { return diameters_[c]; }
  Vec2 cell_centroid(int c) const;
  double total_area() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<CellVerts> cells_;
  std::vector<FaceRecord> faces_;
  std::vector<std::array<int, 3>> cell_faces_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  int num_boundary_faces_ = 0;
};

/// Generate a structured unit-square mesh with nx*nx squares, each split
/// along the lower-left to upper-right diagonal. Boundary faces on x2 = 1
/// carry the "lid" tag, all other boundary faces "wall".
Mesh generate_unit_square(int nx);

/// Generate a structured mesh of ([0,10]x[0,2]) \ ([0,1]x[0,1]) with n cells
/// per unit length. Faces on x1 = 0 are tagged "inflow", faces on x1 = 10
/// "outflow", everything else "wall".
Mesh generate_bfs(int n);

/// Plain-text mesh serialization. Coordinates are written as C hex floats so
/// that read(write(m)) reproduces them bit-exactly.
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);

}  // namespace hdgns

#endif
