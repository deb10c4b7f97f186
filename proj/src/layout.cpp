#include "hdgns/layout.hpp"

namespace hdgns {

SpaceLayout build_layout(const Mesh& mesh, int k) {
  if (k < 1)
    throw Error("build_layout: degree k must be >= 1 (pressure space is P_{k-1})");
  if (k > kMaxDegree)
    throw Error("build_layout: degree k > " + std::to_string(kMaxDegree) +
                " not supported");
  SpaceLayout l;
  l.degree = k;
  l.n_cells = mesh.num_cells();
  l.n_faces = mesh.num_faces();
  l.cell_u = 2 * cell_basis_size(k);
  l.cell_p = cell_basis_size(k - 1);
  l.face_u = 2 * edge_basis_size(k);
  l.face_p = edge_basis_size(k);
  l.n_u = long(l.n_cells) * l.cell_u;
  l.n_p = long(l.n_cells) * l.cell_p;
  l.n_ubar = long(l.n_faces) * l.face_u;
  l.n_pbar = long(l.n_faces) * l.face_p;
  l.off_u = 0;
  l.off_p = l.n_u;
  l.off_ubar = l.n_u + l.n_p;
  l.off_pbar = l.n_u + l.n_p + l.n_ubar;
  return l;
}

}  // namespace hdgns
