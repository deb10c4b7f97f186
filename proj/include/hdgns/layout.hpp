#ifndef HDGNS_LAYOUT_HPP
#define HDGNS_LAYOUT_HPP

#include "hdgns/basis.hpp"
#include "hdgns/mesh.hpp"

namespace hdgns {

/// Global degree-of-freedom layout for the four fields: cell velocity u,
/// cell pressure p (degree k-1), trace velocity ubar and trace pressure pbar
/// (both degree k on faces). Blocks are ordered [u | p | ubar | pbar]; dofs
/// are contiguous per cell / per face. Dirichlet-constrained ubar dofs are
/// kept in the numbering and handled by identity rows.
struct SpaceLayout {
  int degree = 1;
  int n_cells = 0;
  int n_faces = 0;

  int cell_u = 0;    ///< velocity dofs per cell: 2 * dim P_k
  int cell_p = 0;    ///< pressure dofs per cell: dim P_{k-1}
  int face_u = 0;    ///< trace velocity dofs per face: 2 * (k+1)
  int face_p = 0;    ///< trace pressure dofs per face: k+1

  long n_u = 0, n_p = 0, n_ubar = 0, n_pbar = 0;
  long off_u = 0, off_p = 0, off_ubar = 0, off_pbar = 0;

  long total() const { return n_u + n_p + n_ubar + n_pbar; }
  long condensed() const { return n_ubar + n_pbar; }

  int scalar_cell_basis() const { return cell_basis_size(degree); }

  long u_dof(int cell, int comp, int i) const {
    return off_u + long(cell) * cell_u + long(comp) * (cell_u / 2) + i;
  }
  long p_dof(int cell, int i) const { return off_p + long(cell) * cell_p + i; }
  long ubar_dof(int face, int comp, int i) const {
    return off_ubar + long(face) * face_u + long(comp) * (face_u / 2) + i;
  }
  long pbar_dof(int face, int i) const {
    return off_pbar + long(face) * face_p + i;
  }

  /// Index in the condensed (face-only) system: ubar block first, then pbar.
  long cond_ubar(int face, int comp, int i) const {
    return ubar_dof(face, comp, i) - off_ubar;
  }
  long cond_pbar(int face, int i) const {
    return n_ubar + pbar_dof(face, i) - off_pbar;
  }
};

/// Build the layout for polynomial degree k >= 1.
SpaceLayout build_layout(const Mesh& mesh, int k);

}  // namespace hdgns

#endif
