// Static condensation: per-cell elimination of (u, p) from the augmented
// four-field system, producing the face-only system in (ubar, pbar), local
// factorizations for back-substitution, and a dense reference path for the
// facet-jump augmented system (which does not condense cell-locally).

#ifndef HDGNS_CONDENSE_HPP
#define HDGNS_CONDENSE_HPP

#include <Eigen/Dense>

#include "hdgns/assembly.hpp"
#include "hdgns/sparse.hpp"

namespace hdgns {

/// Face-only system K y = rhs over [ubar | pbar] with constraint identity
/// rows, plus everything needed to recover (u, p) cellwise.
struct CondensedSystem {
  const Mesh* mesh = nullptr;
  const SpaceLayout* layout = nullptr;

  SparseMatrix K;    ///< condensed matrix, blocks [[Fbar, Bbar_up'],[Bbar_pu, S_pp]]
  Vector rhs;
  long n_ubar = 0;
  long n_pbar = 0;
  double gamma = 0.0;
  SparseMatrix Mbar;  ///< trace pressure mass (pbar indexing of the condensed system)
  std::vector<char> fixed;  ///< constrained condensed dofs (identity rows in K)

  struct CellData {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;  ///< factors of the local (u,p) saddle block
    Eigen::MatrixXd Kxy;                      ///< local coupling to face dofs
    Eigen::VectorXd bx;                       ///< local rhs of the (u,p) rows
    std::vector<long> ydofs;                  ///< condensed indices of the cell's face dofs
  };
  std::vector<CellData> cells;

  SparseMatrix trace_velocity_block() const { return K.block(0, int(n_ubar), 0, int(n_ubar)); }
  SparseMatrix coupling_block() const {
    return K.block(int(n_ubar), int(n_ubar + n_pbar), 0, int(n_ubar));
  }
  SparseMatrix pressure_schur_block() const {
    return K.block(int(n_ubar), int(n_ubar + n_pbar), int(n_ubar),
                   int(n_ubar + n_pbar));
  }
};

/// Condense the assembled system for the given global right-hand side.
/// Throws naming the cell if a local saddle block is singular.
CondensedSystem condense(const BlockSystem& sys, const Constraints& cons,
                         const Vector& rhs);

/// Recover the full state from a condensed solution.
StateVector back_substitute(const CondensedSystem& cond, const Vector& y);

/// Dense reference condensation. Eliminates the (u, p) block of the
/// monolithic matrix in one shot; with Augmentation::dh the facet-jump
/// penalty gamma*D_uu is used in place of gamma*g_h. Guarded to small meshes.
enum class Augmentation { gh, dh };

struct DenseCondensed {
  Eigen::MatrixXd K;      ///< condensed matrix over [ubar | pbar]
  Eigen::VectorXd rhs;
  long n_ubar = 0;
  long n_pbar = 0;
};

DenseCondensed condense_dense_reference(const BlockSystem& sys,
                                        const Constraints& cons,
                                        const Vector& rhs, Augmentation aug,
                                        long max_dofs = 2000);

/// Dense monolithic matrix for the chosen augmentation (reference only).
Eigen::MatrixXd dense_monolithic(const BlockSystem& sys, const Constraints& cons,
                                 Augmentation aug);

}  // namespace hdgns

#endif
