// Assembly of the HDG discretization of the incompressible Navier-Stokes
// equations: viscous form a_h, upwinded convection o_h (Picard or Newton
// linearized), pressure-velocity coupling b_h = b_1 + b_2, the
// divergence-conformity penalty g_h and its facet-jump counterpart d_h,
// and the trace pressure mass matrix.

#ifndef HDGNS_ASSEMBLY_HPP
#define HDGNS_ASSEMBLY_HPP

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <set>

#include "hdgns/layout.hpp"
#include "hdgns/mesh.hpp"
#include "hdgns/sparse.hpp"

namespace hdgns {

enum class ConvectionMode { none, picard, newton };

/// Boundary conditions and forcing for one flow problem. Dirichlet tags get
/// the velocity data imposed on the trace space; outflow faces leave the
/// trace velocity free and pin the trace pressure to zero.
struct BoundaryData {
  std::function<Vec2(Vec2)> velocity;           ///< Dirichlet data g(x)
  std::function<Vec2(Vec2)> forcing;            ///< body force f(x); null = 0
  std::set<BoundaryTag> dirichlet_tags;
  std::set<BoundaryTag> outflow_tags;

  static BoundaryData lid_cavity();
  static BoundaryData backward_facing_step();
  /// All-Dirichlet square with user-supplied data and forcing.
  static BoundaryData manufactured(std::function<Vec2(Vec2)> g,
                                   std::function<Vec2(Vec2)> f);
};

/// Fixed dofs (Dirichlet trace velocity, pinned outflow trace pressure) with
/// their values. Fixed rows become identity rows in assembled systems.
struct Constraints {
  std::vector<char> fixed;
  Vector values;
  long num_fixed = 0;

  bool is_fixed(long i) const { return fixed[i] != 0; }
};

Constraints build_constraints(const Mesh& mesh, const SpaceLayout& layout,
                              const BoundaryData& bdata);

/// Coefficients of all four fields, ordered per SpaceLayout.
struct StateVector {
  Vector data;

  static StateVector zero(const SpaceLayout& layout) {
    return StateVector{Vector(layout.total(), 0.0)};
  }
  /// Zero state with constrained entries set to their boundary values.
  static StateVector initial(const SpaceLayout& layout, const Constraints& c);
};

struct AssemblyOptions {
  double mu = 1.0;
  double alpha = 40.0;  ///< interior penalty; default 10 k^2 with k = 2
  double gamma = 0.0;   ///< divergence-conformity augmentation weight
  ConvectionMode mode = ConvectionMode::none;
};

/// Matrices of the linearized problem plus per-cell dense element matrices
/// used for static condensation. A/G/B blocks depend only on the mesh and
/// degree; N blocks are the convection linearization at the state w.
struct BlockSystem {
  const Mesh* mesh = nullptr;
  const SpaceLayout* layout = nullptr;

  SparseMatrix A_uu, A_uubar, A_ubaru, A_ubarubar;
  SparseMatrix N_uu, N_uubar, N_ubaru, N_ubarubar;
  SparseMatrix G_uu, G_uubar, G_ubaru, G_ubarubar;
  SparseMatrix B_pu, B_pbaru;
  std::optional<SparseMatrix> D_uu;
  SparseMatrix Mbar;

  double mu = 1.0;
  double alpha = 0.0;
  double gamma = 0.0;
  ConvectionMode mode = ConvectionMode::none;

  /// Faces with the stabilized open-boundary treatment: the convective flux
  /// keeps only its outgoing part (w.n)+ u there, tested against the cell
  /// velocity, so backflow cannot feed energy in through the boundary.
  std::vector<char> outflow_faces;

  Vector load;    ///< forcing and boundary-data load over all rows
  StateVector w;  ///< linearization state

  /// Per-cell dense element matrix of mu a_h + gamma g_h + o_h + b_h, over
  /// local dofs ordered [u p | ubar pbar].
  std::vector<Eigen::MatrixXd> local_K;

  long n_u() const { return layout->n_u; }
};

/// Assemble every block of the linearized system at state w.
BlockSystem assemble_block_system(const Mesh& mesh, const SpaceLayout& layout,
                                  const AssemblyOptions& opts,
                                  const StateVector& w,
                                  const BoundaryData& bdata);

// --- individual forms (same kernels as assemble_block_system) ---

struct StokesBlocks {
  SparseMatrix A_uu, A_uubar, A_ubaru, A_ubarubar;
  SparseMatrix B_pu, B_pbaru;
  double mu = 1.0;
  double alpha = 0.0;
};
StokesBlocks assemble_stokes_forms(const Mesh& mesh, const SpaceLayout& layout,
                                   double mu, double alpha);

struct ConvectionBlocks {
  SparseMatrix N_uu, N_uubar, N_ubaru, N_ubarubar;
};
ConvectionBlocks assemble_convection(const Mesh& mesh, const SpaceLayout& layout,
                                     const StateVector& w, ConvectionMode mode);

struct GhBlocks {
  SparseMatrix G_uu, G_uubar, G_ubaru, G_ubarubar;
};
GhBlocks assemble_gh(const Mesh& mesh, const SpaceLayout& layout);

/// Facet-jump penalty matrix of <h_F^-1 [[u.n]], [[v.n]]>; couples cell
/// velocity dofs across faces, so it is kept out of the condensed path and
/// used as a dense reference only.
SparseMatrix assemble_dh(const Mesh& mesh, const SpaceLayout& layout);

/// Trace pressure mass matrix, block diagonal per face, face blocks scaled
/// by h_F.
SparseMatrix assemble_trace_mass(const Mesh& mesh, const SpaceLayout& layout);

/// Load vector: (f, v) on cell velocity rows and boundary-data terms
/// <g.n, qbar> on constraint rows of Dirichlet boundary faces.
Vector assemble_load(const Mesh& mesh, const SpaceLayout& layout,
                     const BoundaryData& bdata, ConvectionMode mode);

/// Residual of the nonlinear penalized problem at the given state:
/// [mu a_h + o_h(state; state, .) + gamma g_h + b_h] - load, with constrained
/// rows zeroed (they hold exactly by construction of the state).
Vector nonlinear_residual(const BlockSystem& sys, const StateVector& state,
                          const Constraints& cons);

/// Monolithic four-field matrix with constraints applied (identity rows,
/// columns moved to the right-hand side).
SparseMatrix monolithic_matrix(const BlockSystem& sys, const Constraints& cons);
/// Variant with the facet-jump augmentation gamma*D_uu in the velocity block
/// instead of gamma*g_h (dense reference path; requires sys.D_uu).
SparseMatrix monolithic_matrix_dh(const BlockSystem& sys, const Constraints& cons);
/// Right-hand side consistent with monolithic_matrix for given raw rhs.
Vector monolithic_rhs(const BlockSystem& sys, const Constraints& cons,
                      const Vector& rhs);

/// Cellwise divergence moments and facewise normal-jump moments of the
/// velocity in a state; both vanish at a converged solution.
struct DivergenceReport {
  double max_cell_moment = 0.0;
  double max_face_jump_moment = 0.0;
};
DivergenceReport divergence_moments(const Mesh& mesh, const SpaceLayout& layout,
                                    const StateVector& state,
                                    const BoundaryData& bdata);

/// Subtract the mean of the cell pressure from p and pbar (enclosed flows
/// determine the pressure only up to a constant).
void remove_pressure_mean(const Mesh& mesh, const SpaceLayout& layout,
                          StateVector& state);

}  // namespace hdgns

#endif
