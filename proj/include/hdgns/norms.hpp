// Mesh-dependent (semi-)norms of discrete fields and of errors against
// analytic solutions: broken H1 velocity norm with trace mismatch, the
// normal-mismatch seminorm, their gamma-weighted combination, the pressure
// triple norm, and plain L2 norms.

#ifndef HDGNS_NORMS_HPP
#define HDGNS_NORMS_HPP

#include <array>

#include "hdgns/fields.hpp"

namespace hdgns {

/// [grad u_1, grad u_2] rows of the velocity gradient.
using TensorField = std::function<std::array<Vec2, 2>(Vec2)>;

struct NormSet {
  double v_norm = 0.0;   ///< broken grad + h^-1 trace mismatch
  double r_semi = 0.0;   ///< h^-1 normal mismatch (u - ubar).n
  double v_gamma = 0.0;  ///< sqrt(v_norm^2 + gamma/mu r_semi^2)
  double p_norm = 0.0;   ///< L2 pressure + h-weighted trace pressure
  double one_h = 0.0;    ///< v_norm of (v, {v}) with averaged traces
  double l2_u = 0.0;
  double l2_p = 0.0;
};

/// Norms of the discrete state itself.
NormSet compute_norms(const Mesh& mesh, const SpaceLayout& layout,
                      const StateVector& state, double gamma, double mu);

/// Norms of (u_exact - u_h, p_exact - p_h); exact traces are restrictions of
/// the exact fields to the faces.
NormSet compute_error_norms(const Mesh& mesh, const SpaceLayout& layout,
                            const StateVector& state, const VectorField& u,
                            const TensorField& grad_u, const ScalarField& p,
                            double gamma, double mu);

}  // namespace hdgns

#endif
