// Dense, small-scale verification of the linear-algebra results behind the
// augmented Lagrangian preconditioners: the inverse expansion of the Schur
// complement of a singularly perturbed saddle-point matrix, its mass-matrix
// specialization, the factorization of the facet-jump penalty through the
// trace pressure mass matrix, and the equivalence of the penalized and mixed
// forms of the normal-jump projection problem. Everything is checked against
// brute-force dense computations.

#ifndef HDGNS_PERTURBLAB_HPP
#define HDGNS_PERTURBLAB_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

#include "hdgns/mesh.hpp"

namespace hdgns {

/// A dense saddle-point instance: nonsingular A (n x n), full-row-rank B
/// (m x n, m < n), SPD M (m x m), penalty weight gamma, and a symmetric
/// singular J with null(J) = null(B) and range(J) = range(B^T).
struct DenseSaddle {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd M;
  Eigen::MatrixXd J;
  double gamma = 0.0;

  /// Random instance with J = B^T W B for a random SPD W.
  static DenseSaddle random(int n, int m, double gamma, std::mt19937_64& rng);
  /// As above but with the augmented-Lagrangian choice J = B^T M^-1 B.
  static DenseSaddle random_al(int n, int m, double gamma, std::mt19937_64& rng);

  /// Hypothesis checks: rank(B) = m, J symmetric, null(J) in null(B),
  /// range(J) = range(B^T). Throws on violation.
  void validate() const;
};

struct ProjectedInverses {
  Eigen::MatrixXd P;   ///< orthogonal projector onto null(J)
  Eigen::MatrixXd Q;   ///< I - P
  Eigen::MatrixXd EP;  ///< P (PAP)^+ P
  Eigen::MatrixXd EQ;  ///< Q (QJQ)^+ Q
};

ProjectedInverses projected_inverses(const DenseSaddle& ds);

/// Discrepancies of -S = B (A + gamma J)^-1 B^T against the expansion
/// gamma^-1 B E_Q B^T +/- gamma^-2 B R_gamma B^T (both signs tried).
struct SchurExpansionReport {
  double residual_plus = 0.0;     ///< gamma^-2 term added
  double residual_minus = 0.0;    ///< gamma^-2 term subtracted
  double leading_residual = 0.0;  ///< || -S - gamma^-1 B E_Q B^T ||
  double scale = 0.0;             ///< || -S ||
  bool minus_matches = false;     ///< which sign reproduces -S exactly
};

SchurExpansionReport verify_schur_expansion(const DenseSaddle& ds);

/// Mass-matrix specialization: || B E_Q B^T - M || and || -S - gamma^-1 M ||.
struct ALMassIdentityReport {
  double first_order_identity = 0.0;  ///< || B E_Q B^T - M ||
  double mass_gap = 0.0;              ///< || -S - gamma^-1 M ||
};

ALMassIdentityReport verify_al_mass_identity(const DenseSaddle& ds);

/// Equivalence of the penalized normal-jump projection
///   (M_u + gamma D_uu) u = G
/// with its mixed form in (u, pbar), and with the factorized augmentation
/// (M_u + gamma B^T Mbar^-1 B) u = G, on a small mesh with a random source.
struct JumpEquivalenceReport {
  double u_diff_rel = 0.0;     ///< penalized vs mixed velocity
  double pbar_diff_rel = 0.0;  ///< multiplier vs scaled normal jump
  double u_alt_diff_rel = 0.0; ///< penalized vs factorized augmentation
};

JumpEquivalenceReport verify_jump_equivalence(const Mesh& mesh, int k,
                                              double gamma, std::uint64_t seed);

/// Run all verifications over randomized instances and write a JSON report;
/// returns false if any check fails its tolerance.
bool run_verification(std::uint64_t seed, std::ostream& text_out,
                      std::string* json_out);

}  // namespace hdgns

#endif
