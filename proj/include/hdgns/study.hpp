// Manufactured-solution convergence study on the unit square.

#ifndef HDGNS_STUDY_HPP
#define HDGNS_STUDY_HPP

#include "hdgns/newton.hpp"
#include "hdgns/norms.hpp"

namespace hdgns {

/// A smooth exact solution with everything needed to build forcing and
/// boundary data: u is divergence-free, p has zero mean on the unit square.
struct ManufacturedSolution {
  VectorField u;
  TensorField grad_u;
  VectorField laplacian_u;
  ScalarField p;
  VectorField grad_p;

  /// f = -mu lap(u) + (u . grad) u + grad p  (convective form; u is
  /// divergence-free so this matches the stress-divergence form).
  VectorField forcing(double mu, bool with_convection = true) const;
  BoundaryData boundary_data(double mu, bool with_convection = true) const;
};

/// Divergence-free trigonometric vortex field, zero on the boundary of the
/// unit square, with p = cos(pi x) cos(pi y).
ManufacturedSolution trig_vortex();

/// Degree-2 polynomial solution contained in the k >= 2 discrete spaces.
ManufacturedSolution quadratic_solution();

struct StudyLevel {
  int nx = 0;
  NormSet error;
};

struct StudyResult {
  std::vector<StudyLevel> levels;
  std::vector<double> rate_v_gamma;  ///< log2(e_h / e_{h/2}) between levels
  std::vector<double> rate_p_l2;
  std::vector<double> rate_u_l2;
  bool ok = true;
  std::string message;
};

/// Solve the manufactured problem on unit-square meshes of the given sizes
/// and report error norms and observed rates.
StudyResult convergence_study(const ManufacturedSolution& ms, int k,
                              const std::vector<int>& levels, double re,
                              DriverOptions opts);

void write_study_csv(std::ostream& out, const StudyResult& r);

}  // namespace hdgns

#endif
