// Steady-state solution driver: Newton iteration on the penalized problem
// with Reynolds-number continuation, statically condensed linear solves via
// FGMRES with the augmented Lagrangian block preconditioners, and per-step
// reporting of (Newton iterations, max outer, max inner) triples.

#ifndef HDGNS_NEWTON_HPP
#define HDGNS_NEWTON_HPP

#include <iosfwd>
#include <string>

#include "hdgns/alprecond.hpp"

namespace hdgns {

enum class FlowCase { lid, bfs };

std::string to_string(FlowCase c);

struct ContinuationSchedule {
  std::vector<double> re_values;

  /// 1, 10, 100, then multiples of 250 up to re_max.
  static ContinuationSchedule lid(double re_max);
  /// 1, 10, 50, 100, ..., 400, then multiples of 200 up to re_max.
  static ContinuationSchedule bfs(double re_max);

  void validate() const;
};

struct SolverTolerances {
  double newton_atol = 1e-7;
  double newton_rtol = 1e-8;
  double outer_rtol = 1e-4;
  double outer_atol = 1e-9;
  double inner_rtol = 1e-2;
  double inner_atol = 1e-8;
  int restart = 300;
  int max_outer = 300;
  int max_newton = 25;
};

struct DriverOptions {
  double gamma = 1e4;
  double alpha = -1.0;  ///< < 0: use the default 10 k^2
  PrecondVariant variant = PrecondVariant::GM;
  SolverTolerances tol;
  bool convection = true;  ///< false: solve the Stokes limit (one linear solve)
  bool verbose = false;

  double effective_alpha(int k) const {
    return alpha > 0.0 ? alpha : 10.0 * k * k;
  }
};

struct SolveRecord {
  std::string case_name;
  std::string precond;
  int cells = 0;
  int k = 0;
  long total_dofs = 0;
  long condensed_dofs = 0;
  double re = 0.0;
  int newton_iters = 0;
  int max_outer = 0;
  int max_inner = 0;
  double wall_seconds = 0.0;
};

struct SteadyResult {
  StateVector state;
  std::vector<SolveRecord> records;
  bool ok = false;
  std::string message;
};

/// Solve one of the benchmark cases over the continuation schedule.
SteadyResult solve_steady(const Mesh& mesh, const SpaceLayout& layout,
                          FlowCase flow_case, const ContinuationSchedule& schedule,
                          const DriverOptions& opts);

/// Solve a single problem with explicit boundary data (used by the
/// manufactured-solution study); re enters as mu = 1/re.
SteadyResult solve_single(const Mesh& mesh, const SpaceLayout& layout,
                          const BoundaryData& bdata, double re,
                          const DriverOptions& opts, const std::string& case_name);

/// CSV with the exact column schema
/// case,precond,cells,k,total_dofs,condensed_dofs,re,newton_iters,max_outer,max_inner,wall_seconds
void write_report_csv(std::ostream& out, const std::vector<SolveRecord>& records);
void write_report_json(std::ostream& out, const std::vector<SolveRecord>& records);

}  // namespace hdgns

#endif
