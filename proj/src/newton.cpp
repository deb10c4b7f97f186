#include "hdgns/newton.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>

#include "json.hpp"

namespace hdgns {

std::string to_string(FlowCase c) { return c == FlowCase::lid ? "lid" : "bfs"; }

ContinuationSchedule ContinuationSchedule::lid(double re_max) {
  ContinuationSchedule s;
  for (double re : {1.0, 10.0, 100.0})
    if (re <= re_max) s.re_values.push_back(re);
  for (double re = 250.0; re <= re_max + 1e-9; re += 250.0)
    if (re > s.re_values.back()) s.re_values.push_back(re);
  if (s.re_values.empty() || s.re_values.back() < re_max)
    s.re_values.push_back(re_max);
  return s;
}

ContinuationSchedule ContinuationSchedule::bfs(double re_max) {
  ContinuationSchedule s;
  for (double re : {1.0, 10.0, 50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 400.0})
    if (re <= re_max) s.re_values.push_back(re);
  for (double re = 600.0; re <= re_max + 1e-9; re += 200.0)
    if (re > s.re_values.back()) s.re_values.push_back(re);
  if (s.re_values.empty() || s.re_values.back() < re_max)
    s.re_values.push_back(re_max);
  return s;
}

void ContinuationSchedule::validate() const {
  if (re_values.empty()) throw Error("continuation schedule is empty");
  for (std::size_t i = 1; i < re_values.size(); ++i)
    if (re_values[i] <= re_values[i - 1])
      throw Error("continuation schedule must be strictly increasing");
}

namespace {

struct NewtonStats {
  int iterations = 0;
  int max_outer = 0;
  int max_inner = 0;
  bool converged = false;
  std::string message;
};

// One steady solve at fixed viscosity, warm-started from `state`.
NewtonStats newton_solve(const Mesh& mesh, const SpaceLayout& layout,
                         const BoundaryData& bdata, const Constraints& cons,
                         double mu, const DriverOptions& opts,
                         StateVector& state) {
  NewtonStats stats;
  const SolverTolerances& tol = opts.tol;
  const int k = layout.degree;

  AssemblyOptions aopts;
  aopts.mu = mu;
  aopts.alpha = opts.effective_alpha(k);
  aopts.gamma = opts.gamma;
  aopts.mode = opts.convection ? ConvectionMode::newton : ConvectionMode::none;

  PreconditionerSpec pspec;
  pspec.variant = opts.variant;
  pspec.velocity_cfg = KrylovConfig{tol.inner_rtol, tol.inner_atol, tol.restart,
                                    tol.restart};
  pspec.schur_cfg = KrylovConfig{tol.inner_rtol, tol.inner_atol, tol.restart,
                                 tol.restart};

  // the linear solves are correction equations: constrained dofs hold their
  // boundary values in the state, so corrections there are zero
  Constraints delta_cons = cons;
  std::fill(delta_cons.values.begin(), delta_cons.values.end(), 0.0);

  double r0 = -1.0;
  double prev_norm = -1.0;
  int growth_count = 0;

  const int max_newton = opts.convection ? tol.max_newton : 1;
  for (int it = 0; it < max_newton; ++it) {
    BlockSystem sys = assemble_block_system(mesh, layout, aopts, state, bdata);
    Vector residual = nonlinear_residual(sys, state, cons);
    const double rnorm = norm2(residual);
    if (r0 < 0.0) r0 = rnorm;
    if (opts.verbose)
      std::fprintf(stderr, "    newton %2d |R| = %.3e\n", it, rnorm);

    if (opts.convection &&
        rnorm <= std::max(tol.newton_atol, tol.newton_rtol * r0)) {
      stats.converged = true;
      return stats;
    }
    if (prev_norm >= 0.0 && rnorm > prev_norm) {
      if (++growth_count >= 3) {
        stats.message = "Newton residual grew over 3 successive iterations";
        return stats;
      }
    } else {
      growth_count = 0;
    }
    prev_norm = rnorm;

    for (double& v : residual) v = -v;
    CondensedSystem cond = condense(sys, delta_cons, residual);
    ALPreconditioner precond(cond, pspec);

    KrylovConfig outer_cfg{tol.outer_rtol, tol.outer_atol, tol.restart,
                           tol.max_outer};
    if (!opts.convection) {
      // linear problem: one tight solve
      outer_cfg.rtol = 1e-10;
      outer_cfg.atol = 1e-11;
      outer_cfg.max_iters = 10 * tol.max_outer;
    }
    Vector y(layout.condensed(), 0.0);
    const SolveStats lin =
        fgmres(matrix_op(cond.K), cond.rhs, y, outer_cfg, precond.op());
    stats.max_outer = std::max(stats.max_outer, lin.iterations);
    stats.max_inner = std::max(stats.max_inner, precond.max_velocity_iterations());
    ++stats.iterations;
    if (!lin.converged) {
      stats.message = "outer FGMRES did not converge (residual " +
                      std::to_string(lin.final_residual) + ")";
      return stats;
    }

    const StateVector delta = back_substitute(cond, y);
    if (!opts.convection) {
      for (long i = 0; i < layout.total(); ++i) state.data[i] += delta.data[i];
      continue;
    }
    // backtracking on the residual norm; full steps are accepted near the
    // solution, so this only engages on rough continuation steps
    double lambda = 1.0;
    StateVector trial = state;
    for (int ls = 0; ls < 9; ++ls) {
      for (long i = 0; i < layout.total(); ++i)
        trial.data[i] = state.data[i] + lambda * delta.data[i];
      const double rtrial = norm2(nonlinear_residual(sys, trial, cons));
      if (rtrial <= (1.0 - 1e-4 * lambda) * rnorm) break;
      lambda *= 0.5;
    }
    state = std::move(trial);
  }

  if (!opts.convection) {
    stats.converged = true;
    return stats;
  }
  stats.message = "Newton iteration cap reached (last |R| = " +
                  std::to_string(prev_norm) + ")";
  return stats;
}

bool case_is_enclosed(const Mesh& mesh, const BoundaryData& bdata) {
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    if (face.is_boundary() && bdata.outflow_tags.count(face.tag)) return false;
  }
  return true;
}

SolveRecord make_record(const Mesh& mesh, const SpaceLayout& layout,
                        const std::string& case_name, const DriverOptions& opts,
                        double re) {
  SolveRecord rec;
  rec.case_name = case_name;
  rec.precond = to_string(opts.variant);
  rec.cells = mesh.num_cells();
  rec.k = layout.degree;
  rec.total_dofs = layout.total();
  rec.condensed_dofs = layout.condensed();
  rec.re = re;
  return rec;
}

}  // namespace

SteadyResult solve_steady(const Mesh& mesh, const SpaceLayout& layout,
                          FlowCase flow_case, const ContinuationSchedule& schedule,
                          const DriverOptions& opts) {
  schedule.validate();
  const BoundaryData bdata = flow_case == FlowCase::lid
                                 ? BoundaryData::lid_cavity()
                                 : BoundaryData::backward_facing_step();
  const Constraints cons = build_constraints(mesh, layout, bdata);
  const bool enclosed = case_is_enclosed(mesh, bdata);

  SteadyResult result;
  result.state = StateVector::initial(layout, cons);

  double prev_re = 0.0;
  for (double re : schedule.re_values) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveRecord rec = make_record(mesh, layout, to_string(flow_case), opts, re);

    StateVector attempt = result.state;
    NewtonStats st =
        newton_solve(mesh, layout, bdata, cons, 1.0 / re, opts, attempt);

    if (!st.converged && prev_re > 0.0) {
      // one halved-step retry through an intermediate Reynolds number
      const double mid = 0.5 * (prev_re + re);
      if (opts.verbose)
        std::fprintf(stderr, "  retrying via Re = %g\n", mid);
      StateVector retry = result.state;
      NewtonStats st_mid =
          newton_solve(mesh, layout, bdata, cons, 1.0 / mid, opts, retry);
      if (st_mid.converged) {
        st = newton_solve(mesh, layout, bdata, cons, 1.0 / re, opts, retry);
        st.iterations += st_mid.iterations;
        st.max_outer = std::max(st.max_outer, st_mid.max_outer);
        st.max_inner = std::max(st.max_inner, st_mid.max_inner);
        attempt = std::move(retry);
      }
    }
    if (!st.converged) {
      result.ok = false;
      result.message = "solve at Re = " + std::to_string(re) +
                       " failed: " + st.message;
      return result;
    }

    result.state = std::move(attempt);
    if (enclosed) remove_pressure_mean(mesh, layout, result.state);

    rec.newton_iters = st.iterations;
    rec.max_outer = st.max_outer;
    rec.max_inner = st.max_inner;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (opts.verbose)
      std::fprintf(stderr, "  Re %6g: newton %d, outer %d, inner %d (%.2fs)\n",
                   re, rec.newton_iters, rec.max_outer, rec.max_inner,
                   rec.wall_seconds);
    result.records.push_back(rec);
    prev_re = re;
  }
  result.ok = true;
  return result;
}

SteadyResult solve_single(const Mesh& mesh, const SpaceLayout& layout,
                          const BoundaryData& bdata, double re,
                          const DriverOptions& opts, const std::string& case_name) {
  const Constraints cons = build_constraints(mesh, layout, bdata);
  SteadyResult result;
  result.state = StateVector::initial(layout, cons);
  const auto t0 = std::chrono::steady_clock::now();
  SolveRecord rec = make_record(mesh, layout, case_name, opts, re);
  NewtonStats st =
      newton_solve(mesh, layout, bdata, cons, 1.0 / re, opts, result.state);
  if (!st.converged) {
    result.ok = false;
    result.message = st.message;
    return result;
  }
  if (case_is_enclosed(mesh, bdata))
    remove_pressure_mean(mesh, layout, result.state);
  rec.newton_iters = st.iterations;
  rec.max_outer = st.max_outer;
  rec.max_inner = st.max_inner;
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.records.push_back(rec);
  result.ok = true;
  return result;
}

namespace {

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

std::string format_re(double re) {
  char buf[32];
  if (re == std::floor(re) && std::abs(re) < 1e15)
    std::snprintf(buf, sizeof buf, "%.0f", re);
  else
    std::snprintf(buf, sizeof buf, "%.6g", re);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<SolveRecord>& recs) {
  out << "case,precond,cells,k,total_dofs,condensed_dofs,re,newton_iters,"
         "max_outer,max_inner,wall_seconds\n";
  for (const auto& r : recs) {
    out << r.case_name << ',' << r.precond << ',' << r.cells << ',' << r.k << ','
        << r.total_dofs << ',' << r.condensed_dofs << ',' << format_re(r.re)
        << ',' << r.newton_iters << ',' << r.max_outer << ',' << r.max_inner
        << ',' << format_time(r.wall_seconds) << '\n';
  }
}

void write_report_json(std::ostream& out, const std::vector<SolveRecord>& recs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : recs) {
    arr.push_back({{"case", r.case_name},
                   {"precond", r.precond},
                   {"cells", r.cells},
                   {"k", r.k},
                   {"total_dofs", r.total_dofs},
                   {"condensed_dofs", r.condensed_dofs},
                   {"re", r.re},
                   {"newton_iters", r.newton_iters},
                   {"max_outer", r.max_outer},
                   {"max_inner", r.max_inner},
                   {"wall_seconds", r.wall_seconds}});
  }
  out << arr.dump(2) << '\n';
}

}  // namespace hdgns
