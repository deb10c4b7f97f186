#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "hdgns/newton.hpp"
#include "hdgns/norms.hpp"
#include "hdgns/parallel.hpp"
#include "hdgns/study.hpp"

using namespace hdgns;

TEST_CASE("continuation schedules") {
  const ContinuationSchedule lid = ContinuationSchedule::lid(1000.0);
  CHECK(lid.re_values == std::vector<double>{1, 10, 100, 250, 500, 750, 1000});
  const ContinuationSchedule bfs = ContinuationSchedule::bfs(400.0);
  CHECK(bfs.re_values ==
        std::vector<double>{1, 10, 50, 100, 150, 200, 250, 300, 350, 400});
  const ContinuationSchedule bfs2 = ContinuationSchedule::bfs(1000.0);
  CHECK(bfs2.re_values.back() == 1000.0);
  lid.validate();
  ContinuationSchedule bad;
  bad.re_values = {10.0, 10.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("norms: constants, conforming fields, and a hand value") {
  SUBCASE("constant velocity with matching trace") {
    const Mesh mesh = generate_unit_square(2);
    const SpaceLayout l = build_layout(mesh, 2);
    const StateVector s =
        interpolate_state(mesh, l, [](Vec2) { return Vec2{2.0, 1.0}; }, nullptr);
    const NormSet n = compute_norms(mesh, l, s, 1e4, 1.0);
    CHECK(n.v_norm <= 1e-12);
    CHECK(n.r_semi <= 1e-12);
    CHECK(n.l2_u == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  }
  SUBCASE("conforming interpolant: the gamma norm collapses to the plain one") {
    const Mesh mesh = generate_unit_square(3);
    const SpaceLayout l = build_layout(mesh, 2);
    const StateVector s = interpolate_state(
        mesh, l, [](Vec2 p) { return Vec2{p.x * p.x, -2.0 * p.x * p.y}; }, nullptr);
    const NormSet n = compute_norms(mesh, l, s, 1e6, 0.1);
    CHECK(n.r_semi <= 1e-11);
    CHECK(n.v_gamma == doctest::Approx(n.v_norm).epsilon(1e-10));
  }
  SUBCASE("single-cell symbolic values") {
    std::vector<Vec2> verts{{0, 0}, {1, 0}, {0, 1}};
    std::vector<Mesh::CellVerts> cells{{0, 1, 2}};
    const Mesh mesh(verts, cells);
    const SpaceLayout l = build_layout(mesh, 1);
    const StateVector s = interpolate_state(
        mesh, l, [](Vec2 p) { return Vec2{p.x, p.y}; },
        [](Vec2) { return 1.0; });
    const NormSet n = compute_norms(mesh, l, s, 0.0, 1.0);
    // grad v = I on a cell of area 1/2, traces match
    CHECK(n.v_norm == doctest::Approx(1.0).epsilon(1e-10));
    // ||q||^2 + sum_K h_K ||qbar||^2 over the cell boundary with q = qbar = 1
    const double expect = 0.5 + std::sqrt(2.0) * (2.0 + std::sqrt(2.0));
    CHECK(n.p_norm == doctest::Approx(std::sqrt(expect)).epsilon(1e-10));
  }
  SUBCASE("gamma-weighted identity holds by construction") {
    const Mesh mesh = generate_unit_square(2);
    const SpaceLayout l = build_layout(mesh, 1);
    StateVector s = StateVector::zero(l);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (auto& v : s.data) v = nd(rng);
    const double gamma = 123.0, mu = 0.25;
    const NormSet n = compute_norms(mesh, l, s, gamma, mu);
    CHECK(n.v_gamma * n.v_gamma ==
          doctest::Approx(n.v_norm * n.v_norm + gamma / mu * n.r_semi * n.r_semi)
              .epsilon(1e-12));
  }
}

TEST_CASE("Stokes limit converges in one linear solve") {
  const Mesh mesh = generate_unit_square(4);
  const SpaceLayout l = build_layout(mesh, 2);
  DriverOptions opts;
  opts.convection = false;
  const SteadyResult r = solve_steady(mesh, l, FlowCase::lid,
                                      ContinuationSchedule{{1.0}}, opts);
  REQUIRE(r.ok);
  CHECK(r.records.size() == 1);
  CHECK(r.records[0].newton_iters == 1);
  // the recovered state satisfies the divergence rows
  const DivergenceReport rep =
      divergence_moments(mesh, l, r.state, BoundaryData::lid_cavity());
  CHECK(rep.max_cell_moment <= 1e-9);
  CHECK(rep.max_face_jump_moment <= 1e-9);
}

TEST_CASE("cavity at Re 1 needs few Newton steps from a cold start") {
  const Mesh mesh = generate_unit_square(8);
  const SpaceLayout l = build_layout(mesh, 2);
  DriverOptions opts;
  const SteadyResult r = solve_steady(mesh, l, FlowCase::lid,
                                      ContinuationSchedule{{1.0}}, opts);
  REQUIRE(r.ok);
  CHECK(r.records[0].newton_iters <= 3);
  CHECK(r.records[0].max_inner == 1);  // exact inner factorization
}

TEST_CASE("cavity continuation to Re 100 stays within the iteration caps") {
  const Mesh mesh = generate_unit_square(8);
  const SpaceLayout l = build_layout(mesh, 2);
  DriverOptions opts;
  const SteadyResult r = solve_steady(mesh, l, FlowCase::lid,
                                      ContinuationSchedule::lid(100.0), opts);
  REQUIRE(r.ok);
  REQUIRE(r.records.size() == 3);
  for (const auto& rec : r.records) {
    CHECK(rec.newton_iters <= 5);
    CHECK(rec.max_outer <= 12);
    CHECK(rec.max_inner == 1);
  }
  // converged states are divergence-conforming
  const DivergenceReport rep =
      divergence_moments(mesh, l, r.state, BoundaryData::lid_cavity());
  CHECK(rep.max_cell_moment <= 1e-9);
  CHECK(rep.max_face_jump_moment <= 1e-9);
}

TEST_CASE("step flow runs through the low-Re schedule") {
  const Mesh mesh = generate_bfs(1);
  const SpaceLayout l = build_layout(mesh, 2);
  DriverOptions opts;
  const SteadyResult r = solve_steady(mesh, l, FlowCase::bfs,
                                      ContinuationSchedule::bfs(50.0), opts);
  REQUIRE(r.ok);
  CHECK(r.records.size() == 3);
  for (const auto& rec : r.records) {
    CHECK(rec.newton_iters <= 5);
    CHECK(rec.max_outer <= 15);
  }
}

TEST_CASE("polynomial solution inside the space is reproduced to solver accuracy") {
  DriverOptions opts;
  opts.tol.newton_atol = 1e-12;
  opts.tol.newton_rtol = 1e-13;
  opts.tol.outer_rtol = 1e-12;
  opts.tol.outer_atol = 1e-13;
  const ManufacturedSolution ms = quadratic_solution();
  for (int nx : {2, 4}) {
    const Mesh mesh = generate_unit_square(nx);
    const SpaceLayout l = build_layout(mesh, 2);
    const SteadyResult r =
        solve_single(mesh, l, ms.boundary_data(1.0), 1.0, opts, "poly");
    REQUIRE(r.ok);
    const NormSet err = compute_error_norms(mesh, l, r.state, ms.u, ms.grad_u,
                                            ms.p, opts.gamma, 1.0);
    CHECK(err.l2_u <= 1e-9);
    CHECK(err.v_gamma <= 1e-8);
    CHECK(err.l2_p <= 1e-8);
  }
}

TEST_CASE("manufactured rates approach second order at k = 2") {
  DriverOptions opts;
  const StudyResult r = convergence_study(trig_vortex(), 2, {4, 8}, 1.0, opts);
  REQUIRE(r.ok);
  REQUIRE(r.rate_v_gamma.size() == 1);
  CHECK(r.rate_v_gamma[0] > 1.6);
  CHECK(r.rate_p_l2[0] > 1.6);
  std::ostringstream csv;
  write_study_csv(csv, r);
  CHECK(csv.str().find("nx,err_v_gamma") == 0);
}

TEST_CASE("report writers follow the exact schema") {
  SolveRecord rec;
  rec.case_name = "lid";
  rec.precond = "GM";
  rec.cells = 128;
  rec.k = 2;
  rec.total_dofs = 3696;
  rec.condensed_dofs = 1776;
  rec.re = 250.0;
  rec.newton_iters = 2;
  rec.max_outer = 6;
  rec.max_inner = 1;
  rec.wall_seconds = 0.123456789;
  std::ostringstream csv;
  write_report_csv(csv, {rec});
  CHECK(csv.str() ==
        "case,precond,cells,k,total_dofs,condensed_dofs,re,newton_iters,"
        "max_outer,max_inner,wall_seconds\n"
        "lid,GM,128,2,3696,1776,250,2,6,1,0.123457\n");
  std::ostringstream js;
  write_report_json(js, {rec});
  CHECK(js.str().find("\"newton_iters\": 2") != std::string::npos);
  CHECK(js.str().find("\"case\": \"lid\"") != std::string::npos);
}

TEST_CASE("the converged state satisfies the nonlinear tolerance") {
  const Mesh mesh = generate_unit_square(4);
  const SpaceLayout l = build_layout(mesh, 2);
  DriverOptions opts;
  const SteadyResult r = solve_steady(mesh, l, FlowCase::lid,
                                      ContinuationSchedule::lid(100.0), opts);
  REQUIRE(r.ok);
  const BoundaryData bd = BoundaryData::lid_cavity();
  const Constraints cons = build_constraints(mesh, l, bd);
  AssemblyOptions ao;
  ao.mu = 1.0 / 100.0;
  ao.alpha = 40.0;
  ao.gamma = 1e4;
  ao.mode = ConvectionMode::newton;
  const BlockSystem sys = assemble_block_system(mesh, l, ao, r.state, bd);
  const double rnorm = norm2(nonlinear_residual(sys, r.state, cons));
  CHECK(rnorm <= 1e-7);
}

TEST_CASE("threaded assembly reproduces the single-threaded matrices") {
  const Mesh mesh = generate_unit_square(4);
  const SpaceLayout l = build_layout(mesh, 2);
  const BoundaryData bd = BoundaryData::lid_cavity();
  const Constraints cons = build_constraints(mesh, l, bd);
  AssemblyOptions ao;
  ao.alpha = 40.0;
  ao.gamma = 1e4;
  ao.mode = ConvectionMode::newton;
  StateVector w = StateVector::initial(l, cons);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd;
  for (auto& v : w.data) v += 0.01 * nd(rng);

  set_num_threads(1);
  const BlockSystem s1 = assemble_block_system(mesh, l, ao, w, bd);
  const SparseMatrix m1 = monolithic_matrix(s1, cons);
  set_num_threads(4);
  const BlockSystem s4 = assemble_block_system(mesh, l, ao, w, bd);
  const SparseMatrix m4 = monolithic_matrix(s4, cons);
  set_num_threads(1);
  CHECK(m1.same_pattern(m4));
  CHECK(m1.values() == m4.values());  // bit identical
}

TEST_CASE("repeat runs give identical solver numbers") {
  const Mesh mesh = generate_unit_square(4);
  const SpaceLayout l = build_layout(mesh, 2);
  DriverOptions opts;
  const auto run = [&] {
    const SteadyResult r = solve_steady(mesh, l, FlowCase::lid,
                                        ContinuationSchedule::lid(10.0), opts);
    REQUIRE(r.ok);
    std::ostringstream csv;
    auto recs = r.records;
    for (auto& rec : recs) rec.wall_seconds = 0.0;  // timing varies
    write_report_csv(csv, recs);
    return std::make_pair(csv.str(), r.state.data);
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);  // states bit-identical
}
