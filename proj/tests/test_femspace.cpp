#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <random>

#include "hdgns/basis.hpp"
#include "hdgns/layout.hpp"
#include "hdgns/mesh.hpp"
#include "hdgns/quadrature.hpp"

using namespace hdgns;

TEST_CASE("edge quadrature: weight sums and Gauss point counts") {
  for (int d = 0; d <= 14; ++d) {
    const auto r = edge_quadrature(d);
    double s = 0.0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  // exactness 2k+1 uses the (k+1)-point Gauss rule
  for (int k = 0; k <= 4; ++k)
    CHECK(int(edge_quadrature(2 * k + 1).points.size()) == k + 1);
}

TEST_CASE("edge quadrature integrates monomials exactly") {
  for (int d = 1; d <= 12; ++d) {
    const auto r = edge_quadrature(d);
    for (int p = 0; p <= d; ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.points.size(); ++q)
        s += r.weights[q] * std::pow(r.points[q], p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("triangle quadrature: barycenter rule and exactness") {
  const auto r1 = triangle_quadrature(1);
  REQUIRE(r1.points.size() == 1);
  CHECK(r1.points[0].x == doctest::Approx(1.0 / 3.0));
  CHECK(r1.points[0].y == doctest::Approx(1.0 / 3.0));
  CHECK(r1.weights[0] == doctest::Approx(0.5));

  // all monomials x^a y^b with a+b <= d against the analytic value
  // a! b! / (a+b+2)!
  auto exact = [](int a, int b) {
    double num = 1.0, den = 1.0;
    for (int i = 2; i <= a; ++i) num *= i;
    for (int i = 2; i <= b; ++i) num *= i;
    for (int i = 2; i <= a + b + 2; ++i) den *= i;
    return num / den;
  };
  for (int d = 0; d <= 14; ++d) {
    const auto r = triangle_quadrature(d);
    double s = 0.0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(0.5).epsilon(1e-14));
    for (int a = 0; a + 0 <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        double v = 0.0;
        for (std::size_t q = 0; q < r.points.size(); ++q)
          v += r.weights[q] * std::pow(r.points[q].x, a) * std::pow(r.points[q].y, b);
        CHECK(v == doctest::Approx(exact(a, b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("x^2 y with the exactness-3 rule") {
  const auto r = triangle_quadrature(3);
  double v = 0.0;
  for (std::size_t q = 0; q < r.points.size(); ++q)
    v += r.weights[q] * r.points[q].x * r.points[q].x * r.points[q].y;
  CHECK(v == doctest::Approx(1.0 / 60.0).epsilon(1e-13));
}

TEST_CASE("quadrature exactness limit is enforced") {
  CHECK_THROWS_AS(triangle_quadrature(kMaxQuadratureExactness + 1), Error);
  CHECK_THROWS_AS(edge_quadrature(-1), Error);
}

TEST_CASE("cell basis is orthonormal and spans P_k") {
  for (int k = 1; k <= 4; ++k) {
    const int m = cell_basis_size(k);
    const auto rule = triangle_quadrature(2 * k + 2);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> phi;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      eval_cell_basis(k, rule.points[q], phi);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          mass(i, j) += rule.weights[q] * phi[i] * phi[j];
    }
    CHECK((mass - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-12);
    // SPD with finite condition number (trivially 1 for an orthonormal basis)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mass);
    const double cond = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
    CHECK(cond < 1.0 + 1e-10);

    // projection reproduces a random polynomial of total degree k exactly
    std::mt19937_64 rng(k);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> mono;
    for (int d = 0, idx = 0; d <= k; ++d)
      for (int i = 0; i <= d; ++i, ++idx) mono.push_back(dist(rng));
    auto poly = [&](Vec2 p) {
      double v = 0.0;
      int idx = 0;
      for (int d = 0; d <= k; ++d)
        for (int i = 0; i <= d; ++i, ++idx)
          v += mono[idx] * std::pow(p.x, i) * std::pow(p.y, d - i);
      return v;
    };
    std::vector<double> coef(m, 0.0);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      eval_cell_basis(k, rule.points[q], phi);
      for (int i = 0; i < m; ++i)
        coef[i] += rule.weights[q] * poly(rule.points[q]) * phi[i];
    }
    for (Vec2 p : {Vec2{0.21, 0.13}, Vec2{0.5, 0.25}, Vec2{0.05, 0.9}}) {
      eval_cell_basis(k, p, phi);
      double v = 0.0;
      for (int i = 0; i < m; ++i) v += coef[i] * phi[i];
      CHECK(v == doctest::Approx(poly(p)).epsilon(1e-11));
    }
  }
}

TEST_CASE("constant reproduced by projection") {
  const int k = 2;
  const int m = cell_basis_size(k);
  const auto rule = triangle_quadrature(2 * k);
  std::vector<double> phi, coef(m, 0.0);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    eval_cell_basis(k, rule.points[q], phi);
    for (int i = 0; i < m; ++i) coef[i] += rule.weights[q] * 1.0 * phi[i];
  }
  eval_cell_basis(k, {0.3, 0.4}, phi);
  double v = 0.0;
  for (int i = 0; i < m; ++i) v += coef[i] * phi[i];
  CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("basis gradients match central finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.05, 0.4);
  const double h = 1e-5;
  for (int k = 1; k <= 4; ++k) {
    const int m = cell_basis_size(k);
    std::vector<double> vals, vp, vm;
    std::vector<Vec2> grads;
    for (int t = 0; t < 10; ++t) {
      const Vec2 p{dist(rng), dist(rng)};
      eval_cell_basis_grad(k, p, vals, grads);
      for (int i = 0; i < m; ++i) {
        eval_cell_basis(k, {p.x + h, p.y}, vp);
        eval_cell_basis(k, {p.x - h, p.y}, vm);
        CHECK(grads[i].x == doctest::Approx((vp[i] - vm[i]) / (2 * h)).epsilon(1e-6));
        eval_cell_basis(k, {p.x, p.y + h}, vp);
        eval_cell_basis(k, {p.x, p.y - h}, vm);
        CHECK(grads[i].y == doctest::Approx((vp[i] - vm[i]) / (2 * h)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("edge basis is orthonormal on [0,1]") {
  for (int k = 1; k <= 4; ++k) {
    const auto rule = edge_quadrature(2 * k);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(k + 1, k + 1);
    std::vector<double> psi;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      eval_edge_basis(k, rule.points[q], psi);
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j)
          mass(i, j) += rule.weights[q] * psi[i] * psi[j];
    }
    CHECK((mass - Eigen::MatrixXd::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() <=
          1e-13);
  }
}

TEST_CASE("layout counts: reference values") {
  SUBCASE("nx=1, k=1") {
    const Mesh m = generate_unit_square(1);
    const SpaceLayout l = build_layout(m, 1);
    CHECK(l.n_u == 12);
    CHECK(l.n_p == 2);
    CHECK(l.n_ubar == 20);
    CHECK(l.n_pbar == 10);
    CHECK(l.total() == 44);
  }
  SUBCASE("nx=32, k=2 totals") {
    const Mesh m = generate_unit_square(32);
    const SpaceLayout l = build_layout(m, 2);
    CHECK(l.n_u == 24576);
    CHECK(l.n_p == 6144);
    CHECK(l.n_ubar == 18816);
    CHECK(l.n_pbar == 9408);
    CHECK(l.total() == 58944);
    CHECK(l.condensed() == 28224);
  }
}

TEST_CASE("layout formulas on random meshes") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> nxd(1, 10), kd(1, 3), cased(0, 1);
  for (int t = 0; t < 20; ++t) {
    const int k = kd(rng);
    const Mesh m = cased(rng) == 0 ? generate_unit_square(nxd(rng))
                                   : generate_bfs(1 + nxd(rng) % 3);
    const SpaceLayout l = build_layout(m, k);
    const long nc = m.num_cells(), nf = m.num_faces();
    CHECK(l.n_u == 2 * nc * (k + 1) * (k + 2) / 2);
    CHECK(l.n_p == nc * k * (k + 1) / 2);
    CHECK(l.n_ubar == 2 * nf * (k + 1));
    CHECK(l.n_pbar == nf * (k + 1));
    CHECK(l.total() == l.n_u + l.n_p + l.n_ubar + l.n_pbar);
    CHECK(l.condensed() == l.n_ubar + l.n_pbar);
  }
}

TEST_CASE("degree guards") {
  const Mesh m = generate_unit_square(1);
  CHECK_THROWS_AS(build_layout(m, 0), Error);
  CHECK_THROWS_AS(build_layout(m, kMaxDegree + 1), Error);
}
