#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "hdgns/perturblab.hpp"

#include "json.hpp"

using namespace hdgns;

TEST_CASE("hypothesis validation accepts the construction and rejects rank drops") {
  std::mt19937_64 rng(1);
  const DenseSaddle ds = DenseSaddle::random(8, 3, 1e3, rng);
  CHECK_NOTHROW(ds.validate());

  // rank-1 weight: null(J) grows past null(B) and range(J) shrinks below
  // range(B^T); the hypothesis checks reject it
  DenseSaddle bad = ds;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
  bad.J = bad.B.transpose() * w * w.transpose() * bad.B;
  CHECK_THROWS_AS(bad.validate(), Error);

  DenseSaddle nonsym = ds;
  nonsym.J(0, 1) += 1.0;
  CHECK_THROWS_AS(nonsym.validate(), Error);
}

TEST_CASE("projected inverses: hand-checkable 2x2 instance") {
  DenseSaddle ds;
  ds.A = Eigen::MatrixXd::Identity(2, 2);
  ds.J = Eigen::MatrixXd::Zero(2, 2);
  ds.J(0, 0) = 1.0;
  ds.B = Eigen::MatrixXd::Zero(1, 2);
  ds.B(0, 0) = 1.0;
  ds.M = Eigen::MatrixXd::Identity(1, 1);
  ds.gamma = 10.0;
  const ProjectedInverses pi = projected_inverses(ds);
  CHECK(pi.P(0, 0) == doctest::Approx(0.0));
  CHECK(pi.P(1, 1) == doctest::Approx(1.0));
  CHECK(pi.EP(1, 1) == doctest::Approx(1.0));
  CHECK(pi.EP(0, 0) == doctest::Approx(0.0));
  CHECK(pi.EQ(0, 0) == doctest::Approx(1.0));
  CHECK(pi.EQ(1, 1) == doctest::Approx(0.0));

  // A = I: E_P A = P is trivially a projection
  const Eigen::MatrixXd EPA = pi.EP * ds.A;
  CHECK((EPA * EPA - EPA).norm() <= 1e-14);
}

TEST_CASE("projection property on random instances") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    std::uniform_int_distribution<int> ndist(4, 12);
    const int n = ndist(rng);
    std::uniform_int_distribution<int> mdist(1, n - 1);
    const DenseSaddle ds = DenseSaddle::random(n, mdist(rng), 1e3, rng);
    const ProjectedInverses pi = projected_inverses(ds);
    const Eigen::MatrixXd EPA = pi.EP * ds.A;
    CHECK((EPA * EPA - EPA).norm() <= 1e-10);
    CHECK((pi.P * pi.P - pi.P).norm() <= 1e-12);
    CHECK((pi.P + pi.Q - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-13);
  }
}

TEST_CASE("worked example: the expansion needs the second term subtracted") {
  DenseSaddle ds;
  ds.A = Eigen::MatrixXd::Identity(2, 2);
  ds.J = Eigen::MatrixXd::Zero(2, 2);
  ds.J(0, 0) = 1.0;
  ds.B = Eigen::MatrixXd::Zero(1, 2);
  ds.B(0, 0) = 1.0;
  ds.M = Eigen::MatrixXd::Identity(1, 1);
  ds.gamma = 10.0;
  const SchurExpansionReport rep = verify_schur_expansion(ds);
  // -S = 1/11, leading term 1/10, remainder -1/110
  CHECK(rep.scale == doctest::Approx(1.0 / 11.0).epsilon(1e-13));
  CHECK(rep.leading_residual == doctest::Approx(1.0 / 110.0).epsilon(1e-12));
  CHECK(rep.minus_matches);
  CHECK(rep.residual_minus <= 1e-14);
  CHECK(rep.residual_plus == doctest::Approx(2.0 / 110.0).epsilon(1e-10));
}

TEST_CASE("expansion sign and leading-order bound on random instances") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    std::uniform_int_distribution<int> ndist(4, 12);
    const int n = ndist(rng);
    std::uniform_int_distribution<int> mdist(1, n - 1);
    const DenseSaddle ds = DenseSaddle::random(n, mdist(rng), 1e3, rng);
    const SchurExpansionReport rep = verify_schur_expansion(ds);
    CHECK(rep.minus_matches);
    CHECK(rep.residual_plus > rep.residual_minus);
  }

  // leading-order constant stable across a gamma sweep
  std::mt19937_64 rng2(4);
  DenseSaddle base = DenseSaddle::random(10, 4, 1.0, rng2);
  double cmin = 1e300, cmax = 0.0;
  for (double g : {1e2, 1e3, 1e4}) {
    base.gamma = g;
    const SchurExpansionReport rep = verify_schur_expansion(base);
    const double c = rep.leading_residual * g * g;
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  CHECK(cmax / cmin <= 3.0);
}

TEST_CASE("mass-matrix identity of the AL augmentation") {
  SUBCASE("orthonormal rows give the identity immediately") {
    DenseSaddle ds;
    const int n = 5, m = 2;
    ds.B = Eigen::MatrixXd::Zero(m, n);
    ds.B(0, 0) = 1.0;
    ds.B(1, 2) = 1.0;
    ds.M = Eigen::MatrixXd::Identity(m, m);
    ds.J = ds.B.transpose() * ds.B;
    ds.A = Eigen::MatrixXd::Identity(n, n);
    ds.gamma = 1e3;
    const ALMassIdentityReport rep = verify_al_mass_identity(ds);
    CHECK(rep.first_order_identity <= 1e-13);
  }
  SUBCASE("random instances reproduce M exactly at first order") {
    std::mt19937_64 rng(5);
    const DenseSaddle ds = DenseSaddle::random_al(8, 3, 1e4, rng);
    const ALMassIdentityReport rep = verify_al_mass_identity(ds);
    CHECK(rep.first_order_identity <= 1e-9);
  }
  SUBCASE("second-order decay of the mass gap") {
    std::mt19937_64 rng(6);
    DenseSaddle ds = DenseSaddle::random_al(9, 4, 1.0, rng);
    std::vector<double> gammas{1e2, 1e3, 1e4, 1e5}, gaps;
    for (double g : gammas) {
      ds.gamma = g;
      gaps.push_back(verify_al_mass_identity(ds).mass_gap);
    }
    // log-log slope of -2 within 0.2
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      const double lx = std::log(gammas[i]), ly = std::log(gaps[i]);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double slope =
        (gammas.size() * sxy - sx * sy) / (gammas.size() * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.1));
  }
}

TEST_CASE("jump-projection equivalence") {
  SUBCASE("gamma = 0 is rejected") {
    const Mesh mesh = generate_unit_square(2);
    CHECK_THROWS_AS(verify_jump_equivalence(mesh, 1, 0.0, 7), Error);
  }
  SUBCASE("penalized, mixed, and factorized forms agree") {
    const Mesh mesh = generate_unit_square(2);
    for (int k : {1, 2}) {
      for (double g : {1e2, 1e3, 1e4}) {
        const JumpEquivalenceReport rep = verify_jump_equivalence(mesh, k, g, 7);
        CHECK(rep.u_diff_rel <= 1e-9);
        CHECK(rep.pbar_diff_rel <= 1e-9);
        CHECK(rep.u_alt_diff_rel <= 1e-9);
      }
    }
  }
}

TEST_CASE("full verification run emits a sane JSON report") {
  std::ostringstream out;
  std::string json;
  const bool ok = run_verification(7, out, &json);
  CHECK(ok);
  CHECK(out.str().find("all verifications passed") != std::string::npos);
  const auto doc = nlohmann::json::parse(json);
  CHECK(doc.at("all_passed").get<bool>());
  CHECK(doc.at("expansion").at("gamma2_term_sign").get<std::string>() ==
        "negative");
  CHECK(doc.at("seed").get<int>() == 7);
}
