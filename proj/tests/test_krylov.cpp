#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <random>

#include "hdgns/solvers.hpp"

using namespace hdgns;

namespace {

SparseMatrix random_sparse(int n, double density, std::mt19937_64& rng,
                           double diag_boost) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Triplet> t;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c)
      if (r == c || coin(rng) < density) t.push_back({r, c, val(rng)});
  }
  for (int i = 0; i < n; ++i) t.push_back({i, i, diag_boost});
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

Eigen::MatrixXd to_dense(const SparseMatrix& s) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(s.rows(), s.cols());
  const auto& off = s.row_offsets();
  for (int r = 0; r < s.rows(); ++r)
    for (long i = off[r]; i < off[r + 1]; ++i)
      d(r, s.col_indices()[i]) += s.values()[i];
  return d;
}

}  // namespace

TEST_CASE("spmv basics") {
  SUBCASE("identity") {
    const auto I = SparseMatrix::identity(4);
    const Vector x{1, 2, 3, 4};
    CHECK(spmv(I, x) == x);
  }
  SUBCASE("2x2 example") {
    const auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 2}, {1, 1, 3}});
    const Vector y = spmv(A, {1, 1});
    CHECK(y[0] == 3);
    CHECK(y[1] == 3);
  }
  SUBCASE("dimension mismatch") {
    const auto I = SparseMatrix::identity(4);
    CHECK_THROWS_AS(I.apply(Vector{1, 2}), Error);
  }
  SUBCASE("random 50x50 against dense") {
    std::mt19937_64 rng(1);
    const auto A = random_sparse(50, 0.2, rng, 0.0);
    const Eigen::MatrixXd D = to_dense(A);
    std::normal_distribution<double> nd;
    Vector x(50);
    for (auto& v : x) v = nd(rng);
    const Vector y = spmv(A, x);
    Eigen::Map<const Eigen::VectorXd> xm(x.data(), 50);
    const Eigen::VectorXd ye = D * xm;
    for (int i = 0; i < 50; ++i)
      CHECK(y[i] == doctest::Approx(ye[i]).epsilon(1e-13));
  }
}

TEST_CASE("CSR invariants after construction") {
  std::mt19937_64 rng(2);
  const auto A = random_sparse(30, 0.3, rng, 1.0);
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  for (int r = 0; r < A.rows(); ++r) {
    CHECK(off[r] <= off[r + 1]);
    for (long i = off[r] + 1; i < off[r + 1]; ++i) CHECK(col[i - 1] < col[i]);
  }
  // duplicates are summed
  const auto B = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 0, 2}});
  CHECK(B.num_nonzeros() == 1);
  CHECK(B.coeff(0, 0) == 3.0);
}

TEST_CASE("transpose and linear combination") {
  std::mt19937_64 rng(3);
  const auto A = random_sparse(20, 0.2, rng, 0.0);
  const auto B = random_sparse(20, 0.2, rng, 0.0);
  const auto At = A.transpose();
  const auto C = SparseMatrix::sum(2.0, A, -0.5, B);
  const Eigen::MatrixXd D = 2.0 * to_dense(A) - 0.5 * to_dense(B);
  CHECK((to_dense(At) - to_dense(A).transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((to_dense(C) - D).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("gmres on easy systems") {
  KrylovConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  SUBCASE("identity converges immediately") {
    const auto I = SparseMatrix::identity(5);
    const Vector b{1, 2, 3, 4, 5};
    Vector x;
    const auto st = gmres(matrix_op(I), b, x, cfg);
    CHECK(st.converged);
    CHECK(st.iterations <= 1);
    for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(b[i]));
  }
  SUBCASE("diagonal 1..10 within 10 iterations") {
    std::vector<Triplet> t;
    for (int i = 0; i < 10; ++i) t.push_back({i, i, double(i + 1)});
    const auto A = SparseMatrix::from_triplets(10, 10, std::move(t));
    const Vector b(10, 1.0);
    Vector x;
    const auto st = gmres(matrix_op(A), b, x, cfg);
    CHECK(st.converged);
    CHECK(st.iterations <= 10);
    for (int i = 0; i < 10; ++i)
      CHECK(x[i] == doctest::Approx(1.0 / (i + 1)).epsilon(1e-10));
  }
  SUBCASE("exact right preconditioner gives immediate convergence") {
    std::mt19937_64 rng(4);
    const auto A = random_sparse(40, 0.2, rng, 8.0);
    const SparseLUSolver lu(A);
    Vector b(40, 1.0);
    Vector x;
    const LinOp pc = lu.op();
    KrylovConfig c2;
    c2.rtol = 1e-10;
    c2.atol = 1e-12;
    const auto st = gmres(matrix_op(A), b, x, c2, &pc);
    CHECK(st.converged);
    CHECK(st.iterations <= 2);
  }
}

TEST_CASE("gmres residuals are monotone within a cycle") {
  std::mt19937_64 rng(5);
  const auto A = random_sparse(60, 0.15, rng, 6.0);
  Vector b(60);
  std::normal_distribution<double> nd;
  for (auto& v : b) v = nd(rng);

  std::vector<double> history;
  KrylovConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-14;
  cfg.residual_history = &history;
  Vector x;
  const auto st = gmres(matrix_op(A), b, x, cfg);
  CHECK(st.converged);
  REQUIRE(history.size() >= 2);
  for (std::size_t i = 1; i < history.size(); ++i)
    CHECK(history[i] <= history[i - 1] * (1.0 + 1e-14));
}

TEST_CASE("fgmres with a fixed preconditioner matches gmres") {
  std::mt19937_64 rng(6);
  const auto A = random_sparse(30, 0.25, rng, 5.0);
  const ILUPreconditioner ilu(A, 0);
  Vector b(30);
  std::normal_distribution<double> nd;
  for (auto& v : b) v = nd(rng);
  KrylovConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  Vector xg, xf;
  const LinOp pc = ilu.op();
  const auto sg = gmres(matrix_op(A), b, xg, cfg, &pc);
  const auto sf = fgmres(matrix_op(A), b, xf, cfg, pc);
  CHECK(sg.converged);
  CHECK(sf.converged);
  for (int i = 0; i < 30; ++i) CHECK(xf[i] == doctest::Approx(xg[i]).epsilon(1e-10));
}

TEST_CASE("sparse LU") {
  SUBCASE("diagonal") {
    std::vector<Triplet> t{{0, 0, 2.0}, {1, 1, 4.0}};
    const auto A = SparseMatrix::from_triplets(2, 2, std::move(t));
    const SparseLUSolver lu(A);
    const Vector x = lu.solve({2.0, 4.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
  }
  SUBCASE("random 100x100 against dense oracle") {
    std::mt19937_64 rng(7);
    const auto A = random_sparse(100, 0.1, rng, 10.0);
    const Eigen::MatrixXd D = to_dense(A);
    Vector b(100);
    std::normal_distribution<double> nd;
    for (auto& v : b) v = nd(rng);
    const SparseLUSolver lu(A);
    const Vector x = lu.solve(b);
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), 100);
    const Eigen::VectorXd xe = Eigen::PartialPivLU<Eigen::MatrixXd>(D).solve(bm);
    for (int i = 0; i < 100; ++i)
      CHECK(x[i] == doctest::Approx(xe[i]).epsilon(1e-8));
  }
  SUBCASE("singular matrix is reported") {
    // two identical rows
    std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}, {1, 1, 2.0}};
    const auto A = SparseMatrix::from_triplets(2, 2, std::move(t));
    CHECK_THROWS_AS(SparseLUSolver{A}, Error);
  }
}

TEST_CASE("dense LU factors satisfy PA = LU") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd A(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) A(i, j) = nd(rng);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::MatrixXd L = Eigen::MatrixXd(lu.matrixLU().triangularView<Eigen::UnitLower>());
  const Eigen::MatrixXd U = Eigen::MatrixXd(lu.matrixLU().triangularView<Eigen::Upper>());
  const Eigen::MatrixXd PA = lu.permutationP() * A;
  CHECK((PA - L * U).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff());
}

TEST_CASE("jacobi preconditioner") {
  SUBCASE("diagonal action") {
    const auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 4.0}});
    const JacobiPreconditioner jac(A);
    Vector z;
    jac.apply({2.0, 4.0}, z);
    CHECK(z[0] == doctest::Approx(1.0));
    CHECK(z[1] == doctest::Approx(1.0));
  }
  SUBCASE("identity action") {
    const auto I = SparseMatrix::identity(3);
    const JacobiPreconditioner jac(I);
    Vector z;
    jac.apply({1, 2, 3}, z);
    CHECK(z == Vector{1, 2, 3});
  }
  SUBCASE("zero diagonal names the row") {
    const auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}});
    try {
      JacobiPreconditioner jac(A);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
  }
}

TEST_CASE("ILU level fill approximates the matrix") {
  std::mt19937_64 rng(9);
  const auto A = random_sparse(40, 0.1, rng, 6.0);
  Vector b(40);
  std::normal_distribution<double> nd;
  for (auto& v : b) v = nd(rng);
  KrylovConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  Vector x0, x1;
  const ILUPreconditioner ilu0(A, 0);
  const ILUPreconditioner ilu3(A, 3);
  const LinOp p0 = ilu0.op(), p3 = ilu3.op();
  const auto s0 = gmres(matrix_op(A), b, x0, cfg, &p0);
  const auto s3 = gmres(matrix_op(A), b, x1, cfg, &p3);
  CHECK(s0.converged);
  CHECK(s3.converged);
  CHECK(s3.iterations <= s0.iterations);
}

TEST_CASE("config validation") {
  KrylovConfig bad;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  KrylovConfig bad2;
  bad2.restart = 0;
  CHECK_THROWS_AS(bad2.validate(), Error);
}
