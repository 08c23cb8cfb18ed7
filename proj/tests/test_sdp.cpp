#include "secalloc/sdp.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <random>

using namespace secalloc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

sdp::Problem scalar_problem(std::vector<int> dims, std::vector<MatrixXd> f0,
                            std::vector<std::vector<MatrixXd>> coeffs,
                            VectorXd obj) {
  sdp::Problem p;
  p.block_dims = std::move(dims);
  p.f0 = std::move(f0);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    sdp::ScalarVar v;
    v.coeffs = std::move(coeffs[k]);
    v.objective = obj(static_cast<Eigen::Index>(k));
    p.scalar_vars.push_back(std::move(v));
  }
  return p;
}

MatrixXd random_symmetric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
  return 0.5 * (m + m.transpose());
}

}  // namespace

TEST_SUITE("sdp") {

TEST_CASE("scalar bound: min x with [[x,1],[1,x]] psd gives x = 1") {
  MatrixXd f0(2, 2);
  f0 << 0, 1, 1, 0;
  auto prob = scalar_problem({2}, {f0}, {{MatrixXd::Identity(2, 2)}},
                             VectorXd::Ones(1));
  auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::optimal);
  CHECK(sol.scalar_values(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("linear program as 1x1 blocks") {
  VectorXd obj(2);
  obj << 1.0, 2.0;
  auto prob = scalar_problem(
      {1, 1},
      {MatrixXd::Constant(1, 1, -1.0), MatrixXd::Constant(1, 1, -2.0)},
      {{MatrixXd::Constant(1, 1, 1.0), MatrixXd()},
       {MatrixXd(), MatrixXd::Constant(1, 1, 1.0)}},
      obj);
  auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::optimal);
  CHECK(sol.objective == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(sol.scalar_values(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.scalar_values(1) == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("largest eigenvalue via min t with tI - A psd") {
  for (unsigned seed : {7u, 21u, 99u}) {
    MatrixXd a = random_symmetric(6, seed);
    auto prob = scalar_problem({6}, {-a}, {{MatrixXd::Identity(6, 6)}},
                               VectorXd::Ones(1));
    auto sol = sdp::solve(prob);
    REQUIRE(sol.status == sdp::Status::optimal);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
    CHECK(sol.objective ==
          doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-6));
  }
}

TEST_CASE("matrix variable with identity map: min tr(P) s.t. P >= I") {
  const int n = 4;
  sdp::Problem p;
  p.block_dims = {n};
  p.f0 = {-MatrixXd::Identity(n, n)};
  sdp::MatrixVar mv;
  mv.dim = n;
  mv.g_maps = {0.5 * MatrixXd::Identity(n, n)};
  mv.objective = MatrixXd::Identity(n, n);
  p.matrix_vars.push_back(std::move(mv));
  auto sol = sdp::solve(p);
  REQUIRE(sol.status == sdp::Status::optimal);
  CHECK(sol.objective == doctest::Approx(static_cast<double>(n)).epsilon(1e-6));
  CHECK((sol.matrix_values[0] - MatrixXd::Identity(n, n)).norm() < 1e-4);
}

TEST_CASE("lyapunov map: min tr(P) over A'P+PA <= -I recovers the Lyapunov solution") {
  const int n = 5;
  std::mt19937 rng(11);
  std::normal_distribution<double> dist;
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
  MatrixXd a = -m * m.transpose() - MatrixXd::Identity(n, n);  // stable

  // Reference by Kronecker vectorization: (I⊗A' + A'⊗I) vec(P) = -vec(I).
  MatrixXd kron = MatrixXd::Zero(n * n, n * n);
  MatrixXd at = a.transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        kron(i * n + j, i * n + k) += at(j, k);  // I ⊗ A'
        kron(i * n + j, k * n + j) += at(i, k);  // A' ⊗ I
      }
  VectorXd vec_i = VectorXd::Zero(n * n);
  for (int i = 0; i < n; ++i) vec_i(i * n + i) = 1.0;
  VectorXd vec_p = kron.fullPivLu().solve(-vec_i);
  MatrixXd p_ref(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p_ref(i, j) = vec_p(i * n + j);

  sdp::Problem prob;
  prob.block_dims = {n, n};
  prob.f0 = {MatrixXd::Zero(n, n), -MatrixXd::Identity(n, n)};
  sdp::MatrixVar mv;
  mv.dim = n;
  mv.g_maps = {0.5 * MatrixXd::Identity(n, n), -a.transpose()};
  mv.objective = MatrixXd::Identity(n, n);
  prob.matrix_vars.push_back(std::move(mv));
  auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::optimal);
  CHECK(sol.objective == doctest::Approx(p_ref.trace()).epsilon(1e-5));
  CHECK((sol.matrix_values[0] - p_ref).norm() / p_ref.norm() < 1e-4);
}

TEST_CASE("infeasible LMI is reported, not silently solved") {
  MatrixXd f0(2, 2);
  f0 << -1, 0, 0, 0;
  MatrixXd c0 = MatrixXd::Zero(2, 2);
  c0(1, 1) = 1.0;
  auto prob = scalar_problem({2}, {f0}, {{c0}}, VectorXd::Ones(1));
  auto sol = sdp::solve(prob);
  CHECK(sol.status == sdp::Status::infeasible);
}

TEST_CASE("unbounded objective is reported") {
  auto prob = scalar_problem({1}, {MatrixXd::Zero(1, 1)},
                             {{MatrixXd::Constant(1, 1, 1.0)}},
                             -VectorXd::Ones(1));
  auto sol = sdp::solve(prob);
  CHECK(sol.status == sdp::Status::unbounded);
}

TEST_CASE("deterministic: repeated solves agree bitwise") {
  MatrixXd a = random_symmetric(5, 3);
  auto prob = scalar_problem({5}, {-a}, {{MatrixXd::Identity(5, 5)}},
                             VectorXd::Ones(1));
  auto s1 = sdp::solve(prob);
  auto s2 = sdp::solve(prob);
  REQUIRE(s1.status == sdp::Status::optimal);
  CHECK(s1.objective == s2.objective);
  CHECK(s1.scalar_values(0) == s2.scalar_values(0));
}

TEST_CASE("optimal solutions carry consistent certificates") {
  for (unsigned seed : {5u, 17u}) {
    // Random feasible problem: F0 = S0 - sum(y0_k * coeff_k) with S0 > 0.
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    const int n = 5, m = 3;
    std::vector<MatrixXd> coeffs;
    for (int k = 0; k < m; ++k) coeffs.push_back(random_symmetric(n, seed * 10 + static_cast<unsigned>(k)));
    MatrixXd s0 = MatrixXd::Identity(n, n);
    VectorXd y0(m);
    for (int k = 0; k < m; ++k) y0(k) = dist(rng);
    MatrixXd f0 = s0;
    for (int k = 0; k < m; ++k) f0 -= y0(k) * coeffs[k];

    sdp::Problem p;
    p.block_dims = {n};
    p.f0 = {f0};
    VectorXd obj(m);
    for (int k = 0; k < m; ++k) obj(k) = dist(rng);
    // Bounded objective: add small box blocks |y_k| <= 10 to rule out rays.
    for (int k = 0; k < m; ++k) {
      p.block_dims.push_back(1);
      p.block_dims.push_back(1);
      p.f0.push_back(MatrixXd::Constant(1, 1, 10.0));
      p.f0.push_back(MatrixXd::Constant(1, 1, 10.0));
    }
    for (int k = 0; k < m; ++k) {
      sdp::ScalarVar v;
      v.coeffs.assign(p.block_dims.size(), MatrixXd());
      v.coeffs[0] = coeffs[static_cast<std::size_t>(k)];
      v.coeffs[static_cast<std::size_t>(1 + 2 * k)] = MatrixXd::Constant(1, 1, 1.0);
      v.coeffs[static_cast<std::size_t>(2 + 2 * k)] = MatrixXd::Constant(1, 1, -1.0);
      v.objective = obj(k);
      p.scalar_vars.push_back(std::move(v));
    }
    auto sol = sdp::solve(p);
    REQUIRE(sol.status == sdp::Status::optimal);
    CHECK(sol.rel_gap < 1e-7);
    for (const auto& slk : sol.slack) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(slk, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > -1e-7);
    }
    for (const auto& x : sol.dual) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(x, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > -1e-7);
    }
  }
}

}  // TEST_SUITE
