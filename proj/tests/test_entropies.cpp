#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "thermocap/channel.hpp"
#include "thermocap/entropies.hpp"
#include "thermocap/random.hpp"

#include <cmath>

using namespace thermocap;

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann(Matrix::Identity(2, 2) / 2) == doctest::Approx(std::log(2.0)));
  Rng rng(1);
  Vector psi = rng.pure_state(3);
  CHECK(von_neumann(psi * psi.adjoint()) == doctest::Approx(0.0).epsilon(1e-9));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.7;
  d(1, 1) = 0.3;
  // high-precision scalar evaluation of -sum p ln p
  CHECK(von_neumann(d) == doctest::Approx(0.6108643020548935).epsilon(1e-10));
}

TEST_CASE("conditional entropy") {
  Rng rng(2);
  Matrix rho_a = rng.density_matrix(2), sig_b = rng.density_matrix(2);
  CHECK(conditional_entropy(kron(rho_a, sig_b), {2, 2}) ==
        doctest::Approx(von_neumann(rho_a)).epsilon(1e-10));

  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1 / std::sqrt(2.0);
  CHECK(conditional_entropy(phi * phi.adjoint(), {2, 2}) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-9));

  Matrix rho_ab = rng.density_matrix(4);
  double direct = von_neumann(rho_ab) - von_neumann(partial_trace(rho_ab, {2, 2}, {1}));
  CHECK(conditional_entropy(rho_ab, {2, 2}) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("relative entropy with support sentinel") {
  Rng rng(3);
  Matrix rho = rng.density_matrix(3);
  CHECK(relative_entropy(rho, rho).value == doctest::Approx(0.0).epsilon(1e-9));

  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  CHECK(relative_entropy(p0, Matrix::Identity(2, 2) / 2).value ==
        doctest::Approx(std::log(2.0)));
  CHECK(relative_entropy(p0, p1).infinite());
}

TEST_CASE("measured relative entropy") {
  const int d = 4;
  Rng rng(4);
  Matrix rho = rng.density_matrix(d);
  CHECK(measured_relative(rho, Matrix::Identity(d, d) / d).value ==
        doctest::Approx(std::log(double(d))).epsilon(1e-10));

  Vector psi = rng.pure_state(3);
  Matrix pure = psi * psi.adjoint();
  CHECK(measured_relative(pure, pure).value == doctest::Approx(0.0).epsilon(1e-7));

  // commuting pair: D(rho||tau) = D_M(rho||tau) - H(rho)
  RealVector pr(3), pt(3);
  pr << 0.5, 0.3, 0.2;
  pt << 0.2, 0.5, 0.3;
  Matrix mr = Matrix::Zero(3, 3), mt = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) {
    mr(i, i) = pr(i);
    mt(i, i) = pt(i);
  }
  CHECK(relative_entropy(mr, mt).value ==
        doctest::Approx(measured_relative(mr, mt).value - von_neumann(mr)).epsilon(1e-10));
}

TEST_CASE("hypothesis testing documented instances") {
  Rng rng(5);
  Matrix rho = rng.density_matrix(2);
  auto r = hypothesis_testing(rho, rho, 0.7);
  CHECK(r.d_h == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(r.d_h_ln == doctest::Approx(std::log(10.0 / 7.0)).epsilon(1e-8));

  Matrix d7 = Matrix::Zero(2, 2);
  d7(0, 0) = 0.7;
  d7(1, 1) = 0.3;
  auto r2 = hypothesis_testing(d7, Matrix::Identity(2, 2) / 2, 0.7);
  CHECK(r2.d_h == doctest::Approx(std::log(7.0 / 5.0)).epsilon(1e-8));

  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  auto r3 = hypothesis_testing(p0, p1, 0.5);
  CHECK(r3.infinite);

  CHECK_THROWS_AS(hypothesis_testing(0.5 * p0, p1, 0.9), std::invalid_argument);
}

TEST_CASE("Neyman-Pearson and SDP methods agree with dual certificates") {
  Rng rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 2 + rep % 3;
    Matrix rho = rng.density_matrix(d);
    Matrix sigma = rng.density_matrix(d);
    const double eta = 0.2 + 0.7 * rng.uniform();
    auto np = hypothesis_testing(rho, sigma, eta, HypTestMethod::NeymanPearson);
    auto sp = hypothesis_testing(rho, sigma, eta, HypTestMethod::Sdp);
    REQUIRE(!np.infinite);
    REQUIRE(!sp.infinite);
    CHECK(np.d_h == doctest::Approx(sp.d_h).epsilon(1e-6));

    for (const auto& res : {np, sp}) {
      // primal feasibility of Q
      EigResult eq = eig_hermitian(res.optimal_q);
      CHECK(eq.values.minCoeff() > -1e-8);
      CHECK(eq.values.maxCoeff() < 1 + 1e-8);
      CHECK(std::real((res.optimal_q * rho).trace()) > eta - 1e-7);
      // dual feasibility mu rho <= sigma + X and value certification
      EigResult ex = eig_hermitian(sigma + res.dual_x - res.mu * rho);
      CHECK(ex.values.minCoeff() > -1e-8);
      double dual_val = res.mu - std::real(res.dual_x.trace()) / eta;
      CHECK(dual_val <= std::exp(-res.d_h) + 1e-6);
      CHECK(dual_val == doctest::Approx(std::exp(-res.d_h)).epsilon(2e-5));
    }
  }
}

TEST_CASE("D_h is non-increasing in eta (property)") {
  Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix rho = rng.density_matrix(3), sigma = rng.density_matrix(3);
    double prev = std::numeric_limits<double>::infinity();
    for (double eta : {0.2, 0.4, 0.6, 0.8, 0.95}) {
      auto r = hypothesis_testing(rho, sigma, eta);
      CHECK(r.d_h_ln <= prev + 1e-7);
      prev = r.d_h_ln;
    }
  }
}

TEST_CASE("data processing under random qubit channels (property)") {
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix rho = rng.density_matrix(2), sigma = rng.density_matrix(2);
    Matrix v = rng.isometry(8, 2);
    std::vector<Matrix> ks;
    for (int e = 0; e < 4; ++e) {
      Matrix k(2, 2);
      for (int o = 0; o < 2; ++o) k.row(o) = v.row(o * 4 + e);
      ks.push_back(k);
    }
    QuantumChannel c(2, 2, ks);
    auto lhs = relative_entropy(c.apply(rho), c.apply(sigma));
    auto rhs = relative_entropy(rho, sigma);
    if (!rhs.infinite()) CHECK(lhs.value <= rhs.value + 1e-8);
  }
}
