#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "thermocap/random.hpp"
#include "thermocap/sdp.hpp"

#include <cmath>

using namespace thermocap;

TEST_CASE("scalar LP: min x subject to x >= 2") {
  sdp::Problem p;
  int bx = p.add_block(1);
  int bs = p.add_block(1);
  p.set_objective(bx, Matrix::Identity(1, 1));
  Matrix one = Matrix::Identity(1, 1);
  p.add_constraint({{bx, one}, {bs, -one}}, 2.0);
  sdp::Solution s = sdp::solve(p);
  REQUIRE(s.status == sdp::Status::Optimal);
  CHECK(s.primal_value == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(s.dual_value <= s.primal_value + 1e-7);
}

TEST_CASE("infeasible: x <= -1 with x >= 0") {
  sdp::Problem p;
  int bx = p.add_block(1);
  int bs = p.add_block(1);
  Matrix one = Matrix::Identity(1, 1);
  p.set_objective(bx, one);
  p.add_constraint({{bx, one}, {bs, one}}, -1.0);
  sdp::Solution s = sdp::solve(p);
  CHECK(s.status == sdp::Status::Infeasible);
}

namespace {

// Brute-force oracle for the commuting hypothesis-testing program:
// min tr[Q sigma] s.t. 0 <= Q <= I diagonal, tr[Q rho] >= eta.
double diagonal_hyptest_oracle(const RealVector& rho, const RealVector& sigma, double eta) {
  // Neyman-Pearson over likelihood ratios: sort by sigma_i / rho_i ascending
  std::vector<int> order(rho.size());
  for (int i = 0; i < rho.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return sigma(a) * rho(b) < sigma(b) * rho(a);
  });
  double need = eta, cost = 0;
  for (int i : order) {
    if (need <= 0) break;
    double take = std::min(1.0, need / rho(i));
    cost += take * sigma(i);
    need -= take * rho(i);
  }
  return cost;
}

}  // namespace

TEST_CASE("commuting qubit hypothesis test matches the LP oracle") {
  Rng rng(31);
  for (int rep = 0; rep < 8; ++rep) {
    RealVector r(2), s(2);
    double a = 0.2 + 0.6 * rng.uniform();
    r << a, 1 - a;
    double b = 0.2 + 0.6 * rng.uniform();
    s << b, 1 - b;
    double eta = 0.3 + 0.5 * rng.uniform();

    sdp::Problem p;
    int bq = p.add_block(2);
    int bs1 = p.add_block(2);
    int bt = p.add_block(1);
    Matrix rho = Matrix::Zero(2, 2), sig = Matrix::Zero(2, 2);
    rho(0, 0) = r(0);
    rho(1, 1) = r(1);
    sig(0, 0) = s(0);
    sig(1, 1) = s(1);
    p.set_objective(bq, sig);
    p.add_matrix_equality(2, Matrix::Identity(2, 2),
                          {{bq, [](const Matrix& e) { return e; }},
                           {bs1, [](const Matrix& e) { return e; }}});
    Matrix neg1(1, 1);
    neg1(0, 0) = -1;
    p.add_constraint({{bq, rho}, {bt, neg1}}, eta);

    sdp::Solution sol = sdp::solve(p);
    REQUIRE(sol.status == sdp::Status::Optimal);
    double oracle = diagonal_hyptest_oracle(r, s, eta);
    CHECK(sol.primal_value == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(sol.dual_value <= sol.primal_value + 1e-7);
  }
}

TEST_CASE("random small SDPs satisfy weak duality and KKT residuals") {
  Rng rng(37);
  for (int rep = 0; rep < 6; ++rep) {
    // min tr[C X] s.t. tr[A_i X] = b_i with X >= 0; generated feasible
    sdp::Problem p;
    int d = 3 + rep % 3;
    int bx = p.add_block(d);
    Matrix c = rng.hermitian(d);
    p.set_objective(bx, c + 2.0 * double(d) * Matrix::Identity(d, d));  // bounded below on PSD
    Matrix x0 = rng.density_matrix(d);
    for (int i = 0; i < 3; ++i) {
      Matrix a = rng.hermitian(d);
      p.add_constraint({{bx, a}}, std::real((a * x0).trace()));
    }
    sdp::Solution sol = sdp::solve(p);
    REQUIRE(sol.status == sdp::Status::Optimal);
    CHECK(sol.dual_value <= sol.primal_value + 1e-7);
    // primal feasibility at the solution
    for (size_t i = 0; i < p.constraints.size(); ++i) {
      double lhs = 0;
      for (const auto& [b, a] : p.constraints[i].terms)
        lhs += std::real((a * sol.x[b]).trace());
      CHECK(std::abs(lhs - p.constraints[i].rhs) < 1e-6);
    }
    // primal block PSD within tolerance
    EigResult e = eig_hermitian(sol.x[bx]);
    CHECK(e.values.minCoeff() > -1e-9);
  }
}
