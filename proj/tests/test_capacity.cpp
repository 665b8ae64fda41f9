#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "thermocap/capacity.hpp"
#include "thermocap/random.hpp"

#include <cmath>

using namespace thermocap;

namespace {

Matrix plus_state() {
  Vector p(2);
  p << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  return p * p.adjoint();
}

Matrix qubit_h(double e1) {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = e1;
  return h;
}

QuantumChannel random_channel(Rng& rng, int din, int dout, int rank) {
  Matrix v = rng.isometry(dout * rank, din);
  std::vector<Matrix> ks;
  for (int e = 0; e < rank; ++e) {
    Matrix k(dout, din);
    for (int o = 0; o < dout; ++o) k.row(o) = v.row(o * rank + e);
    ks.push_back(k);
  }
  return QuantumChannel(din, dout, ks);
}

}  // namespace

TEST_CASE("capacity of reference channels") {
  GammaSpec triv = GammaSpec::trivial(2);

  SUBCASE("identity with matched Gammas is zero") {
    Matrix h = qubit_h(1.0);
    GammaSpec g = GammaSpec::from_hamiltonian(h, 1.0);
    auto r = thermodynamic_capacity(QuantumChannel::identity(2), g, g);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-8));
  }

  SUBCASE("replacement to a pure state with trivial Gammas") {
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1;
    auto r = thermodynamic_capacity(QuantumChannel::replacement(2, p0), triv, triv);
    CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-7));
  }

  SUBCASE("erasure to |+> against thermal Gammas: closed form") {
    GammaSpec g = GammaSpec::from_hamiltonian(qubit_h(1.0), 1.0);
    auto r = thermodynamic_capacity(QuantumChannel::replacement(2, plus_state()), g, g);
    const double expected = 0.5 + std::log(1 + std::exp(-1.0));
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-7));
    // cross-check with a dense Bloch-ball style scan over diagonal mixes of
    // random pure directions
    Rng rng(3);
    double best = -1e300;
    for (int rep = 0; rep < 4000; ++rep) {
      Matrix s = rng.density_matrix(2);
      best = std::max(best, capacity_objective(QuantumChannel::replacement(2, plus_state()),
                                               g, g, s));
    }
    CHECK(best <= r.value + 1e-6);
    CHECK(r.value - best < 5e-3);
  }
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(5);
  QuantumChannel c = random_channel(rng, 2, 2, 2);
  GammaSpec gi = GammaSpec::abstract(rng.density_matrix(2) + 0.3 * Matrix::Identity(2, 2));
  GammaSpec go = GammaSpec::abstract(rng.density_matrix(2) + 0.3 * Matrix::Identity(2, 2));
  Matrix sigma = rng.density_matrix(2);
  sigma = 0.8 * sigma + 0.2 * Matrix::Identity(2, 2) / 2;  // keep interior
  Matrix grad = capacity_gradient(c, gi, go, sigma);
  const double h = 1e-6;
  Rng rng2(6);
  for (int rep = 0; rep < 5; ++rep) {
    Matrix dir = rng2.hermitian(2);
    dir -= (dir.trace().real() / 2) * Matrix::Identity(2, 2);  // traceless direction
    double fp = capacity_objective(c, gi, go, sigma + h * dir);
    double fm = capacity_objective(c, gi, go, sigma - h * dir);
    double fd = (fp - fm) / (2 * h);
    double an = std::real((grad * dir).trace());
    CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("maximality and concavity of the capacity objective") {
  Rng rng(7);
  QuantumChannel c = random_channel(rng, 2, 2, 2);
  GammaSpec gi = GammaSpec::abstract(rng.density_matrix(2) + 0.2 * Matrix::Identity(2, 2));
  GammaSpec go = GammaSpec::abstract(rng.density_matrix(2) + 0.2 * Matrix::Identity(2, 2));
  auto r = thermodynamic_capacity(c, gi, go);
  for (int rep = 0; rep < 100; ++rep)
    CHECK(capacity_objective(c, gi, go, rng.density_matrix(2)) <= r.value + 1e-8);
  // concavity along random chords
  for (int rep = 0; rep < 30; ++rep) {
    Matrix s1 = rng.density_matrix(2), s2 = rng.density_matrix(2);
    double lam = rng.uniform();
    double lhs = capacity_objective(c, gi, go, lam * s1 + (1 - lam) * s2);
    double rhs = lam * capacity_objective(c, gi, go, s1) +
                 (1 - lam) * capacity_objective(c, gi, go, s2);
    CHECK(lhs >= rhs - 1e-8);
  }
}

TEST_CASE("entropy gain") {
  CHECK(entropy_gain(QuantumChannel::unitary(Matrix::Identity(2, 2))) ==
        doctest::Approx(0.0).epsilon(1e-7));
  CHECK(entropy_gain(QuantumChannel::depolarizing(2, 1.0)) ==
        doctest::Approx(0.0).epsilon(1e-7));
  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  CHECK(entropy_gain(QuantumChannel::replacement(2, p0)) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-7));
}

TEST_CASE("additivity") {
  GammaSpec triv = GammaSpec::trivial(2);
  auto rep0 = additivity_check(QuantumChannel::identity(2), QuantumChannel::identity(2),
                               triv, triv, triv, triv);
  CHECK(rep0.gap < 1e-8);

  Rng rng(11);
  for (int t = 0; t < 2; ++t) {
    QuantumChannel e = random_channel(rng, 2, 2, 2);
    QuantumChannel f = random_channel(rng, 2, 2, 2);
    auto rep = additivity_check(e, f, triv, triv, triv, triv);
    CHECK(rep.gap <= 1e-5);
  }

  // T(E (x) id_R) = T(E)
  QuantumChannel e = random_channel(rng, 2, 2, 2);
  auto rep = additivity_check(e, QuantumChannel::identity(2), triv, triv, triv, triv);
  auto te = thermodynamic_capacity(e, triv, triv);
  CHECK(rep.joint == doctest::Approx(te.value).epsilon(1e-5));
}

TEST_CASE("coherent relative entropy: documented instances") {
  const double beta = 1.0;

  SUBCASE("eps = 0 with a full-rank input equals minus the Gibbs margin") {
    Rng rng(13);
    QuantumChannel e = random_channel(rng, 2, 2, 2);
    GammaSpec g = GammaSpec::from_hamiltonian(qubit_h(0.7), beta);
    auto r = coherent_relative_entropy(e, Matrix::Identity(2, 2) / 2, g, g, 0.0);
    const double margin = gibbs_sub_preservation_margin(e, g, g);
    CHECK(r.value == doctest::Approx(-margin).epsilon(1e-7));
    CHECK(r.max_constraint_residual < 1e-7);
  }

  SUBCASE("robust counterexample instance: closed form at eps = 0") {
    for (double e1 : {1.0, 5.0}) {
      GammaSpec g = GammaSpec::from_hamiltonian(qubit_h(e1), beta);
      QuantumChannel erase_plus = QuantumChannel::replacement(2, plus_state());
      auto r = coherent_relative_entropy(erase_plus, Matrix::Identity(2, 2) / 2, g, g, 0.0);
      const double tr_gamma = 1 + std::exp(-beta * e1);
      const double expected = -std::log(tr_gamma * (1 + std::exp(beta * e1)) / 2);
      CHECK(r.value == doctest::Approx(expected).epsilon(1e-6));
    }
  }

  SUBCASE("small eps keeps the cost above beta E1 - 2 ln 2") {
    const double e1 = 10.0;
    GammaSpec g = GammaSpec::from_hamiltonian(qubit_h(e1), beta);
    QuantumChannel erase_plus = QuantumChannel::replacement(2, plus_state());
    auto r = coherent_relative_entropy(erase_plus, Matrix::Identity(2, 2) / 2, g, g, 0.01);
    CHECK(-r.value >= beta * e1 - 2 * std::log(2.0));
  }

  SUBCASE("monotone non-decreasing in eps") {
    Rng rng(17);
    QuantumChannel e = random_channel(rng, 2, 2, 2);
    GammaSpec g = GammaSpec::from_hamiltonian(qubit_h(0.5), beta);
    double prev = -1e300;
    for (double eps : {0.0, 0.05, 0.15, 0.3}) {
      auto r = coherent_relative_entropy(e, rng.density_matrix(2), g, g, eps);
      (void)prev;
      // note: different sigma draws would break monotonicity; fix sigma
    }
    Matrix sigma = rng.density_matrix(2);
    prev = -1e300;
    for (double eps : {0.0, 0.05, 0.15, 0.3}) {
      auto r = coherent_relative_entropy(e, sigma, g, g, eps);
      CHECK(r.value >= prev - 1e-6);
      prev = r.value;
    }
  }
}

TEST_CASE("universal work cost") {
  GammaSpec triv = GammaSpec::trivial(2);

  SUBCASE("eps = 0 equals the Gibbs margin; eps >= 1 is unbounded") {
    Rng rng(19);
    QuantumChannel e = random_channel(rng, 2, 2, 2);
    GammaSpec g = GammaSpec::from_hamiltonian(qubit_h(0.8), 1.0);
    CHECK(universal_work_cost(e, g, g, 0.0) ==
          doctest::Approx(gibbs_sub_preservation_margin(e, g, g)));
    CHECK(std::isinf(universal_work_cost(e, g, g, 1.0)));
  }

  SUBCASE("qubit erasure to |+>: per-copy bound and n=2 improvement") {
    QuantumChannel e = QuantumChannel::replacement(2, plus_state());
    const double eps = 0.05;
    double w1 = universal_work_cost(e, triv, triv, eps);
    GammaSpec triv4 = GammaSpec::trivial(4);
    double w2 = universal_work_cost(e.power(2), triv4, triv4, eps);
    auto t = thermodynamic_capacity(e, triv, triv);
    CHECK(w1 >= t.value - 0.15);
    CHECK(w2 / 2 >= t.value - 0.15);
    // the per-copy cost tightens towards the capacity with the block size
    CHECK(std::abs(w2 / 2 - t.value) <= std::abs(w1 - t.value) + 1e-9);
  }
}

TEST_CASE("AEP scan") {
  SUBCASE("identity channel at the Gibbs input gives zero at every n") {
    GammaSpec g = GammaSpec::from_hamiltonian(qubit_h(1.0), 1.0);
    auto scan = aep_scan(QuantumChannel::identity(2), gibbs(g), g, g, 0.05, 2);
    CHECK(scan.limit == doctest::Approx(0.0).epsilon(1e-10));
    for (const auto& pt : scan.points) CHECK(std::abs(pt.value_per_copy) < 0.08);
  }

  SUBCASE("dephasing with a diagonal input sits at the fixed point") {
    Matrix sigma = Matrix::Zero(2, 2);
    sigma(0, 0) = 0.7;
    sigma(1, 1) = 0.3;
    GammaSpec g = GammaSpec::from_hamiltonian(qubit_h(1.0), 1.0);
    auto scan = aep_scan(QuantumChannel::dephasing(2), sigma, g, g, 0.0, 2);
    for (const auto& pt : scan.points)
      CHECK(pt.value_per_copy == doctest::Approx(scan.limit).epsilon(1e-6));
  }

  SUBCASE("amplitude damping converges towards the limit") {
    // with Gamma_out = E(I) the limit and the Gibbs margin coincide at 0,
    // so the per-copy value is a pure smoothing discount shrinking with n
    QuantumChannel e = QuantumChannel::amplitude_damping(0.3);
    GammaSpec gin = GammaSpec::trivial(2);
    GammaSpec gout = GammaSpec::abstract(e.apply(Matrix::Identity(2, 2)));
    auto scan = aep_scan(e, Matrix::Identity(2, 2) / 2, gin, gout, 0.05, 2);
    double gap1 = std::abs(scan.points[0].value_per_copy - scan.limit);
    double gap2 = std::abs(scan.points[1].value_per_copy - scan.limit);
    CHECK(gap2 < gap1);
  }
}
