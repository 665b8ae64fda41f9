#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "thermocap/channel.hpp"
#include "thermocap/random.hpp"

#include <cmath>

using namespace thermocap;

namespace {

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

Matrix plus_state() {
  Vector p(2);
  p << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  return p * p.adjoint();
}

Matrix pauliZ() {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = -1;
  return m;
}

}  // namespace

TEST_CASE("Choi matrices of reference channels") {
  QuantumChannel id2 = QuantumChannel::identity(2);
  Matrix j = id2.choi();
  CHECK(j.trace().real() == doctest::Approx(2.0));
  EigResult e = eig_hermitian(j);
  CHECK(e.values(0) == doctest::Approx(2.0));
  CHECK(e.values(1) == doctest::Approx(0.0).epsilon(1e-12));

  QuantumChannel dep = QuantumChannel::depolarizing(2, 1.0);
  CHECK(inf_norm(dep.choi() - Matrix::Identity(4, 4) / 2) < 1e-12);
}

TEST_CASE("choi round trip on random channels") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    QuantumChannel c = random_channel(rng, 2, 3, 3);
    QuantumChannel back = QuantumChannel::from_choi(c.choi(), 2, 3);
    CHECK(inf_norm(back.choi() - c.choi()) < 1e-9);
    CHECK(back.tp_class() == TpClass::TracePreserving);
  }
  Rng rng2(12);
  Matrix not_psd = rng2.hermitian(4);
  not_psd -= 3.0 * Matrix::Identity(4, 4);
  CHECK_THROWS_AS(QuantumChannel::from_choi(not_psd, 2, 2), std::invalid_argument);
}

TEST_CASE("apply, adjoint and duality") {
  Rng rng(13);
  QuantumChannel id2 = QuantumChannel::identity(2);
  Matrix rho = rng.density_matrix(2);
  CHECK(inf_norm(id2.apply(rho) - rho) < 1e-14);

  QuantumChannel c = random_channel(rng, 2, 3, 2);
  CHECK(inf_norm(c.apply_adjoint(Matrix::Identity(3, 3)) - Matrix::Identity(2, 2)) < 1e-10);

  QuantumChannel erase = QuantumChannel::replacement(2, plus_state());
  Matrix phi = id2.choi() / 2;  // maximally entangled state on R(x)X
  // acting on the second factor of R (x) X
  Matrix out = erase.apply_on(phi, {2, 2}, {1});
  CHECK(inf_norm(out - kron(Matrix::Identity(2, 2) / 2, plus_state())) < 1e-12);

  for (int rep = 0; rep < 100; ++rep) {
    Matrix y = rng.hermitian(2), z = rng.hermitian(3);
    double lhs = std::real((c.apply(y) * z).trace());
    double rhs = std::real((y * c.apply_adjoint(z)).trace());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("stinespring dilations") {
  QuantumChannel u = QuantumChannel::unitary(pauliZ());
  auto d = stinespring(u);
  CHECK(d.dim_env == 1);

  auto dep = stinespring(QuantumChannel::depolarizing(2, 1.0));
  CHECK(dep.dim_env == 4);

  Rng rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    QuantumChannel c = random_channel(rng, 3, 2, 3);
    auto dil = stinespring(c);
    CHECK(inf_norm(dil.isometry.adjoint() * dil.isometry - Matrix::Identity(3, 3)) < 1e-10);
    Matrix rho = rng.density_matrix(3);
    Matrix big = dil.isometry * rho * dil.isometry.adjoint();
    Matrix out = partial_trace(big, {2, dil.dim_env}, {0});
    CHECK(inf_norm(out - c.apply(rho)) < 1e-9);
  }
}

TEST_CASE("time covariance detection") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1;

  CHECK(is_time_covariant(QuantumChannel::dephasing(2), h));
  CHECK(is_time_covariant(QuantumChannel::amplitude_damping(0.35), h));

  Matrix had(2, 2);
  had << 1, 1, 1, -1;
  had /= std::sqrt(2.0);
  CHECK(!is_time_covariant(QuantumChannel::unitary(had), h));

  // cross-validation by sampling t over [0.1, 2 pi]
  Rng rng(19);
  QuantumChannel ad = QuantumChannel::amplitude_damping(0.35);
  for (double t : {0.1, 0.7, 1.9, 3.1, 6.28}) {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = 1;
    u(1, 1) = std::exp(Complex(0, -t));
    Matrix rho = rng.density_matrix(2);
    Matrix lhs = ad.apply(u * rho * u.adjoint());
    Matrix rhs = u * ad.apply(rho) * u.adjoint();
    CHECK(inf_norm(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("covariant stinespring dilation") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1;

  SUBCASE("energy-diagonal unitary channel has a one-dim environment") {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = 1;
    u(1, 1) = std::exp(Complex(0, -1.0));
    auto cd = covariant_stinespring(QuantumChannel::unitary(u), h);
    CHECK(cd.dim_env == 1);
    CHECK(inf_norm(cd.h_env) < 1e-12);
  }

  SUBCASE("dephasing and amplitude damping dilate with energy conservation") {
    for (auto c : {QuantumChannel::dephasing(2), QuantumChannel::amplitude_damping(0.35)}) {
      auto cd = covariant_stinespring(c, h);
      const int de = cd.dim_env;
      Matrix htot = kron(h, Matrix::Identity(de, de)) +
                    kron(Matrix::Identity(2, 2), cd.h_env);
      CHECK(inf_norm(cd.unitary * cd.unitary.adjoint() - Matrix::Identity(2 * de, 2 * de)) <
            1e-10);
      CHECK(inf_norm(cd.unitary * htot * cd.unitary.adjoint() - htot) < 1e-9);
      // channel reproduction from |0>_E
      Rng rng(23);
      for (int rep = 0; rep < 5; ++rep) {
        Matrix rho = rng.density_matrix(2);
        Matrix zero = Matrix::Zero(de, de);
        zero(cd.zero_index, cd.zero_index) = 1;
        Matrix big = cd.unitary * kron(rho, zero) * cd.unitary.adjoint();
        CHECK(inf_norm(partial_trace(big, {2, de}, {0}) - c.apply(rho)) < 1e-9);
      }
    }
  }

  SUBCASE("non-covariant channel is rejected") {
    Matrix had(2, 2);
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    CHECK_THROWS_AS(covariant_stinespring(QuantumChannel::unitary(had), h),
                    std::invalid_argument);
  }
}

TEST_CASE("diamond distance") {
  QuantumChannel id2 = QuantumChannel::identity(2);
  CHECK(diamond_distance(id2, id2) == doctest::Approx(0.0).epsilon(1e-7));

  QuantumChannel z = QuantumChannel::unitary(pauliZ());
  CHECK(diamond_distance(z, id2) == doctest::Approx(1.0).epsilon(1e-7));

  // depolarizing vs identity, cross-checked against sampled pure inputs
  QuantumChannel dep = QuantumChannel::depolarizing(2, 0.3);
  double val = diamond_distance(dep, id2);
  Rng rng(29);
  double best = 0;
  auto probe = [&](const Matrix& st) {
    Matrix a = dep.apply_on(st, {2, 2}, {0});
    best = std::max(best, trace_distance(a, st));
  };
  for (int rep = 0; rep < 300; ++rep) {
    Vector psi = rng.pure_state(4);
    probe(psi * psi.adjoint());
  }
  probe(QuantumChannel::identity(2).choi() / 2);  // maximally entangled input
  CHECK(best <= val + 1e-6);
  CHECK(val == doctest::Approx(best).epsilon(1e-6));  // optimum sits at the entangled input
}

TEST_CASE("diamond distance triangle inequality (property)") {
  Rng rng(31);
  std::vector<QuantumChannel> cs;
  for (int i = 0; i < 3; ++i) cs.push_back(random_channel(rng, 2, 2, 2));
  double dab = diamond_distance(cs[0], cs[1]);
  double dbc = diamond_distance(cs[1], cs[2]);
  double dac = diamond_distance(cs[0], cs[2]);
  CHECK(dac <= dab + dbc + 1e-7);
}
