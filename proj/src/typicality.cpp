#include "thermocap/typicality.hpp"

#include "thermocap/capacity.hpp"
#include "thermocap/entropies.hpp"
#include "thermocap/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace thermocap::typicality {

namespace {

// m . (u^{(x) n}) applied factor by factor
Matrix right_multiply_kron(const Matrix& m, const Matrix& u, int n) {
  const int d = static_cast<int>(u.rows());
  std::vector<int> dims(n, d);
  Matrix out = m;
  for (int k = 0; k < n; ++k)
    out = apply_right_adjoint(u.adjoint(), out, dims, {k});
  return out;
}

Matrix left_multiply_kron(const Matrix& u, const Matrix& m, int n) {
  const int d = static_cast<int>(u.rows());
  std::vector<int> dims(n, d);
  Matrix out = m;
  for (int k = 0; k < n; ++k) out = apply_left(u, out, dims, {k});
  return out;
}

long long ipow_guarded(int d, int n, long long guard, const char* who) {
  long long out = 1;
  for (int i = 0; i < n; ++i) {
    out *= d;
    if (out > guard) throw std::invalid_argument(std::string(who) + ": size guard exceeded");
  }
  return out;
}

}  // namespace

RelTypicalProjector relative_typical_projector(const Matrix& rho, const Matrix& tau, int n,
                                               double delta) {
  const int d = static_cast<int>(rho.rows());
  ipow_guarded(d, n, 4096, "relative_typical_projector");
  if (!support_contained(rho, tau))
    throw std::domain_error("relative_typical_projector: supp(rho) not within supp(tau)");

  EigResult et = eig_hermitian(tau);
  const double cut = kSupportRelTol * std::max(1.0, et.values.cwiseAbs().maxCoeff());
  RealVector mlog(d);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < d; ++i) {
    if (et.values(i) > cut) {
      mlog(i) = -std::log(et.values(i));
      lo = std::min(lo, mlog(i));
      hi = std::max(hi, mlog(i));
    } else {
      mlog(i) = std::numeric_limits<double>::infinity();  // outside the support
    }
  }

  RelTypicalProjector out;
  out.d_m = -std::real((rho * log_support(tau)).trace());
  const double range = (hi > lo) ? hi - lo : 0.0;
  out.eta = range > 0 ? 2 * delta * delta / (range * range)
                      : std::numeric_limits<double>::infinity();

  const int dim = static_cast<int>(std::llround(std::pow(double(d), n)));
  RealVector sel = RealVector::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    int x = i;
    double mean = 0;
    for (int k = 0; k < n; ++k) {
      mean += mlog(x % d);
      x /= d;
    }
    mean /= n;
    if (std::isfinite(mean) && std::abs(mean - out.d_m) <= delta) sel(i) = 1.0;
  }
  Matrix diag = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) diag(i, i) = sel(i);
  Matrix u = et.vectors;
  out.projector = left_multiply_kron(u, right_multiply_kron(diag, u.adjoint(), n), n);
  out.projector = 0.5 * (out.projector + out.projector.adjoint());
  out.weight = std::real((out.projector * kron_pow(rho, n)).trace());
  return out;
}

ConditionalTypicalProjector universal_conditional_typical_projector(double s, double delta,
                                                                    int n, int d_a, int d_b) {
  ipow_guarded(d_a * d_b, n, 4096, "universal_conditional_typical_projector");
  std::vector<int> dims;
  std::vector<int> b_pos;
  for (int k = 0; k < n; ++k) {
    dims.push_back(d_a);
    dims.push_back(d_b);
    b_pos.push_back(2 * k + 1);
  }
  auto big_blocks = schur::schur_blocks(n, d_a * d_b);
  auto small_blocks = schur::schur_blocks(n, d_b);

  const int dim = static_cast<int>(big_blocks[0].projector.rows());
  ConditionalTypicalProjector out;
  out.projector = Matrix::Zero(dim, dim);
  for (const auto& big : big_blocks) {
    if (big.dim_q == 0) continue;
    for (const auto& small : small_blocks) {
      if (small.dim_q == 0) continue;
      if (big.entropy - small.entropy > s + 2 * delta) continue;
      out.projector += apply_left(small.projector, big.projector, dims, b_pos);
      ++out.terms;
    }
  }
  out.projector = 0.5 * (out.projector + out.projector.adjoint());

  Matrix tr_a = partial_trace(out.projector, dims, b_pos);
  out.c_measured = op_norm_hermitian(tr_a) * std::exp(-double(n) * (s + 2 * delta));
  return out;
}

SmoothingOperator universal_smoothing_operator(const GammaSpec& gamma_ab,
                                               const GammaSpec& gamma_b, double x,
                                               double delta, int n, int d_a, int d_b) {
  const int dab = d_a * d_b;
  if (gamma_ab.dim() != dab || gamma_b.dim() != d_b)
    throw std::invalid_argument("universal_smoothing_operator: Gamma dims mismatch");
  const long long dtot = ipow_guarded(dab, n, 4096, "universal_smoothing_operator");
  const int dim = static_cast<int>(dtot);

  // zero eigenvalues: build from padded Gammas, then conjugate with the
  // support projectors at the end
  Matrix p_ab = support_projector(gamma_ab.gamma);
  Matrix p_b = support_projector(gamma_b.gamma);
  const bool ab_full = inf_norm(Matrix::Identity(dab, dab) - p_ab) < 0.5;
  const bool b_full = inf_norm(Matrix::Identity(d_b, d_b) - p_b) < 0.5;
  Matrix g_ab = gamma_ab.gamma + (Matrix::Identity(dab, dab) - p_ab);
  Matrix g_b = gamma_b.gamma + (Matrix::Identity(d_b, d_b) - p_b);

  schur::EnergyPovm povm_r = schur::energy_povm_from_gamma(g_ab, n, /*materialize=*/false);
  schur::EnergyPovm povm_s = schur::energy_povm_from_gamma(g_b, n);

  SmoothingOperator out;
  out.x = x;
  out.delta = delta;
  out.n = n;
  out.d_a = d_a;
  out.d_b = d_b;
  out.gamma_ab = gamma_ab.gamma;
  out.gamma_b = gamma_b.gamma;

  auto big_blocks = schur::schur_blocks(n, dab);
  auto small_blocks = schur::schur_blocks(n, d_b);
  for (const auto& b : big_blocks) out.lambdas.push_back(b.diagram);
  for (const auto& b : small_blocks) out.mus.push_back(b.diagram);

  std::vector<int> dims;
  std::vector<int> b_pos;
  for (int k = 0; k < n; ++k) {
    dims.push_back(d_a);
    dims.push_back(d_b);
    b_pos.push_back(2 * k + 1);
  }

  // sequence labels of Gamma_AB^{(x) n} in its eigenbasis
  // mean label of each eigenvector sequence (digit order is immaterial
  // for the sum)
  const int d_r = dab;
  std::vector<double> seq_k(dim);
  for (int i = 0; i < dim; ++i) {
    int v = i;
    double sum = 0;
    for (int c = 0; c < n; ++c) {
      sum += povm_r.energies(v % d_r);
      v /= d_r;
    }
    seq_k[i] = sum / n;
  }

  // M = sum_lambda [ sum_{(l,mu)} embed_B(S^l Pi^mu) (Pi^lambda R^{>= t}) ]
  // with R^{>= t} = U D_{>= t} U^dag applied in factored form.
  Matrix acc = Matrix::Zero(dim, dim);
  for (size_t li = 0; li < big_blocks.size(); ++li) {
    if (big_blocks[li].dim_q == 0) continue;
    Matrix f_lambda = right_multiply_kron(big_blocks[li].projector, povm_r.basis, n);
    for (size_t mi = 0; mi < small_blocks.size(); ++mi) {
      if (small_blocks[mi].dim_q == 0) continue;
      for (size_t si = 0; si < povm_s.labels.size(); ++si) {
        const double l = povm_s.labels[si];
        const double threshold =
            x - 4 * delta + big_blocks[li].entropy + l - small_blocks[mi].entropy;
        // columns with k >= threshold survive
        Matrix scaled = f_lambda;
        bool any = false;
        for (int c = 0; c < dim; ++c) {
          if (seq_k[c] >= threshold - 1e-12) {
            any = true;
          } else {
            scaled.col(c).setZero();
          }
        }
        if (!any) continue;
        for (size_t ki = 0; ki < povm_r.labels.size(); ++ki)
          if (povm_r.labels[ki] >= threshold - 1e-12)
            out.admissible.push_back({povm_r.labels[ki], l, static_cast<int>(li),
                                      static_cast<int>(mi)});
        Matrix term = right_multiply_kron(scaled, povm_r.basis.adjoint(), n);
        Matrix side = povm_s.projectors[si] * small_blocks[mi].projector;
        acc += apply_left(side, term, dims, b_pos);
      }
    }
  }
  out.op = acc;

  if (!ab_full || !b_full) {
    Matrix pb_n = Matrix::Identity(dim, dim);
    if (!b_full) {
      Matrix pb = p_b;
      pb_n = Matrix::Identity(dim, dim);
      for (int k = 0; k < n; ++k) pb_n = apply_left(pb, pb_n, dims, {2 * k + 1});
    }
    Matrix pab_n = Matrix::Identity(dim, dim);
    if (!ab_full) {
      std::vector<int> copy_dims(n, dab);
      for (int k = 0; k < n; ++k) pab_n = apply_left(p_ab, pab_n, copy_dims, {k});
    }
    out.op = pb_n * out.op * pab_n;
  }

  const bool commuting =
      inf_norm(gamma_ab.gamma * embed(gamma_b.gamma, {d_a, d_b}, {1}) -
               embed(gamma_b.gamma, {d_a, d_b}, {1}) * gamma_ab.gamma) <
      1e-10 * std::max(1.0, inf_norm(gamma_ab.gamma) * inf_norm(gamma_b.gamma));
  out.flavor = commuting ? SmootherFlavor::Projector : SmootherFlavor::Smoother;
  return out;
}

SmootherCertificates check_smoothing_operator(const SmoothingOperator& m,
                                              const std::vector<Matrix>& admissible_states) {
  SmootherCertificates cert;
  const int dim = static_cast<int>(m.op.rows());
  const int n = m.n;
  Matrix mtm = m.op.adjoint() * m.op;
  cert.norm = op_norm_hermitian(mtm);

  cert.min_overlap = 1.0;
  for (const auto& rho : admissible_states) {
    Matrix rho_n = kron_pow(rho, n);
    const double ov = std::real((m.op * rho_n).trace());
    cert.min_overlap = std::min(cert.min_overlap, ov);
  }

  // property (iii): tr_A[M Gamma^{(x) n} M^dag] <= c e^{-n(x - 4 delta)} Gamma_B'^{(x) n}
  std::vector<int> dims;
  std::vector<int> b_pos;
  for (int k = 0; k < n; ++k) {
    dims.push_back(m.d_a);
    dims.push_back(m.d_b);
    b_pos.push_back(2 * k + 1);
  }
  Matrix gh = sqrtm_psd(m.gamma_ab);
  std::vector<int> copy_dims(n, m.d_a * m.d_b);
  Matrix bmat = m.op;
  for (int k = 0; k < n; ++k) bmat = apply_right_adjoint(gh, bmat, copy_dims, {k});
  Matrix lhs = partial_trace(bmat * bmat.adjoint(), dims, b_pos);
  Matrix gb_n = kron_pow(m.gamma_b, n);
  cert.support_ok = support_contained(lhs, gb_n);
  Matrix gbi = inv_sqrt_support(m.gamma_b);
  Matrix white = lhs;
  for (int k = 0; k < n; ++k)
    white = apply_left(gbi, apply_right_adjoint(gbi, white, std::vector<int>(n, m.d_b), {k}),
                       std::vector<int>(n, m.d_b), {k});
  cert.c_measured = op_norm_hermitian(white) * std::exp(double(n) * (m.x - 4 * m.delta));

  cert.idempotency = inf_norm(m.op * m.op - m.op);
  Matrix gab_n = kron_pow(m.gamma_ab, n);
  cert.comm_gamma_ab = inf_norm(m.op * gab_n - gab_n * m.op);
  Matrix gb_lift = Matrix::Identity(dim, dim);
  for (int k = 0; k < n; ++k) gb_lift = apply_left(m.gamma_b, gb_lift, dims, {2 * k + 1});
  cert.comm_gamma_b = inf_norm(m.op * gb_lift - gb_lift * m.op);
  return cert;
}

Construction2Result construction2_map(const QuantumChannel& e, const GammaSpec& gamma_in,
                                      const GammaSpec& gamma_out, int n, double delta,
                                      std::uint64_t seed) {
  StinespringDilation dil = stinespring(e);
  const int dx = e.dim_in();
  const int dxp = e.dim_out();
  const int de = dil.dim_env;
  if (de * dxp > 4) throw std::invalid_argument("construction2_map: per-copy dilation too large");
  if (n > 5) throw std::invalid_argument("construction2_map: n above the size guard");

  CapacityOptions copts;
  copts.seed = seed;
  CapacityResult cap = thermodynamic_capacity(e, gamma_in, gamma_out, copts);

  // per-copy isometry into (E, X') ordering
  Matrix v_perm(de * dxp, dx);
  for (int o = 0; o < dxp; ++o)
    for (int k = 0; k < de; ++k) v_perm.row(k * dxp + o) = dil.isometry.row(o * de + k);

  Matrix g1 = v_perm * gamma_in.gamma * v_perm.adjoint();  // Gamma on (E, X')
  GammaSpec g_ab = GammaSpec::abstract(g1);
  SmoothingOperator m = universal_smoothing_operator(g_ab, gamma_out, -cap.value, delta, n,
                                                     de, dxp);

  Construction2Result out;
  out.n = n;
  out.capacity = cap.value;
  out.delta = delta;
  out.dim_env = de;

  Matrix v_n = kron_pow(v_perm, n);
  out.total_op = m.op * v_n;

  // Kraus of T: project the E^n legs onto the standard basis
  const int dim_en = static_cast<int>(std::llround(std::pow(double(de), n)));
  const int dim_xpn = static_cast<int>(std::llround(std::pow(double(dxp), n)));
  const int dim_xn = static_cast<int>(std::llround(std::pow(double(dx), n)));
  std::vector<int> dims;
  for (int k = 0; k < n; ++k) {
    dims.push_back(de);
    dims.push_back(dxp);
  }
  // index map from interleaved (e1 x1 e2 x2 ...) to (e-block, x-block)
  auto split_index = [&](int idx) {
    int eb = 0, xb = 0;
    std::vector<int> digs(2 * n);
    int v = idx;
    for (int k = 2 * n - 1; k >= 0; --k) {
      digs[k] = v % dims[k];
      v /= dims[k];
    }
    for (int k = 0; k < n; ++k) {
      eb = eb * de + digs[2 * k];
      xb = xb * dxp + digs[2 * k + 1];
    }
    return std::make_pair(eb, xb);
  };
  out.kraus.assign(dim_en, Matrix::Zero(dim_xpn, dim_xn));
  for (int row = 0; row < out.total_op.rows(); ++row) {
    auto [eb, xb] = split_index(row);
    for (int col = 0; col < dim_xn; ++col) out.kraus[eb](xb, col) += out.total_op(row, col);
  }

  Matrix wtw = out.total_op.adjoint() * out.total_op;
  EigResult ew = eig_hermitian(wtw);
  out.tni_excess = std::max(0.0, ew.values.maxCoeff() - 1.0);

  // Gamma-domination certificate
  Matrix gin_n = kron_pow(gamma_in.gamma, n);
  Matrix t_gamma = Matrix::Zero(dim_xpn, dim_xpn);
  for (const auto& kk : out.kraus) t_gamma += kk * gin_n * kk.adjoint();
  Matrix gout_i = inv_sqrt_support(gamma_out.gamma);
  Matrix white = t_gamma;
  std::vector<int> xp_dims(n, dxp);
  for (int k = 0; k < n; ++k)
    white = apply_left(gout_i, apply_right_adjoint(gout_i, white, xp_dims, {k}), xp_dims, {k});
  out.c_measured =
      op_norm_hermitian(white) * std::exp(-double(n) * (cap.value + 4 * delta));
  out.rate_certificate = cap.value + 4 * delta + std::log(std::max(out.c_measured, 1e-300)) / n;

  // worst-case i.i.d. overlap for the Prop-2.6-style bound
  Rng rng(seed + 1);
  out.worst_iid_gap = 0;
  for (int rep = 0; rep < 25; ++rep) {
    Vector psi = rng.pure_state(dx * dx);  // |sigma>_{XR} arbitrary pure
    Matrix sig_x = partial_trace(psi * psi.adjoint(), {dx, dx}, {0});
    Matrix rho_n = kron_pow(v_perm * sig_x * v_perm.adjoint(), n);
    const double ov = std::real((m.op * rho_n).trace());
    out.worst_iid_gap = std::max(out.worst_iid_gap, 1.0 - ov);
  }

  // de Finetti proxy
  if (static_cast<long long>(dim_xn) * dim_xn <= 4096) {
    auto df = schur::de_finetti_state(n, dx);
    const int dr = df.dim_r;
    std::vector<int> pur_dims = {dim_xn, dr};
    Matrix t_out = Matrix::Zero(dim_xpn * dr, dim_xpn * dr);
    for (const auto& kk : out.kraus) {
      Matrix big = kron(kk, Matrix::Identity(dr, dr));
      t_out += big * df.purification * big.adjoint();
    }
    QuantumChannel en = e.power(n);
    Matrix e_out = Matrix::Zero(dim_xpn * dr, dim_xpn * dr);
    for (const auto& kk : en.kraus()) {
      Matrix big = kron(kk, Matrix::Identity(dr, dr));
      e_out += big * df.purification * big.adjoint();
    }
    out.definetti_distance = trace_distance(t_out, e_out);
  }

  if (n <= 2) {
    Matrix j_t = Matrix::Zero(dim_xn * dim_xpn, dim_xn * dim_xpn);
    for (const auto& kk : out.kraus) {
      Vector vv(dim_xn * dim_xpn);
      for (int i = 0; i < dim_xn; ++i) vv.segment(i * dim_xpn, dim_xpn) = kk.col(i);
      j_t += vv * vv.adjoint();
    }
    out.diamond_exact =
        half_diamond_norm_choi(j_t - e.power(n).choi(), dim_xn, dim_xpn);
  }
  return out;
}

AepMapResult aep_protocol_map(const QuantumChannel& e, const Matrix& sigma,
                              const GammaSpec& gamma_in, const GammaSpec& gamma_out, int n,
                              double delta) {
  const int dx = e.dim_in();
  const int dxp = e.dim_out();
  ipow_guarded(dx * dx, n, 65536, "aep_protocol_map");

  Matrix rho_out = e.apply(sigma);
  AepMapResult out;
  EntropyResult din = relative_entropy(sigma, gamma_in.gamma);
  EntropyResult dout = relative_entropy(rho_out, gamma_out.gamma);
  out.exponent = din.value - dout.value;

  // the four typical projectors of the sandwich
  auto p_in = relative_typical_projector(sigma, gamma_in.gamma, n, delta);
  auto r_in = relative_typical_projector(sigma, sigma, n, delta);
  auto q_out = relative_typical_projector(rho_out, rho_out, n, delta);
  Matrix gout_inv = matrix_function(
      gamma_out.gamma, [](double v) { return v > 0 ? 1.0 / v : 0.0; }, true);
  auto s_out = relative_typical_projector(rho_out, gout_inv, n, delta);

  Matrix front = s_out.projector * q_out.projector;
  Matrix back = r_in.projector * p_in.projector;
  QuantumChannel en = e.power(n);
  for (const auto& kk : en.kraus()) out.kraus.push_back(front * kk * back);

  // certificate: T(Gamma^{(x) n}) <= e^{-n(exponent - 4 delta)} Gamma_out^{(x) n}
  Matrix gin_n = kron_pow(gamma_in.gamma, n);
  Matrix t_gamma = Matrix::Zero(gin_n.rows(), gin_n.cols());
  for (const auto& kk : out.kraus) t_gamma += kk * gin_n * kk.adjoint();
  Matrix gout_n = kron_pow(gamma_out.gamma, n);
  const double bound = std::exp(-double(n) * (out.exponent - 4 * delta));
  EigResult eg = eig_hermitian(bound * gout_n - t_gamma);
  out.gamma_bound_excess = std::max(0.0, -eg.values.minCoeff());
  Matrix gi = inv_sqrt_support(gamma_out.gamma);
  Matrix white = t_gamma;
  std::vector<int> xp_dims(n, dxp);
  for (int k = 0; k < n; ++k)
    white = apply_left(gi, apply_right_adjoint(gi, white, xp_dims, {k}), xp_dims, {k});
  out.gamma_slack = std::log(std::max(op_norm_hermitian(white), 1e-300)) +
                    double(n) * (out.exponent - 4 * delta);

  // closeness on the purified input
  const Matrix sig_half = sqrtm_psd(sigma);
  Vector phi = Vector::Zero(dx * dx);
  for (int k = 0; k < dx; ++k)
    for (int mm = 0; mm < dx; ++mm) phi(mm * dx + k) = sig_half(mm, k);
  Matrix psi_in = phi * phi.adjoint();  // |sigma><sigma| on X (x) R
  Matrix in_n = kron_pow(psi_in, n);
  // reorder (x1 r1 x2 r2 ...) so the map legs act jointly on X^n
  std::vector<int> dims, perm;
  for (int k = 0; k < n; ++k) {
    dims.push_back(dx);
    dims.push_back(dx);
  }
  for (int k = 0; k < n; ++k) perm.push_back(2 * k);      // X factors first
  for (int k = 0; k < n; ++k) perm.push_back(2 * k + 1);  // then R factors
  Matrix in_sorted = permute_factors(in_n, dims, perm);
  const int dim_xn = static_cast<int>(std::llround(std::pow(double(dx), n)));
  const int dim_rn = dim_xn;
  Matrix t_out = Matrix::Zero(static_cast<int>(std::llround(std::pow(double(dxp), n))) * dim_rn,
                              static_cast<int>(std::llround(std::pow(double(dxp), n))) * dim_rn);
  for (const auto& kk : out.kraus) {
    Matrix big = kron(kk, Matrix::Identity(dim_rn, dim_rn));
    t_out += big * in_sorted * big.adjoint();
  }
  // reference output rho^{(x) n} in the same leg ordering
  Matrix rho_xr = Matrix::Zero(dxp * dx, dxp * dx);
  {
    Matrix tmp = Matrix::Zero(dxp * dx, dxp * dx);
    for (const auto& kk : e.kraus()) {
      Matrix big = kron(kk, Matrix::Identity(dx, dx));
      tmp += big * psi_in * big.adjoint();
    }
    rho_xr = tmp;
  }
  Matrix ref_n = kron_pow(rho_xr, n);
  std::vector<int> dims2, perm2;
  for (int k = 0; k < n; ++k) {
    dims2.push_back(dxp);
    dims2.push_back(dx);
  }
  for (int k = 0; k < n; ++k) perm2.push_back(2 * k);
  for (int k = 0; k < n; ++k) perm2.push_back(2 * k + 1);
  Matrix ref_sorted = permute_factors(ref_n, dims2, perm2);
  out.closeness = purified_distance(t_out, ref_sorted);

  const double eta = std::min(std::min(p_in.eta, r_in.eta), std::min(q_out.eta, s_out.eta));
  out.eta_prime = eta / 4;
  out.closeness_bound_ok = out.closeness <= 4 * std::exp(-double(n) * out.eta_prime) + 1e-9;
  return out;
}

}  // namespace thermocap::typicality
