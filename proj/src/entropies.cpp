#include "thermocap/entropies.hpp"

#include "thermocap/sdp.hpp"

#include <algorithm>
#include <cmath>

namespace thermocap {

double von_neumann(const Matrix& rho) {
  EigResult e = eig_hermitian(rho);
  double h = 0;
  for (int i = 0; i < e.values.size(); ++i) {
    const double p = e.values(i);
    if (p > kSupportRelTol) h -= p * std::log(p);
  }
  return h;
}

double conditional_entropy(const Matrix& rho_ab, const std::vector<int>& dims) {
  if (dims.size() != 2) throw std::invalid_argument("conditional_entropy: two factors expected");
  if (rho_ab.rows() != dims[0] * dims[1])
    throw std::invalid_argument("conditional_entropy: dims mismatch");
  Matrix rho_b = partial_trace(rho_ab, dims, {1});
  return von_neumann(rho_ab) - von_neumann(rho_b);
}

EntropyResult relative_entropy(const Matrix& rho, const Matrix& gamma) {
  if (!support_contained(rho, gamma)) return EntropyResult::infinity();
  const Matrix ln_rho = log_support(rho);
  const Matrix ln_gamma = log_support(gamma);
  EntropyResult r;
  r.value = std::real((rho * (ln_rho - ln_gamma)).trace());
  return r;
}

EntropyResult measured_relative(const Matrix& rho, const Matrix& tau) {
  if (!support_contained(rho, tau)) return EntropyResult::infinity();
  EntropyResult r;
  r.value = -std::real((rho * log_support(tau)).trace());
  return r;
}

namespace {

HypTestResult hyptest_neyman_pearson(const Matrix& rho, const Matrix& sigma, double eta) {
  // Optimal tests have the form Q(mu) = proj{mu rho - sigma > 0} + c P_=,
  // with tr[Q rho] increasing in mu.  Bisect on mu, then put a uniform
  // fractional weight on the boundary eigenspace.
  const int d = static_cast<int>(rho.rows());
  const double scale = std::max(1.0, inf_norm(sigma));

  auto weight_above = [&](double mu, double boundary_tol) {
    EigResult e = eig_hermitian(mu * rho - sigma);
    Matrix p_pos = Matrix::Zero(d, d), p_bnd = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      if (e.values(i) > boundary_tol)
        p_pos += e.vectors.col(i) * e.vectors.col(i).adjoint();
      else if (e.values(i) > -boundary_tol)
        p_bnd += e.vectors.col(i) * e.vectors.col(i).adjoint();
    }
    return std::make_pair(p_pos, p_bnd);
  };

  double lo = 0.0, hi = 1.0;
  auto rho_weight = [&](double mu) {
    auto [p_pos, p_bnd] = weight_above(mu, 1e-12 * scale * std::max(1.0, mu));
    return std::real(((p_pos + p_bnd) * rho).trace());
  };
  while (rho_weight(hi) < eta && hi < 1e18) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rho_weight(mid) >= eta)
      hi = mid;
    else
      lo = mid;
  }
  const double mu = hi;

  const double btol = std::max(1e-11 * scale * std::max(1.0, mu), (hi - lo) * inf_norm(rho) * 4);
  auto [p_pos, p_bnd] = weight_above(mu, btol);
  const double w_pos = std::real((p_pos * rho).trace());
  const double w_bnd = std::real((p_bnd * rho).trace());
  double c = 0;
  if (w_pos < eta) c = w_bnd > 0 ? std::min(1.0, (eta - w_pos) / w_bnd) : 0.0;
  Matrix q = p_pos + c * p_bnd;

  HypTestResult res;
  res.optimal_q = q;
  const double t_sigma = std::real((q * sigma).trace());
  res.mu = mu;
  EigResult ex = eig_hermitian(mu * rho - sigma);
  Matrix xplus = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    if (ex.values(i) > 0) xplus += ex.values(i) * ex.vectors.col(i) * ex.vectors.col(i).adjoint();
  res.dual_x = xplus;
  if (t_sigma <= 1e-14 * scale) {
    res.infinite = true;
    res.d_h = std::numeric_limits<double>::infinity();
    res.d_h_ln = res.d_h;
    return res;
  }
  res.d_h = -std::log(t_sigma / eta);
  res.d_h_ln = res.d_h - std::log(eta);
  return res;
}

HypTestResult hyptest_sdp(const Matrix& rho, const Matrix& sigma, double eta) {
  const int d = static_cast<int>(rho.rows());
  sdp::Problem p;
  const int bQ = p.add_block(d);
  const int bS = p.add_block(d);   // I - Q
  const int bT = p.add_block(1);   // tr[Q rho] - eta
  p.set_objective(bQ, sigma);

  p.add_matrix_equality(d, Matrix::Identity(d, d),
                        {{bQ, [](const Matrix& e) { return e; }},
                         {bS, [](const Matrix& e) { return e; }}});
  Matrix neg1(1, 1);
  neg1(0, 0) = -1;
  p.add_constraint({{bQ, rho}, {bT, neg1}}, eta);

  sdp::Options opts;
  opts.tol = 1e-10;
  sdp::Solution s = sdp::solve(p, opts);
  if (s.status != sdp::Status::Optimal)
    throw std::runtime_error("hypothesis_testing: SDP failed: " + s.message);

  HypTestResult res;
  res.optimal_q = s.x[bQ];
  // dual: y over the matrix equality assembles Y (<= 0), scalar y0 = mu
  const auto basis = sdp::hermitian_basis(d);
  Matrix yop = Matrix::Zero(d, d);
  for (size_t k = 0; k < basis.size(); ++k) yop += s.y(static_cast<int>(k)) * basis[k];
  res.mu = s.y(static_cast<int>(basis.size()));
  res.dual_x = -yop;
  const double t_sigma = s.primal_value;
  if (t_sigma <= 1e-13 * std::max(1.0, inf_norm(sigma))) {
    res.infinite = true;
    res.d_h = std::numeric_limits<double>::infinity();
    res.d_h_ln = res.d_h;
    return res;
  }
  res.d_h = -std::log(t_sigma / eta);
  res.d_h_ln = res.d_h - std::log(eta);
  return res;
}

}  // namespace

HypTestResult hypothesis_testing(const Matrix& rho, const Matrix& sigma, double eta,
                                 HypTestMethod method) {
  if (rho.rows() != sigma.rows()) throw std::invalid_argument("hypothesis_testing: dims mismatch");
  const double tr_rho = std::real(rho.trace());
  if (eta <= 0 || eta > tr_rho + 1e-10)
    throw std::invalid_argument("hypothesis_testing: eta must lie in (0, tr rho]");
  switch (method) {
    case HypTestMethod::NeymanPearson: return hyptest_neyman_pearson(rho, sigma, eta);
    case HypTestMethod::Sdp: return hyptest_sdp(rho, sigma, eta);
  }
  throw std::logic_error("hypothesis_testing: unknown method");
}

}  // namespace thermocap
