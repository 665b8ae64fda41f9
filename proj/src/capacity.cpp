#include "thermocap/capacity.hpp"

#include "thermocap/entropies.hpp"
#include "thermocap/random.hpp"
#include "thermocap/sdp.hpp"

#include <cmath>

namespace thermocap {

namespace {

constexpr double kMixing = 1e-12;  // interior regularization per step

Matrix project_to_support(const Matrix& sigma, const Matrix& p) {
  Matrix s = p * sigma * p;
  const double tr = std::real(s.trace());
  if (tr <= 0) return p / std::real(p.trace());
  return s / tr;
}

Matrix mix_interior(const Matrix& sigma, const Matrix& p) {
  const double dsupp = std::real(p.trace());
  Matrix s = (1 - kMixing) * sigma + kMixing * p / dsupp;
  return 0.5 * (s + s.adjoint());
}

}  // namespace

double capacity_objective(const QuantumChannel& e, const GammaSpec& gin,
                          const GammaSpec& gout, const Matrix& sigma) {
  EntropyResult out = relative_entropy(e.apply(sigma), gout.gamma);
  EntropyResult in = relative_entropy(sigma, gin.gamma);
  if (out.infinite() || in.infinite()) return -std::numeric_limits<double>::infinity();
  return out.value - in.value;
}

Matrix capacity_gradient(const QuantumChannel& e, const GammaSpec& gin,
                         const GammaSpec& gout, const Matrix& sigma) {
  const Matrix ln_out = log_support(e.apply(sigma)) - log_support(gout.gamma);
  const Matrix ln_in = log_support(sigma) - log_support(gin.gamma);
  return e.apply_adjoint(ln_out) - ln_in;
}

CapacityResult thermodynamic_capacity(const QuantumChannel& e, const GammaSpec& gamma_in,
                                      const GammaSpec& gamma_out,
                                      const CapacityOptions& opts) {
  const int d = e.dim_in();
  if (gamma_in.dim() != d || gamma_out.dim() != e.dim_out())
    throw std::invalid_argument("thermodynamic_capacity: Gamma dims mismatch");
  const Matrix p_in = support_projector(gamma_in.gamma);

  Rng rng(opts.seed);
  std::vector<Matrix> starts;
  if (opts.warm_start) starts.push_back(*opts.warm_start);
  starts.push_back(Matrix::Identity(d, d) / d);
  for (int r = 0; r < opts.restarts; ++r) starts.push_back(rng.density_matrix(d));

  CapacityResult best;
  best.value = -std::numeric_limits<double>::infinity();

  for (Matrix sigma : starts) {
    sigma = mix_interior(project_to_support(sigma, p_in), p_in);
    double f = capacity_objective(e, gamma_in, gamma_out, sigma);
    if (std::isinf(f)) continue;
    double step = 1.0;
    int it = 0;
    double resid = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (; it < opts.max_iterations; ++it) {
      Matrix grad = capacity_gradient(e, gamma_in, gamma_out, sigma);
      const double mu = std::real((sigma * grad).trace());
      resid = inf_norm(p_in * (grad - mu * Matrix::Identity(d, d)) * p_in);
      if (resid <= opts.grad_tol) {
        converged = true;
        break;
      }

      // fixed-point accelerator with ascent-check fallback
      Matrix cand = matrix_function(
          log_support(gamma_in.gamma) +
              e.apply_adjoint(log_support(e.apply(sigma)) - log_support(gamma_out.gamma)),
          [](double x) { return std::exp(x); });
      cand = project_to_support(cand / cand.trace(), p_in);
      cand = mix_interior(cand, p_in);
      const double f_cand = capacity_objective(e, gamma_in, gamma_out, cand);
      if (f_cand >= f + 1e-15) {
        sigma = cand;
        f = f_cand;
        continue;
      }

      // entropic mirror ascent with Armijo backtracking
      const Matrix ln_sigma = log_support(sigma);
      bool accepted = false;
      double t = std::min(4.0, step * 2);
      for (int bt = 0; bt < 50; ++bt) {
        Matrix trial = matrix_function(ln_sigma + t * grad, [](double x) { return std::exp(x); });
        trial = project_to_support(trial / trial.trace(), p_in);
        trial = mix_interior(trial, p_in);
        const double f_trial = capacity_objective(e, gamma_in, gamma_out, trial);
        if (f_trial > f) {
          sigma = trial;
          f = f_trial;
          step = t;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;  // no ascent left at representable step sizes
    }

    if (f > best.value) {
      best.value = f;
      best.maximizer = sigma;
      best.stationarity_residual = resid;
      best.iterations = it;
      best.converged = converged;
    }
  }
  return best;
}

AdditivityReport additivity_check(const QuantumChannel& e, const QuantumChannel& f,
                                  const GammaSpec& gin_e, const GammaSpec& gout_e,
                                  const GammaSpec& gin_f, const GammaSpec& gout_f,
                                  const CapacityOptions& opts) {
  if (e.dim_in() * f.dim_in() > 16)
    throw std::invalid_argument("additivity_check: joint dimension above desk scale");
  CapacityResult re = thermodynamic_capacity(e, gin_e, gout_e, opts);
  CapacityResult rf = thermodynamic_capacity(f, gin_f, gout_f, opts);
  CapacityOptions joint_opts = opts;
  joint_opts.warm_start = kron(re.maximizer, rf.maximizer);
  GammaSpec gin_j = GammaSpec::abstract(kron(gin_e.gamma, gin_f.gamma));
  GammaSpec gout_j = GammaSpec::abstract(kron(gout_e.gamma, gout_f.gamma));
  CapacityResult rj = thermodynamic_capacity(e.tensor(f), gin_j, gout_j, joint_opts);
  AdditivityReport rep;
  rep.joint = rj.value;
  rep.split = re.value + rf.value;
  rep.gap = std::abs(rep.joint - rep.split);
  return rep;
}

double entropy_gain(const QuantumChannel& e, const CapacityOptions& opts) {
  GammaSpec gi = GammaSpec::trivial(e.dim_in());
  GammaSpec go = GammaSpec::trivial(e.dim_out());
  return -thermodynamic_capacity(e, gi, go, opts).value;
}

namespace {

// Output of the map with Choi j on the canonical purification of sigma,
// arranged on out (x) R with R ~= in:
//   tau(J) = (I (x) conj(s)) swap(J) (I (x) conj(s))^dagger,  s = sigma^{1/2}.
Matrix choi_on_purification(const Matrix& j, const Matrix& sigma_half, int din, int dout) {
  Matrix swapped = permute_factors(j, {din, dout}, {1, 0});
  Matrix a = kron(Matrix::Identity(dout, dout), sigma_half.conjugate());
  return a * swapped * a.adjoint();
}

Matrix choi_on_purification_adjoint(const Matrix& e, const Matrix& sigma_half, int din,
                                    int dout) {
  Matrix a = kron(Matrix::Identity(dout, dout), sigma_half.conjugate());
  Matrix inner = a.adjoint() * e * a;
  return permute_factors(inner, {dout, din}, {1, 0});
}

Matrix choi_apply(const Matrix& j, const Matrix& rho, int din, int dout) {
  // T(rho) = tr_ref[(rho^T (x) I) J]
  return partial_trace(kron(rho.transpose(), Matrix::Identity(dout, dout)) * j,
                       {din, dout}, {1});
}

}  // namespace

CohRelResult coherent_relative_entropy(const QuantumChannel& e, const Matrix& sigma_x,
                                       const GammaSpec& gamma_in, const GammaSpec& gamma_out,
                                       double eps, double tol) {
  const int din = e.dim_in();
  const int dout = e.dim_out();
  if (din > 8 || dout > 8)
    throw std::invalid_argument("coherent_relative_entropy: legs above the SDP size guard");
  if (eps < 0 || eps >= 1)
    throw std::invalid_argument("coherent_relative_entropy: eps must lie in [0, 1)");
  const int dj = din * dout;
  const int dp = dout * din;  // purified output space out (x) R

  const Matrix sigma_half = sqrtm_psd(sigma_x);
  const Matrix rho_e = choi_on_purification(e.choi(), sigma_half, din, dout);
  const Matrix gamma_t = gamma_in.gamma.transpose();
  const Matrix gi_out = inv_sqrt_support(gamma_out.gamma);
  const Matrix p_out = support_projector(gamma_out.gamma);
  const Matrix pbar_out = Matrix::Identity(dout, dout) - p_out;
  const bool gout_full_rank = inf_norm(pbar_out) < 0.5;

  // alpha is optimized in units of its a-priori bound exp(margin(E)), which
  // keeps the program well conditioned for strongly separated Gamma spectra
  double margin0 = gibbs_sub_preservation_margin(e, gamma_in, gamma_out);
  const double alpha_scale = std::isfinite(margin0) ? std::exp(margin0) : 1.0;

  sdp::Problem p;
  const int bJ = p.add_block(dj);
  const int bTni = p.add_block(din);
  const int bGam = p.add_block(dout);
  const int bAlpha = p.add_block(1);
  p.set_objective(bAlpha, Matrix::Identity(1, 1));

  // trace non-increasing: tr_out J + S = I
  p.add_matrix_equality(
      din, Matrix::Identity(din, din),
      {{bJ, [dout](const Matrix& ee) { return kron(ee, Matrix::Identity(dout, dout)); }},
       {bTni, [](const Matrix& ee) { return ee; }}});

  // whitened Gamma domination: Gi T(Gamma) Gi + S' = alpha P_out
  p.add_matrix_equality(dout, Matrix::Zero(dout, dout),
                        {{bJ,
                          [&](const Matrix& ee) { return kron(gamma_t, gi_out * ee * gi_out); }},
                         {bGam, [](const Matrix& ee) { return ee; }},
                         {bAlpha, [&](const Matrix& ee) {
                            Matrix m(1, 1);
                            m(0, 0) = -alpha_scale * std::real((ee * p_out).trace());
                            return m;
                          }}});
  if (!gout_full_rank) {
    // off-support part of T(Gamma) must vanish
    p.add_matrix_equality(dout, Matrix::Zero(dout, dout),
                          {{bJ, [&](const Matrix& ee) {
                              return kron(gamma_t, pbar_out * ee * pbar_out);
                            }}});
  }

  if (eps == 0) {
    // purified distance zero pins the output state exactly
    p.add_matrix_equality(dp, rho_e,
                          {{bJ, [&](const Matrix& ee) {
                              return choi_on_purification_adjoint(ee, sigma_half, din, dout);
                            }}});
  } else {
    const double fidelity_floor = std::sqrt(1 - eps * eps);
    // face-reduced fidelity block: restrict the fixed corner to the support
    // of rho_e so the block has a strictly feasible interior
    EigResult er = eig_hermitian(rho_e);
    const double rcut = kSupportRelTol * std::max(1.0, er.values.maxCoeff());
    int rr = 0;
    while (rr < er.values.size() && er.values(rr) > rcut) ++rr;
    Matrix u_r = er.vectors.leftCols(rr);
    Matrix d_r = Matrix::Zero(rr, rr);
    for (int k = 0; k < rr; ++k) d_r(k, k) = er.values(k);

    const int db = dp + rr;
    const int bB = p.add_block(db);
    const int bSf = p.add_block(1);
    // B11 = tau(J)
    p.add_matrix_equality(dp, Matrix::Zero(dp, dp),
                          {{bJ,
                            [&](const Matrix& ee) {
                              return choi_on_purification_adjoint(ee, sigma_half, din, dout);
                            }},
                           {bB, [dp, db](const Matrix& ee) {
                              Matrix m = Matrix::Zero(db, db);
                              m.topLeftCorner(dp, dp) = -ee;
                              return m;
                            }}});
    // B22 = rho_e restricted to its support (full rank there)
    p.add_matrix_equality(rr, d_r, {{bB, [dp, db, rr](const Matrix& ee) {
                                       Matrix m = Matrix::Zero(db, db);
                                       m.bottomRightCorner(rr, rr) = ee;
                                       return m;
                                     }}});
    // Re tr[U_r^dag B12] - s = sqrt(1 - eps^2)
    Matrix a_fid = Matrix::Zero(db, db);
    a_fid.topRightCorner(dp, rr) = 0.5 * u_r;
    a_fid.bottomLeftCorner(rr, dp) = 0.5 * u_r.adjoint();
    Matrix neg1(1, 1);
    neg1(0, 0) = -1;
    p.add_constraint({{bB, a_fid}, {bSf, neg1}}, fidelity_floor);
  }

  sdp::Options opts;
  opts.tol = tol;
  opts.max_iterations = 400;  // ill-conditioned Gamma spectra converge slowly
  sdp::Solution s = sdp::solve(p, opts);
  if (s.status == sdp::Status::Infeasible)
    throw std::runtime_error("coherent_relative_entropy: SDP infeasible: " + s.message);
  // near-stalls with a certified small duality gap are accepted at the
  // bound midpoint
  double alpha_hat = s.primal_value;
  if (s.status == sdp::Status::MaxIterations) {
    if (s.gap > 5e-6 * (1 + std::abs(s.primal_value)))
      throw std::runtime_error("coherent_relative_entropy: SDP did not converge (gap " +
                               std::to_string(s.gap) + ", " + s.message + ")");
    alpha_hat = 0.5 * (s.primal_value + s.dual_value);
  }

  CohRelResult res;
  const double alpha = std::max(alpha_scale * alpha_hat, 1e-300);
  // the returned map satisfies the constraints at the primal alpha; the
  // value is the duality-certified midpoint
  const double alpha_feas = std::max(alpha_scale * s.primal_value, 1e-300);
  res.value = -std::log(alpha);
  res.optimal_choi = s.x[bJ];
  res.epsilon = eps;
  res.sdp_iterations = s.iterations;
  res.sdp_gap = s.gap;

  // re-verify the returned map's constraints outside the solver
  double resid = 0;
  EigResult ej = eig_hermitian(res.optimal_choi);
  resid = std::max(resid, std::max(0.0, -ej.values.minCoeff()));
  Matrix tni = partial_trace(res.optimal_choi, {din, dout}, {0});
  EigResult etni = eig_hermitian(Matrix::Identity(din, din) - tni);
  resid = std::max(resid, std::max(0.0, -etni.values.minCoeff()));
  Matrix t_gamma = choi_apply(res.optimal_choi, gamma_in.gamma, din, dout);
  EigResult eg = eig_hermitian(alpha_feas * gamma_out.gamma - t_gamma);
  resid = std::max(resid, std::max(0.0, -eg.values.minCoeff()) /
                              std::max(1.0, alpha_feas * inf_norm(gamma_out.gamma)));
  Matrix tau = choi_on_purification(res.optimal_choi, sigma_half, din, dout);
  res.fidelity_achieved = generalized_fidelity(tau, rho_e);
  if (eps == 0) {
    // the eps = 0 program pins the output state; report the linear
    // equality residual (the purified distance scales as its square root)
    resid = std::max(resid, inf_norm(tau - rho_e));
  } else {
    // fidelity shortfall below sqrt(1 - eps^2); this is the constraint the
    // program enforces, and it avoids the square-root amplification the
    // purified distance suffers right at the boundary
    resid = std::max(resid, std::max(0.0, std::sqrt(1 - eps * eps) - res.fidelity_achieved));
  }
  res.max_constraint_residual = resid;
  return res;
}

double universal_work_cost(const QuantumChannel& e, const GammaSpec& gamma_in,
                           const GammaSpec& gamma_out, double eps, double tol) {
  if (eps >= 1) return -std::numeric_limits<double>::infinity();
  if (eps < 0) throw std::invalid_argument("universal_work_cost: eps must be >= 0");
  if (eps == 0) return gibbs_sub_preservation_margin(e, gamma_in, gamma_out);
  const int din = e.dim_in();
  const int dout = e.dim_out();
  const int dj = din * dout;
  if (dj > 128) throw std::invalid_argument("universal_work_cost: SDP size guard exceeded");

  const Matrix j_e = e.choi();
  const Matrix gamma_t = gamma_in.gamma.transpose();
  const Matrix gi_out = inv_sqrt_support(gamma_out.gamma);
  const Matrix p_out = support_projector(gamma_out.gamma);
  const double margin0 = gibbs_sub_preservation_margin(e, gamma_in, gamma_out);
  const double alpha_scale = std::isfinite(margin0) ? std::exp(margin0) : 1.0;

  sdp::Problem p;
  const int bJ = p.add_block(dj);
  const int bTni = p.add_block(din);
  const int bGam = p.add_block(dout);
  const int bAlpha = p.add_block(1);
  const int bA = p.add_block(dj);  // Y - (J - J_E) >= 0
  const int bB = p.add_block(dj);  // Y + (J - J_E) >= 0
  const int bDia = p.add_block(din);
  p.set_objective(bAlpha, Matrix::Identity(1, 1));

  auto lift_out = [dout](const Matrix& ee) {
    return kron(ee, Matrix::Identity(dout, dout));
  };

  p.add_matrix_equality(din, Matrix::Identity(din, din),
                        {{bJ, lift_out}, {bTni, [](const Matrix& ee) { return ee; }}});

  p.add_matrix_equality(dout, Matrix::Zero(dout, dout),
                        {{bJ,
                          [&](const Matrix& ee) { return kron(gamma_t, gi_out * ee * gi_out); }},
                         {bGam, [](const Matrix& ee) { return ee; }},
                         {bAlpha, [&](const Matrix& ee) {
                            Matrix m(1, 1);
                            m(0, 0) = -alpha_scale * std::real((ee * p_out).trace());
                            return m;
                          }}});

  // B - A - 2 J = -2 J_E
  p.add_matrix_equality(dj, -2.0 * j_e,
                        {{bB, [](const Matrix& ee) { return ee; }},
                         {bA, [](const Matrix& ee) { return -ee; }},
                         {bJ, [](const Matrix& ee) { return -2.0 * ee; }}});

  // tr_out[A + J - J_E] + S = 2 eps I   (so  tr_out Y <= 2 eps I)
  p.add_matrix_equality(
      din, 2 * eps * Matrix::Identity(din, din) + partial_trace(j_e, {din, dout}, {0}),
      {{bA, lift_out}, {bJ, lift_out}, {bDia, [](const Matrix& ee) { return ee; }}});

  sdp::Options opts;
  opts.tol = tol;
  opts.max_iterations = 400;
  sdp::Solution s = sdp::solve(p, opts);
  if (s.status != sdp::Status::Optimal) {
    if (s.status == sdp::Status::MaxIterations &&
        s.gap <= 5e-6 * (1 + std::abs(s.primal_value)))
      return std::log(
          std::max(alpha_scale * 0.5 * (s.primal_value + s.dual_value), 1e-300));
    throw std::runtime_error("universal_work_cost: SDP failed: " + s.message);
  }
  return std::log(std::max(alpha_scale * s.primal_value, 1e-300));
}

AepScan aep_scan(const QuantumChannel& e, const Matrix& sigma, const GammaSpec& gin,
                 const GammaSpec& gout, double eps, int n_max) {
  AepScan scan;
  EntropyResult lin = relative_entropy(sigma, gin.gamma);
  EntropyResult lout = relative_entropy(e.apply(sigma), gout.gamma);
  scan.limit = lin.value - lout.value;
  QuantumChannel en = e;
  Matrix sn = sigma;
  Matrix gi = gin.gamma, go = gout.gamma;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      en = en.tensor(e);
      sn = kron(sn, sigma);
      gi = kron(gi, gin.gamma);
      go = kron(go, gout.gamma);
    }
    CohRelResult r = coherent_relative_entropy(en, sn, GammaSpec::abstract(gi),
                                               GammaSpec::abstract(go), eps);
    scan.points.push_back({n, r.value / n});
  }
  return scan;
}

}  // namespace thermocap
