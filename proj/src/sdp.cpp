#include "thermocap/sdp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace thermocap::sdp {

int Problem::add_block(int dim) {
  block_dims.push_back(dim);
  objective.push_back(Matrix::Zero(dim, dim));
  return static_cast<int>(block_dims.size()) - 1;
}

void Problem::set_objective(int block, const Matrix& c) {
  objective.at(block) = 0.5 * (c + c.adjoint());
}

void Problem::add_constraint(std::vector<std::pair<int, Matrix>> terms, double rhs) {
  for (auto& [b, a] : terms) a = 0.5 * (a + a.adjoint()).eval();
  constraints.push_back({std::move(terms), rhs});
}

std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> basis;
  basis.reserve(d * d);
  for (int p = 0; p < d; ++p)
    for (int q = p; q < d; ++q) {
      Matrix e = Matrix::Zero(d, d);
      if (p == q) {
        e(p, p) = 1;
        basis.push_back(e);
      } else {
        e(p, q) = 1;
        e(q, p) = 1;
        basis.push_back(e);
        Matrix f = Matrix::Zero(d, d);
        f(p, q) = Complex(0, 1);
        f(q, p) = Complex(0, -1);
        basis.push_back(f);
      }
    }
  return basis;
}

void Problem::add_matrix_equality(
    int d, const Matrix& rhs,
    const std::vector<std::pair<int, std::function<Matrix(const Matrix&)>>>& adjoint_terms) {
  for (const Matrix& e : hermitian_basis(d)) {
    std::vector<std::pair<int, Matrix>> terms;
    for (const auto& [block, adj] : adjoint_terms) terms.emplace_back(block, adj(e));
    add_constraint(std::move(terms), std::real((e * rhs).trace()));
  }
}

namespace {

struct Blocks {
  std::vector<Matrix> m;
  Blocks() = default;
  explicit Blocks(const std::vector<int>& dims) {
    for (int d : dims) m.push_back(Matrix::Zero(d, d));
  }
};

double inner(const Matrix& a, const Matrix& b) { return std::real((a.adjoint() * b).trace()); }

// Largest alpha in (0, 1] with X + alpha dX >= 0 (X > 0), damped by 0.98.
double psd_step(const Matrix& x, const Matrix& dx) {
  Eigen::LLT<Matrix> llt(x);
  if (llt.info() != Eigen::Success) return 1e-3;
  Matrix l = llt.matrixL();
  Matrix s = l.triangularView<Eigen::Lower>().solve(dx);
  s = l.triangularView<Eigen::Lower>().solve(s.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.adjoint()));
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0) return 1.0;
  return std::min(1.0, 0.98 / (-lmin));
}

Matrix nt_scaling(const Matrix& x, const Matrix& z) {
  // W = Z^{-1/2} (Z^{1/2} X Z^{1/2})^{1/2} Z^{-1/2}, satisfying W Z W = X.
  EigResult ez = eig_hermitian(z);
  const double zmax = std::max(ez.values.maxCoeff(), 1e-30);
  RealVector sq(ez.values.size()), isq(ez.values.size());
  for (int i = 0; i < ez.values.size(); ++i) {
    const double v = std::max(ez.values(i), 1e-16 * zmax);
    sq(i) = std::sqrt(v);
    isq(i) = 1.0 / sq(i);
  }
  Matrix zh = ez.vectors * sq.asDiagonal() * ez.vectors.adjoint();
  Matrix zih = ez.vectors * isq.asDiagonal() * ez.vectors.adjoint();
  Matrix mid = sqrtm_psd(zh * x * zh);
  Matrix w = zih * mid * zih;
  return 0.5 * (w + w.adjoint());
}

}  // namespace

Solution solve(const Problem& p_in, const Options& opts) {
  // normalize each constraint to unit data scale; duals are mapped back
  Problem p = p_in;
  std::vector<double> row_scale(p.constraints.size(), 1.0);
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    double s = std::abs(p.constraints[i].rhs);
    for (const auto& [b, a] : p.constraints[i].terms) s = std::max(s, inf_norm(a));
    if (s > 0) {
      row_scale[i] = s;
      p.constraints[i].rhs /= s;
      for (auto& [b, a] : p.constraints[i].terms) a /= s;
    }
  }

  bool trace = opts.trace || std::getenv("THERMOCAP_SDP_TRACE") != nullptr;

  const int nb = static_cast<int>(p.block_dims.size());
  const int m = p.total_constraints();
  int ntot = 0;
  for (int d : p.block_dims) ntot += d;

  Solution sol;
  sol.y = Eigen::VectorXd::Zero(m);

  double scale = opts.initial_scale;
  if (scale <= 0) {
    double cmax = 1.0;
    for (const auto& c : p.objective) cmax = std::max(cmax, inf_norm(c));
    for (const auto& con : p.constraints) {
      cmax = std::max(cmax, std::abs(con.rhs));
      for (const auto& [b, a] : con.terms) cmax = std::max(cmax, inf_norm(a));
    }
    scale = std::sqrt(cmax) + 1.0;
  }

  Blocks x(p.block_dims), z(p.block_dims);
  for (int b = 0; b < nb; ++b) {
    x.m[b] = scale * Matrix::Identity(p.block_dims[b], p.block_dims[b]);
    z.m[b] = scale * Matrix::Identity(p.block_dims[b], p.block_dims[b]);
  }

  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) rhs(i) = p.constraints[i].rhs;
  double best_gap_rel = std::numeric_limits<double>::infinity();
  int last_progress = 0;
  const double rhs_scale = 1.0 + rhs.cwiseAbs().maxCoeff();
  double obj_scale = 1.0;
  for (const auto& c : p.objective) obj_scale = std::max(obj_scale, inf_norm(c));

  auto apply_a = [&](const Blocks& v) {
    Eigen::VectorXd out(m);
    for (int i = 0; i < m; ++i) {
      double s = 0;
      for (const auto& [b, a] : p.constraints[i].terms) s += inner(a, v.m[b]);
      out(i) = s;
    }
    return out;
  };
  auto apply_at = [&](const Eigen::VectorXd& y) {
    Blocks out(p.block_dims);
    for (int i = 0; i < m; ++i)
      for (const auto& [b, a] : p.constraints[i].terms) out.m[b] += y(i) * a;
    return out;
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    sol.iterations = iter + 1;

    double mu = 0;
    for (int b = 0; b < nb; ++b) mu += std::real((x.m[b] * z.m[b]).trace());
    mu /= std::max(1, ntot);

    Eigen::VectorXd rp = rhs - apply_a(x);
    Blocks aty = apply_at(sol.y);
    Blocks rd(p.block_dims);
    double rd_norm = 0;
    for (int b = 0; b < nb; ++b) {
      rd.m[b] = p.objective[b] - z.m[b] - aty.m[b];
      rd_norm = std::max(rd_norm, inf_norm(rd.m[b]));
    }
    const double rp_norm = m ? rp.cwiseAbs().maxCoeff() : 0.0;

    double pval = 0;
    for (int b = 0; b < nb; ++b) pval += inner(p.objective[b], x.m[b]);
    const double dval = rhs.dot(sol.y);
    sol.primal_value = pval;
    sol.dual_value = dval;
    sol.gap = std::abs(pval - dval);

    const double gap_rel = sol.gap / (1.0 + std::abs(pval) + std::abs(dval));
    if (gap_rel <= opts.tol && mu <= opts.tol * (1 + obj_scale) &&
        rp_norm <= opts.tol * rhs_scale && rd_norm <= opts.tol * (1 + obj_scale)) {
      sol.status = Status::Optimal;
      break;
    }
    if (gap_rel < 0.9 * best_gap_rel) {
      best_gap_rel = gap_rel;
      last_progress = iter;
    }
    if (iter - last_progress > 30 && rp_norm <= 1e-6 * rhs_scale &&
        rd_norm <= 1e-6 * (1 + obj_scale)) {
      sol.message = "progress stalled near the optimum";
      break;
    }

    // Rough divergence test doubling as an infeasibility detector: a dual
    // improving ray certifies primal infeasibility, a primal ray certifies
    // dual infeasibility.
    double xnorm = 0;
    for (int b = 0; b < nb; ++b) xnorm = std::max(xnorm, inf_norm(x.m[b]));
    const double ynorm = m ? sol.y.cwiseAbs().maxCoeff() : 0.0;
    if (ynorm > 1e9 * scale || xnorm > 1e9 * scale) {
      if (ynorm > 0) {
        Eigen::VectorXd yhat = sol.y / ynorm;
        Blocks athat = apply_at(yhat);
        double lmax = 0;
        for (int b = 0; b < nb; ++b) {
          EigResult e = eig_hermitian(athat.m[b]);
          if (e.values.size()) lmax = std::max(lmax, e.values.maxCoeff());
        }
        if (rhs.dot(yhat) > 1e-6 && lmax < 1e-6) {
          sol.status = Status::Infeasible;
          sol.message = "primal infeasible (dual improving ray)";
          return sol;
        }
      }
      if (xnorm > 0) {
        double ray_obj = 0, ray_feas = 0;
        for (int b = 0; b < nb; ++b) ray_obj += inner(p.objective[b], x.m[b]) / xnorm;
        Eigen::VectorXd ax = apply_a(x) / xnorm;
        ray_feas = m ? ax.cwiseAbs().maxCoeff() : 0.0;
        if (ray_obj < -1e-6 && ray_feas < 1e-6) {
          sol.status = Status::Infeasible;
          sol.message = "dual infeasible (primal improving ray)";
          return sol;
        }
      }
      sol.status = Status::Infeasible;
      sol.message = "iterates diverged";
      return sol;
    }

    // keep complementarity from outrunning feasibility: a mu floor tied to
    // the residuals preserves enough centrality to keep reducing them
    double znorm = 0, xnorm_sc = 0;
    for (int b = 0; b < nb; ++b) {
      znorm = std::max(znorm, op_norm_hermitian(z.m[b]));
      xnorm_sc = std::max(xnorm_sc, op_norm_hermitian(x.m[b]));
    }
    const double mu_floor = 0.01 * std::max(rp_norm * znorm, rd_norm * xnorm_sc);
    const double mu_target = std::max(opts.mu_reduction * mu, std::min(mu_floor, mu));

    std::vector<Matrix> w(nb), zinv(nb);
    for (int b = 0; b < nb; ++b) {
      w[b] = nt_scaling(x.m[b], z.m[b]);
      const double zb_max = std::max(op_norm_hermitian(z.m[b]), 1e-30);
      zinv[b] = matrix_function(
          z.m[b], [zb_max](double v) { return 1.0 / std::max(v, 1e-16 * zb_max); });
    }

    Blocks rc(p.block_dims);
    for (int b = 0; b < nb; ++b) rc.m[b] = mu_target * zinv[b] - x.m[b];

    // Schur complement M dy = h.
    std::vector<std::vector<Matrix>> waw(m);
    for (int i = 0; i < m; ++i)
      for (const auto& [b, a] : p.constraints[i].terms)
        waw[i].push_back(w[b] * a * w[b]);

    Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        double s = 0;
        size_t ti = 0;
        for (const auto& [bi, ai] : p.constraints[i].terms) {
          size_t tj = 0;
          for (const auto& [bj, aj] : p.constraints[j].terms) {
            if (bi == bj) s += inner(aj, waw[i][ti]);
            (void)tj;
            ++tj;
          }
          ++ti;
        }
        mm(i, j) = s;
        mm(j, i) = s;
      }
    }

    Eigen::VectorXd h(m);
    for (int i = 0; i < m; ++i) {
      double s = rp(i);
      size_t ti = 0;
      for (const auto& [b, a] : p.constraints[i].terms) {
        s -= inner(a, rc.m[b]);
        s += inner(rd.m[b], waw[i][ti]);
        ++ti;
      }
      h(i) = s;
    }

    // small ridge for numerical safety
    const double ridge = 1e-12 * (1.0 + mm.diagonal().cwiseAbs().maxCoeff());
    mm.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(mm);
    Eigen::VectorXd dy = ldlt.solve(h);
    dy += ldlt.solve(h - mm * dy);  // one step of iterative refinement
    if (!dy.allFinite()) {
      sol.message = "search direction lost finiteness";
      break;
    }

    Blocks atdy = apply_at(dy);
    Blocks dz(p.block_dims), dx(p.block_dims);
    for (int b = 0; b < nb; ++b) {
      dz.m[b] = rd.m[b] - atdy.m[b];
      Matrix v = rc.m[b] - w[b] * dz.m[b] * w[b];
      dx.m[b] = 0.5 * (v + v.adjoint());
    }

    double ap = 1.0, ad = 1.0;
    bool finite = true;
    if (trace)
      std::fprintf(stderr, "it %3d mu %9.2e rp %9.2e rd %9.2e gap %9.2e\n", iter, mu,
                   rp_norm, rd_norm, sol.gap);
    for (int b = 0; b < nb; ++b) {
      if (!dx.m[b].allFinite() || !dz.m[b].allFinite()) finite = false;
    }
    if (!finite) {
      sol.message = "step lost finiteness";
      break;
    }
    for (int b = 0; b < nb; ++b) {
      ap = std::min(ap, psd_step(x.m[b], dx.m[b]));
      ad = std::min(ad, psd_step(z.m[b], dz.m[b]));
    }
    if (ap < 1e-10 && ad < 1e-10) {
      sol.message = "step sizes collapsed";
      break;
    }
    for (int b = 0; b < nb; ++b) {
      x.m[b] += ap * dx.m[b];
      z.m[b] += ad * dz.m[b];
      x.m[b] = 0.5 * (x.m[b] + x.m[b].adjoint()).eval();
      z.m[b] = 0.5 * (z.m[b] + z.m[b].adjoint()).eval();
    }
    sol.y += ad * dy;
  }

  sol.x = x.m;
  sol.z = z.m;
  for (int i = 0; i < m; ++i)
    if (row_scale[i] > 0) sol.y(i) /= row_scale[i];
  if (sol.status != Status::Optimal && sol.status != Status::Infeasible) {
    sol.status = Status::MaxIterations;
    if (sol.message.empty()) sol.message = "maximum iterations reached";
  }
  return sol;
}

}  // namespace thermocap::sdp
