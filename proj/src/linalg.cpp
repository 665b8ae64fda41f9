#include "thermocap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace thermocap {

double hermiticity_defect(const Matrix& a) {
  return inf_norm(a - a.adjoint());
}

HermitianOperator::HermitianOperator(Matrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("HermitianOperator: square matrix required");
  const double defect = hermiticity_defect(m);
  const double scale = std::max(1.0, inf_norm(m));
  if (defect > 1e-9 * scale)
    throw std::invalid_argument("HermitianOperator: input is not Hermitian");
  mat_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::diagonal(const RealVector& d) {
  Matrix m = Matrix::Zero(d.size(), d.size());
  for (int i = 0; i < d.size(); ++i) m(i, i) = d(i);
  return HermitianOperator(std::move(m));
}

EigResult eig_hermitian(const Matrix& a) {
  Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: solver failed");
  const int d = static_cast<int>(h.rows());
  EigResult r;
  r.values.resize(d);
  r.vectors.resize(d, d);
  // Eigen returns ascending order; flip to descending.
  for (int i = 0; i < d; ++i) {
    r.values(i) = es.eigenvalues()(d - 1 - i);
    r.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  return r;
}

Matrix matrix_function(const Matrix& a, const std::function<double(double)>& f,
                       bool support_only) {
  EigResult e = eig_hermitian(a);
  const double scale = e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
  const double cut = kSupportRelTol * scale;
  RealVector fv(e.values.size());
  for (int i = 0; i < e.values.size(); ++i) {
    double lam = e.values(i);
    if (support_only && std::abs(lam) <= cut) {
      fv(i) = 0.0;
      continue;
    }
    double y = f(lam);
    if (!std::isfinite(y)) throw std::domain_error("matrix_function: f not finite on the spectrum");
    fv(i) = y;
  }
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

Matrix sqrtm_psd(const Matrix& a) {
  return matrix_function(a, [](double x) { return std::sqrt(std::max(0.0, x)); });
}

Matrix log_support(const Matrix& a) {
  return matrix_function(a, [](double x) { return std::log(x); }, /*support_only=*/true);
}

Matrix inv_sqrt_support(const Matrix& a) {
  return matrix_function(a, [](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; },
                         /*support_only=*/true);
}

Matrix support_projector(const Matrix& a) {
  EigResult e = eig_hermitian(a);
  const double cut = kSupportRelTol * (e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0);
  Matrix p = Matrix::Zero(a.rows(), a.cols());
  for (int i = 0; i < e.values.size(); ++i)
    if (std::abs(e.values(i)) > cut) p += e.vectors.col(i) * e.vectors.col(i).adjoint();
  return p;
}

bool support_contained(const Matrix& rho, const Matrix& tau) {
  Matrix p = support_projector(tau);
  Matrix residual = rho - p * rho * p;
  return inf_norm(residual) <= 1e-9 * std::max(1.0, inf_norm(rho));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kron_pow(const Matrix& a, int n) {
  if (n < 1) throw std::invalid_argument("kron_pow: n >= 1 required");
  Matrix out = a;
  for (int i = 1; i < n; ++i) out = kron(out, a);
  return out;
}

namespace {

int total_dim(const std::vector<int>& dims) {
  int t = 1;
  for (int d : dims) t *= d;
  return t;
}

// Strides for row-major composite indexing: index = sum_k i_k * stride[k].
std::vector<int> strides_of(const std::vector<int>& dims) {
  std::vector<int> s(dims.size());
  int acc = 1;
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    s[k] = acc;
    acc *= dims[k];
  }
  return s;
}

}  // namespace

Matrix partial_trace(const Matrix& m, const std::vector<int>& dims,
                     const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  const int dtot = total_dim(dims);
  if (m.rows() != dtot || m.cols() != dtot)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  std::vector<bool> kept(n, false);
  for (int k : keep) kept.at(k) = true;

  std::vector<int> kdims, tdims, kpos, tpos;
  for (int k = 0; k < n; ++k)
    (kept[k] ? kdims : tdims).push_back(dims[k]), (kept[k] ? kpos : tpos).push_back(k);
  const int dk = total_dim(kdims);
  const int dt = total_dim(tdims);

  const auto full_stride = strides_of(dims);
  const auto kstride = strides_of(kdims);
  const auto tstride = strides_of(tdims);

  // full index of (kept multi-index a, traced multi-index b)
  auto compose = [&](int a, int b) {
    int idx = 0;
    for (size_t j = 0; j < kpos.size(); ++j) {
      int digit = (a / kstride[j]) % kdims[j];
      idx += digit * full_stride[kpos[j]];
    }
    for (size_t j = 0; j < tpos.size(); ++j) {
      int digit = (b / tstride[j]) % tdims[j];
      idx += digit * full_stride[tpos[j]];
    }
    return idx;
  };

  Matrix out = Matrix::Zero(dk, dk);
  for (int a = 0; a < dk; ++a)
    for (int ap = 0; ap < dk; ++ap) {
      Complex s = 0;
      for (int b = 0; b < dt; ++b) s += m(compose(a, b), compose(ap, b));
      out(a, ap) = s;
    }
  return out;
}

namespace {

// Shared machinery for applying an operator on a subset of tensor factors.
struct FactorMap {
  int dop = 1;    // dimension of the op factors
  int dre = 1;    // dimension of the remaining factors
  std::vector<int> op_index;   // composite op-index -> contribution to full index
  std::vector<int> re_index;   // composite rest-index -> contribution to full index

  FactorMap(const std::vector<int>& dims, const std::vector<int>& pos) {
    const int n = static_cast<int>(dims.size());
    std::vector<bool> used(n, false);
    std::vector<int> odims, rdims, rpos;
    for (int p : pos) {
      odims.push_back(dims.at(p));
      used.at(p) = true;
    }
    for (int k = 0; k < n; ++k)
      if (!used[k]) {
        rdims.push_back(dims[k]);
        rpos.push_back(k);
      }
    dop = total_dim(odims);
    dre = total_dim(rdims);
    const auto full_stride = strides_of(dims);
    const auto ostride = strides_of(odims);
    const auto rstride = strides_of(rdims);
    op_index.resize(dop);
    for (int a = 0; a < dop; ++a) {
      int idx = 0;
      for (size_t j = 0; j < pos.size(); ++j)
        idx += ((a / ostride[j]) % odims[j]) * full_stride[pos[j]];
      op_index[a] = idx;
    }
    re_index.resize(dre);
    for (int b = 0; b < dre; ++b) {
      int idx = 0;
      for (size_t j = 0; j < rpos.size(); ++j)
        idx += ((b / rstride[j]) % rdims[j]) * full_stride[rpos[j]];
      re_index[b] = idx;
    }
  }
};

}  // namespace

Matrix embed(const Matrix& op, const std::vector<int>& dims, const std::vector<int>& pos) {
  FactorMap fm(dims, pos);
  if (op.rows() != fm.dop) throw std::invalid_argument("embed: operator/factor dims mismatch");
  const int dtot = fm.dop * fm.dre;
  Matrix out = Matrix::Zero(dtot, dtot);
  for (int a = 0; a < fm.dop; ++a)
    for (int ap = 0; ap < fm.dop; ++ap) {
      const Complex v = op(a, ap);
      if (v == Complex(0)) continue;
      for (int b = 0; b < fm.dre; ++b)
        out(fm.op_index[a] + fm.re_index[b], fm.op_index[ap] + fm.re_index[b]) = v;
    }
  return out;
}

Matrix apply_left(const Matrix& op, const Matrix& m, const std::vector<int>& dims,
                  const std::vector<int>& pos) {
  FactorMap fm(dims, pos);
  if (op.rows() != fm.dop || m.rows() != fm.dop * fm.dre)
    throw std::invalid_argument("apply_left: dims mismatch");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  // out[(a,b), c] = sum_a' op(a,a') m[(a',b), c]
  for (int a = 0; a < fm.dop; ++a)
    for (int ap = 0; ap < fm.dop; ++ap) {
      const Complex v = op(a, ap);
      if (v == Complex(0)) continue;
      for (int b = 0; b < fm.dre; ++b)
        out.row(fm.op_index[a] + fm.re_index[b]) += v * m.row(fm.op_index[ap] + fm.re_index[b]);
    }
  return out;
}

Matrix apply_right_adjoint(const Matrix& op, const Matrix& m, const std::vector<int>& dims,
                           const std::vector<int>& pos) {
  // m . (op^dagger on pos)  ==  (op on pos . m^dagger)^dagger
  return apply_left(op, m.adjoint(), dims, pos).adjoint();
}

Matrix conjugate_on_factors(const Matrix& op, const Matrix& m, const std::vector<int>& dims,
                            const std::vector<int>& pos) {
  return apply_right_adjoint(op, apply_left(op, m, dims, pos), dims, pos);
}

Vector apply_left_vec(const Matrix& op, const Vector& v, const std::vector<int>& dims,
                      const std::vector<int>& pos) {
  FactorMap fm(dims, pos);
  if (op.rows() != fm.dop || v.size() != fm.dop * fm.dre)
    throw std::invalid_argument("apply_left_vec: dims mismatch");
  Vector out = Vector::Zero(v.size());
  for (int a = 0; a < fm.dop; ++a)
    for (int ap = 0; ap < fm.dop; ++ap) {
      const Complex c = op(a, ap);
      if (c == Complex(0)) continue;
      for (int b = 0; b < fm.dre; ++b)
        out(fm.op_index[a] + fm.re_index[b]) += c * v(fm.op_index[ap] + fm.re_index[b]);
    }
  return out;
}

Matrix permute_factors(const Matrix& m, const std::vector<int>& dims,
                       const std::vector<int>& perm) {
  const int n = static_cast<int>(dims.size());
  const int dtot = total_dim(dims);
  if (m.rows() != dtot) throw std::invalid_argument("permute_factors: dims mismatch");
  std::vector<int> ndims(n);
  for (int j = 0; j < n; ++j) ndims[j] = dims[perm[j]];
  const auto ostride = strides_of(dims);
  const auto nstride = strides_of(ndims);
  std::vector<int> map(dtot);
  for (int i = 0; i < dtot; ++i) {
    int idx = 0;
    for (int j = 0; j < n; ++j) idx += ((i / ostride[perm[j]]) % dims[perm[j]]) * nstride[j];
    map[i] = idx;
  }
  Matrix out(dtot, dtot);
  for (int i = 0; i < dtot; ++i)
    for (int j = 0; j < dtot; ++j) out(map[i], map[j]) = m(i, j);
  return out;
}

Vector permute_factors_vec(const Vector& v, const std::vector<int>& dims,
                           const std::vector<int>& perm) {
  const int n = static_cast<int>(dims.size());
  const int dtot = total_dim(dims);
  std::vector<int> ndims(n);
  for (int j = 0; j < n; ++j) ndims[j] = dims[perm[j]];
  const auto ostride = strides_of(dims);
  const auto nstride = strides_of(ndims);
  Vector out(dtot);
  for (int i = 0; i < dtot; ++i) {
    int idx = 0;
    for (int j = 0; j < n; ++j) idx += ((i / ostride[perm[j]]) % dims[perm[j]]) * nstride[j];
    out(idx) = v(i);
  }
  return out;
}

Matrix permutation_operator(const std::vector<int>& pi, int d) {
  const int n = static_cast<int>(pi.size());
  int dtot = 1;
  for (int k = 0; k < n; ++k) dtot *= d;
  Matrix u = Matrix::Zero(dtot, dtot);
  std::vector<int> digits(n);
  for (int i = 0; i < dtot; ++i) {
    int x = i;
    for (int k = n - 1; k >= 0; --k) {
      digits[k] = x % d;
      x /= d;
    }
    // slot pi[k] of the output holds digit k of the input
    int j = 0;
    std::vector<int> nd(n);
    for (int k = 0; k < n; ++k) nd[pi[k]] = digits[k];
    for (int k = 0; k < n; ++k) j = j * d + nd[k];
    u(j, i) = 1.0;
  }
  return u;
}

double trace_norm_hermitian(const Matrix& a) {
  EigResult e = eig_hermitian(a);
  return e.values.cwiseAbs().sum();
}

double op_norm_hermitian(const Matrix& a) {
  EigResult e = eig_hermitian(a);
  return e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
}

OneNormCert one_norm_dual_check(const Matrix& a) {
  EigResult e = eig_hermitian(a);
  OneNormCert c;
  const int d = static_cast<int>(a.rows());
  c.maximizer = Matrix::Zero(d, d);
  c.delta_plus = Matrix::Zero(d, d);
  c.delta_minus = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double lam = e.values(i);
    const Matrix proj = e.vectors.col(i) * e.vectors.col(i).adjoint();
    c.norm += std::abs(lam);
    c.maximizer += (lam >= 0 ? 1.0 : -1.0) * proj;
    if (lam >= 0)
      c.delta_plus += lam * proj;
    else
      c.delta_minus += -lam * proj;
  }
  return c;
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
  const Matrix sr = sqrtm_psd(rho);
  EigResult e = eig_hermitian(sr * sigma * sr);
  double f = 0;
  for (int i = 0; i < e.values.size(); ++i) f += std::sqrt(std::max(0.0, e.values(i)));
  return f;
}

double generalized_fidelity(const Matrix& rho, const Matrix& sigma) {
  const double tr = std::real(rho.trace());
  const double ts = std::real(sigma.trace());
  return fidelity(rho, sigma) + std::sqrt(std::max(0.0, 1 - tr) * std::max(0.0, 1 - ts));
}

double purified_distance(const Matrix& rho, const Matrix& sigma) {
  double fb = std::min(1.0, generalized_fidelity(rho, sigma));
  return std::sqrt(std::max(0.0, 1 - fb * fb));
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  return 0.5 * trace_norm_hermitian(rho - sigma);
}

namespace {

void check_subnormalized_state(const Matrix& m, const char* who) {
  if (std::real(m.trace()) > 1 + 1e-10)
    throw std::invalid_argument(std::string(who) + ": trace exceeds 1+ 1e-10");
  EigResult e = eig_hermitian(m);
  if (e.values.size() && e.values.minCoeff() < -1e-9)
    throw std::invalid_argument(std::string(who) + ": negative eigenvalue beyond tolerance");
}

}  // namespace

double state_distance(DistanceKind kind, const Matrix& rho, const Matrix& sigma) {
  check_subnormalized_state(rho, "state_distance(rho)");
  check_subnormalized_state(sigma, "state_distance(sigma)");
  switch (kind) {
    case DistanceKind::Fidelity: return fidelity(rho, sigma);
    case DistanceKind::GeneralizedFidelity: return generalized_fidelity(rho, sigma);
    case DistanceKind::Purified: return purified_distance(rho, sigma);
    case DistanceKind::Trace: return trace_distance(rho, sigma);
  }
  throw std::logic_error("state_distance: unknown kind");
}

}  // namespace thermocap
