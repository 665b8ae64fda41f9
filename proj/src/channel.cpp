#include "thermocap/channel.hpp"

#include "thermocap/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace thermocap {

QuantumChannel::QuantumChannel(int dim_in, int dim_out, std::vector<Matrix> kraus, TpClass tp)
    : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)), tp_(tp) {
  if (kraus_.empty()) throw std::invalid_argument("QuantumChannel: empty Kraus list");
  for (const auto& k : kraus_)
    if (k.rows() != dim_out_ || k.cols() != dim_in_)
      throw std::invalid_argument("QuantumChannel: Kraus dims mismatch");
  Matrix s = Matrix::Zero(dim_in_, dim_in_);
  for (const auto& k : kraus_) s += k.adjoint() * k;
  if (tp_ == TpClass::TracePreserving) {
    if (inf_norm(s - Matrix::Identity(dim_in_, dim_in_)) > 1e-9)
      throw std::invalid_argument("QuantumChannel: Kraus sum is not the identity");
  } else {
    EigResult e = eig_hermitian(s);
    if (e.values.maxCoeff() > 1 + 1e-9)
      throw std::invalid_argument("QuantumChannel: map increases trace");
  }
  choi_ = Matrix::Zero(dim_in_ * dim_out_, dim_in_ * dim_out_);
  for (const auto& k : kraus_) {
    // vec_R(K) = sum_{i} |i>_R (x) K|i>
    Vector v(dim_in_ * dim_out_);
    for (int i = 0; i < dim_in_; ++i) v.segment(i * dim_out_, dim_out_) = k.col(i);
    choi_ += v * v.adjoint();
  }
}

Matrix QuantumChannel::apply(const Matrix& rho) const {
  if (rho.rows() != dim_in_) throw std::invalid_argument("apply: dim mismatch");
  Matrix out = Matrix::Zero(dim_out_, dim_out_);
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

Matrix QuantumChannel::apply_on(const Matrix& rho, const std::vector<int>& dims,
                                const std::vector<int>& pos) const {
  if (dim_in_ != dim_out_) {
    // general dims: handled by building new dims; only square factors needed here
    throw std::invalid_argument("apply_on: requires dim_in == dim_out");
  }
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus_) out += conjugate_on_factors(k, rho, dims, pos);
  return out;
}

Matrix QuantumChannel::apply_adjoint(const Matrix& z) const {
  if (z.rows() != dim_out_) throw std::invalid_argument("apply_adjoint: dim mismatch");
  Matrix out = Matrix::Zero(dim_in_, dim_in_);
  for (const auto& k : kraus_) out += k.adjoint() * z * k;
  return out;
}

QuantumChannel QuantumChannel::adjoint_map() const {
  std::vector<Matrix> ks;
  for (const auto& k : kraus_) ks.push_back(k.adjoint());
  return QuantumChannel(dim_out_, dim_in_, std::move(ks), TpClass::TraceNonIncreasing);
}

QuantumChannel QuantumChannel::tensor(const QuantumChannel& other) const {
  std::vector<Matrix> ks;
  for (const auto& a : kraus_)
    for (const auto& b : other.kraus_) ks.push_back(kron(a, b));
  TpClass tp = (tp_ == TpClass::TracePreserving && other.tp_ == TpClass::TracePreserving)
                   ? TpClass::TracePreserving
                   : TpClass::TraceNonIncreasing;
  return QuantumChannel(dim_in_ * other.dim_in_, dim_out_ * other.dim_out_, std::move(ks), tp);
}

QuantumChannel QuantumChannel::power(int n) const {
  QuantumChannel out = *this;
  for (int i = 1; i < n; ++i) out = out.tensor(*this);
  return out;
}

QuantumChannel QuantumChannel::identity(int d) {
  return QuantumChannel(d, d, {Matrix::Identity(d, d)});
}

QuantumChannel QuantumChannel::replacement(int dim_in, const Matrix& out_state) {
  // E(rho) = tr[rho] sigma, Kraus sqrt(sigma) e_k^T from the eigenbasis.
  EigResult e = eig_hermitian(out_state);
  std::vector<Matrix> ks;
  for (int i = 0; i < e.values.size(); ++i) {
    if (e.values(i) <= kSupportRelTol) continue;
    for (int k = 0; k < dim_in; ++k) {
      Matrix m = Matrix::Zero(out_state.rows(), dim_in);
      m.col(k) = std::sqrt(e.values(i)) * e.vectors.col(i);
      ks.push_back(m);
    }
  }
  return QuantumChannel(dim_in, static_cast<int>(out_state.rows()), std::move(ks));
}

QuantumChannel QuantumChannel::unitary(const Matrix& u) {
  return QuantumChannel(static_cast<int>(u.cols()), static_cast<int>(u.rows()), {u});
}

QuantumChannel QuantumChannel::depolarizing(int d, double p) {
  // E(rho) = (1-p) rho + p tr[rho] I/d, via isotropic Kraus set
  std::vector<Matrix> ks;
  ks.push_back(std::sqrt(1 - p) * Matrix::Identity(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix m = Matrix::Zero(d, d);
      m(i, j) = std::sqrt(p / d);
      ks.push_back(m);
    }
  return QuantumChannel(d, d, std::move(ks));
}

QuantumChannel QuantumChannel::dephasing(int d, double p) {
  // diagonal dephasing: keeps diagonal with weight p
  std::vector<Matrix> ks;
  ks.push_back(std::sqrt(1 - p) * Matrix::Identity(d, d));
  for (int i = 0; i < d; ++i) {
    Matrix m = Matrix::Zero(d, d);
    m(i, i) = std::sqrt(p);
    ks.push_back(m);
  }
  return QuantumChannel(d, d, std::move(ks));
}

QuantumChannel QuantumChannel::amplitude_damping(double p) {
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - p);
  k1(0, 1) = std::sqrt(p);
  return QuantumChannel(2, 2, {k0, k1});
}

QuantumChannel QuantumChannel::from_choi(const Matrix& j, int dim_in, int dim_out) {
  if (j.rows() != dim_in * dim_out) throw std::invalid_argument("from_choi: dims mismatch");
  EigResult e = eig_hermitian(j);
  const double cut = kSupportRelTol * std::max(1.0, e.values.cwiseAbs().maxCoeff());
  if (e.values.minCoeff() < -1e-10 * std::max(1.0, e.values.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("from_choi: Choi matrix is not PSD");
  std::vector<Matrix> ks;
  for (int i = 0; i < e.values.size(); ++i) {
    if (e.values(i) <= cut) continue;
    Matrix k(dim_out, dim_in);
    for (int c = 0; c < dim_in; ++c)
      k.col(c) = std::sqrt(e.values(i)) * e.vectors.col(i).segment(c * dim_out, dim_out);
    ks.push_back(k);
  }
  if (ks.empty()) ks.push_back(Matrix::Zero(dim_out, dim_in));
  Matrix s = Matrix::Zero(dim_in, dim_in);
  for (const auto& k : ks) s += k.adjoint() * k;
  TpClass tp = inf_norm(s - Matrix::Identity(dim_in, dim_in)) <= 1e-9
                   ? TpClass::TracePreserving
                   : TpClass::TraceNonIncreasing;
  return QuantumChannel(dim_in, dim_out, std::move(ks), tp);
}

Matrix choi_from_kraus(const QuantumChannel& c) { return c.choi(); }

StinespringDilation stinespring(const QuantumChannel& c) {
  if (c.tp_class() != TpClass::TracePreserving)
    throw std::invalid_argument("stinespring: trace-preserving channel required");
  // Kraus rank from the Choi spectrum, then V = sum_k K_k (x) |k>_E.
  QuantumChannel min_kraus = QuantumChannel::from_choi(c.choi(), c.dim_in(), c.dim_out());
  const auto& ks = min_kraus.kraus();
  const int r = static_cast<int>(ks.size());
  StinespringDilation d;
  d.dim_env = r;
  d.isometry = Matrix::Zero(c.dim_out() * r, c.dim_in());
  for (int k = 0; k < r; ++k)
    for (int o = 0; o < c.dim_out(); ++o)
      d.isometry.row(o * r + k) = ks[k].row(o);
  return d;
}

bool is_time_covariant(const QuantumChannel& c, const Matrix& h_x, double tol) {
  if (c.dim_in() != c.dim_out() || h_x.rows() != c.dim_in())
    throw std::invalid_argument("is_time_covariant: dims mismatch");
  const int d = c.dim_in();
  Matrix g = kron(h_x.transpose(), Matrix::Identity(d, d)) -
             kron(Matrix::Identity(d, d), h_x);
  Matrix comm = g * c.choi() - c.choi() * g;
  return inf_norm(comm) <= tol * std::max(1.0, inf_norm(h_x)) * std::max(1.0, inf_norm(c.choi()));
}

namespace {

// Group values within a tolerance; returns sorted distinct representatives
// and the group id of every input.
std::pair<std::vector<double>, std::vector<int>> group_values(const RealVector& v, double tol) {
  std::vector<int> order(v.size());
  for (int i = 0; i < v.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return v(a) < v(b); });
  std::vector<double> reps;
  std::vector<int> gid(v.size());
  for (int idx : order) {
    if (reps.empty() || v(idx) - reps.back() > tol) reps.push_back(v(idx));
    gid[idx] = static_cast<int>(reps.size()) - 1;
  }
  return {reps, gid};
}

}  // namespace

CovariantDilation covariant_stinespring(const QuantumChannel& c, const Matrix& h_x,
                                        double tol) {
  if (!is_time_covariant(c, h_x, tol))
    throw std::invalid_argument("covariant_stinespring: channel is not time-covariant");
  const int d = c.dim_in();
  const double hscale = std::max(1.0, inf_norm(h_x));

  // Work in the eigenbasis of H_X.
  EigResult eh = eig_hermitian(h_x);
  const Matrix uh = eh.vectors;
  std::vector<Matrix> kraus_h;
  for (const auto& k : c.kraus()) kraus_h.push_back(uh.adjoint() * k * uh);
  QuantumChannel ch(d, d, kraus_h, c.tp_class());

  // Energy-shift decomposition of the Choi matrix: basis pair (i -> o)
  // carries shift E_i - E_o; covariance makes the Choi block diagonal
  // across shifts, so each block yields Kraus operators with a definite
  // shift.  H_E assigns that shift as the environment level energy.
  RealVector shift(d * d);
  for (int i = 0; i < d; ++i)
    for (int o = 0; o < d; ++o) shift(i * d + o) = eh.values(i) - eh.values(o);
  auto [shift_reps, shift_gid] = group_values(shift, 1e-9 * hscale);

  std::vector<Matrix> kraus_blocks;  // definite-shift Kraus ops, H_X eigenbasis
  std::vector<double> kraus_shift;
  const Matrix& j = ch.choi();
  for (size_t g = 0; g < shift_reps.size(); ++g) {
    std::vector<int> members;
    for (int idx = 0; idx < d * d; ++idx)
      if (shift_gid[idx] == static_cast<int>(g)) members.push_back(idx);
    Matrix jg(members.size(), members.size());
    for (size_t a = 0; a < members.size(); ++a)
      for (size_t b = 0; b < members.size(); ++b) jg(a, b) = j(members[a], members[b]);
    EigResult ej = eig_hermitian(jg);
    const double cut = 1e-12 * std::max(1.0, inf_norm(j));
    for (int t = 0; t < ej.values.size(); ++t) {
      if (ej.values(t) <= cut) continue;
      Matrix k = Matrix::Zero(d, d);
      for (size_t a = 0; a < members.size(); ++a) {
        const int i_in = members[a] / d, i_out = members[a] % d;
        k(i_out, i_in) = std::sqrt(ej.values(t)) * ej.vectors(a, t);
      }
      kraus_blocks.push_back(k);
      kraus_shift.push_back(shift_reps[g]);
    }
  }

  // Environment levels: one per definite-shift Kraus op plus a zero level
  // if no Kraus has shift 0.
  int zero_idx = -1;
  for (size_t a = 0; a < kraus_shift.size(); ++a)
    if (std::abs(kraus_shift[a]) <= 1e-9 * hscale && zero_idx < 0)
      zero_idx = static_cast<int>(a);
  int dim_env = static_cast<int>(kraus_blocks.size());
  if (zero_idx < 0) {
    zero_idx = dim_env;
    ++dim_env;
  }
  RealVector h_env_diag = RealVector::Zero(dim_env);
  for (size_t a = 0; a < kraus_shift.size(); ++a) h_env_diag(a) = kraus_shift[a];
  if (zero_idx < static_cast<int>(kraus_shift.size()))
    h_env_diag(zero_idx) = 0.0;  // clean up rounding on the zero block

  // V' (x |0>_E -> X (x) E):  V'|psi> = sum_a K_a|psi> (x) |a>_E.
  // Column j of V' is an eigenvector of H_X + H_E at energy E_j.
  const int dtot = d * dim_env;
  Matrix vprime = Matrix::Zero(dtot, d);
  for (size_t a = 0; a < kraus_blocks.size(); ++a)
    for (int o = 0; o < d; ++o)
      for (int i = 0; i < d; ++i)
        vprime(o * dim_env + static_cast<int>(a), i) += kraus_blocks[a](o, i);

  // Total energies in the product eigenbasis of X (x) E.
  RealVector etot(dtot);
  for (int o = 0; o < d; ++o)
    for (int a = 0; a < dim_env; ++a) etot(o * dim_env + a) = eh.values(o) + h_env_diag(a);
  auto [energy_reps, energy_gid] = group_values(etot, 1e-9 * hscale);

  // Complete V' <0|_E to an energy-conserving unitary: within each total
  // energy eigenspace, pair the orthocomplement of the initial vectors
  // {|j>_X (x) |0>_E} with the orthocomplement of the image vectors
  // {V'|j>}, in deterministic (energy, construction index) order.
  Matrix v = Matrix::Zero(dtot, dtot);
  for (size_t g = 0; g < energy_reps.size(); ++g) {
    std::vector<int> members;
    for (int idx = 0; idx < dtot; ++idx)
      if (energy_gid[idx] == static_cast<int>(g)) members.push_back(idx);
    const int dg = static_cast<int>(members.size());

    // initial vectors in this eigenspace: |j>_X (x) |0>_E with E_j in group
    std::vector<int> init_cols;
    for (int jX = 0; jX < d; ++jX)
      if (energy_gid[jX * dim_env + zero_idx] == static_cast<int>(g)) init_cols.push_back(jX);
    const int r = static_cast<int>(init_cols.size());

    Matrix init = Matrix::Zero(dg, r), image = Matrix::Zero(dg, r);
    for (int t = 0; t < r; ++t) {
      for (int a = 0; a < dg; ++a) {
        if (members[a] == init_cols[t] * dim_env + zero_idx) init(a, t) = 1.0;
        image(a, t) = vprime(members[a], init_cols[t]);
      }
    }
    // restore exact orthonormality lost to the energy-group truncation
    for (int t = 0; t < r; ++t) {
      for (int s2 = 0; s2 < t; ++s2) image.col(t) -= image.col(s2).dot(image.col(t)) * image.col(s2);
      image.col(t).normalize();
    }

    // orthonormal completions via Householder QR of [basis | identity]
    auto complete = [&](const Matrix& cols) {
      Matrix m(dg, cols.cols() + dg);
      m.leftCols(cols.cols()) = cols;
      m.rightCols(dg) = Matrix::Identity(dg, dg);
      Eigen::ColPivHouseholderQR<Matrix> qr(m);
      Matrix q = qr.householderQ() * Matrix::Identity(dg, dg);
      return q;  // first r columns span cols (up to phase), rest orthocomplement
    };

    // Householder Q may rotate within span(cols); rebuild so that the first
    // r columns are exactly the given (orthonormal) vectors.
    auto orthocomplement = [&](const Matrix& cols) {
      Matrix q = complete(cols);
      Matrix proj = Matrix::Identity(dg, dg) - cols * cols.adjoint();
      std::vector<Vector> extra;
      for (int t = 0; t < dg && static_cast<int>(extra.size()) < dg - cols.cols(); ++t) {
        Vector w = proj * q.col(t);
        for (const auto& e : extra) w -= e.dot(w) * e;
        const double nn = w.norm();
        if (nn > 1e-8) extra.push_back(w / nn);
      }
      if (static_cast<int>(extra.size()) != dg - cols.cols())
        throw std::runtime_error("covariant_stinespring: completion failed");
      Matrix out(dg, dg - cols.cols());
      for (size_t t = 0; t < extra.size(); ++t) out.col(t) = extra[t];
      return out;
    };

    Matrix init_rest = orthocomplement(init);
    Matrix image_rest = orthocomplement(image);
    Matrix src(dg, dg), dst(dg, dg);
    src << init, init_rest;
    dst << image, image_rest;
    Matrix vg = dst * src.adjoint();
    for (int a = 0; a < dg; ++a)
      for (int b = 0; b < dg; ++b) v(members[a], members[b]) = vg(a, b);
  }

  // Return in the original (not H-eigen) basis of X.
  Matrix u_big = kron(uh, Matrix::Identity(dim_env, dim_env));
  CovariantDilation out;
  out.unitary = u_big * v * u_big.adjoint();
  out.h_env = Matrix::Zero(dim_env, dim_env);
  for (int a = 0; a < dim_env; ++a) out.h_env(a, a) = h_env_diag(a);
  out.zero_index = zero_idx;
  out.dim_env = dim_env;
  return out;
}

double half_diamond_norm_choi(const Matrix& j_delta, int dim_in, int dim_out, double tol) {
  // For Hermitian J:  |Phi|_dia = min |tr_out Y|_inf over Y >= +-J, so
  //   (1/2)|Phi|_dia = (1/2) min mu  s.t.  A = Y - J >= 0, B = Y + J >= 0,
  //   tr_out Y + S = mu I  with  S >= 0.
  const int dj = dim_in * dim_out;
  sdp::Problem p;
  const int bA = p.add_block(dj);
  const int bB = p.add_block(dj);
  const int bS = p.add_block(dim_in);
  const int bMu = p.add_block(1);
  p.set_objective(bMu, 0.5 * Matrix::Identity(1, 1));

  // B - A = 2J
  p.add_matrix_equality(dj, 2.0 * j_delta,
                        {{bB, [](const Matrix& e) { return e; }},
                         {bA, [](const Matrix& e) { return -e; }}});
  // tr_out(A) + tr_out(J) + S - mu I = 0   (Y = A + J)
  // adjoint of tr_out on R(x)out wrt E on R: E (x) I_out
  auto lift = [dim_out](const Matrix& e) {
    return kron(e, Matrix::Identity(dim_out, dim_out));
  };
  Matrix tr_out_j = partial_trace(j_delta, {dim_in, dim_out}, {0});
  p.add_matrix_equality(dim_in, -tr_out_j,
                        {{bA, lift},
                         {bS, [](const Matrix& e) { return e; }},
                         {bMu, [dim_in](const Matrix& e) {
                            Matrix m(1, 1);
                            m(0, 0) = -e.trace();
                            (void)dim_in;
                            return m;
                          }}});

  sdp::Options opts;
  opts.tol = tol;
  sdp::Solution s = sdp::solve(p, opts);
  if (s.status != sdp::Status::Optimal)
    throw std::runtime_error("half_diamond_norm_choi: SDP failed: " + s.message);
  return s.primal_value;
}

double diamond_distance(const QuantumChannel& a, const QuantumChannel& b, double tol) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw std::invalid_argument("diamond_distance: dims mismatch");
  return half_diamond_norm_choi(a.choi() - b.choi(), a.dim_in(), a.dim_out(), tol);
}

}  // namespace thermocap
