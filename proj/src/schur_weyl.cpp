#include "thermocap/schur_weyl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace thermocap::schur {

int YoungDiagram::boxes() const { return std::accumulate(parts.begin(), parts.end(), 0); }

int YoungDiagram::rows() const {
  int r = 0;
  for (int p : parts)
    if (p > 0) ++r;
  return r;
}

double YoungDiagram::shannon_entropy() const {
  const double n = boxes();
  double h = 0;
  for (int p : parts)
    if (p > 0) h -= (p / n) * std::log(p / n);
  return h;
}

std::vector<YoungDiagram> young_diagrams(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("young_diagrams: n, d >= 1 required");
  std::vector<YoungDiagram> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int maxpart) -> void {
    if (remaining == 0) {
      YoungDiagram y;
      y.parts = cur;
      y.parts.resize(d, 0);
      out.push_back(std::move(y));
      return;
    }
    if (static_cast<int>(cur.size()) == d) return;
    for (int p = std::min(remaining, maxpart); p >= 1; --p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

namespace {

// beta-set representation: strictly decreasing first-column hook lengths
std::vector<int> beta_set(const std::vector<int>& parts) {
  std::vector<int> nz;
  for (int p : parts)
    if (p > 0) nz.push_back(p);
  const int r = static_cast<int>(nz.size());
  std::vector<int> beta(r);
  for (int i = 0; i < r; ++i) beta[i] = nz[i] + (r - 1 - i);
  return beta;
}

std::vector<int> parts_from_beta(std::vector<int> beta) {
  std::sort(beta.begin(), beta.end(), std::greater<int>());
  std::vector<int> parts;
  const int r = static_cast<int>(beta.size());
  for (int i = 0; i < r; ++i) {
    int p = beta[i] - (r - 1 - i);
    if (p > 0) parts.push_back(p);
  }
  return parts;
}

struct CharKey {
  std::vector<int> lambda;
  std::vector<int> mu;
  bool operator<(const CharKey& o) const {
    if (lambda != o.lambda) return lambda < o.lambda;
    return mu < o.mu;
  }
};

long long mn_character(std::vector<int> lambda, std::vector<int> mu,
                       std::map<CharKey, long long>& memo) {
  while (!lambda.empty() && lambda.back() == 0) lambda.pop_back();
  if (lambda.empty()) return mu.empty() ? 1 : 0;
  if (mu.empty()) return 0;
  CharKey key{lambda, mu};
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  const int ell = mu.front();
  std::vector<int> mu_rest(mu.begin() + 1, mu.end());
  std::vector<int> beta = beta_set(lambda);
  long long total = 0;
  for (size_t i = 0; i < beta.size(); ++i) {
    const int target = beta[i] - ell;
    if (target < 0) continue;
    if (std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
    int height = 0;
    for (int b : beta)
      if (b > target && b < beta[i]) ++height;
    std::vector<int> nb = beta;
    nb[i] = target;
    const long long sign = (height % 2 == 0) ? 1 : -1;
    total += sign * mn_character(parts_from_beta(nb), mu_rest, memo);
  }
  memo[key] = total;
  return total;
}

std::vector<int> cycle_type(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<bool> seen(n, false);
  std::vector<int> type;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0, j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = perm[j];
      ++len;
    }
    type.push_back(len);
  }
  std::sort(type.begin(), type.end(), std::greater<int>());
  return type;
}

long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

long long character(const YoungDiagram& lambda, const std::vector<int>& ct) {
  static std::map<CharKey, long long> memo;
  std::vector<int> mu = ct;
  std::sort(mu.begin(), mu.end(), std::greater<int>());
  std::vector<int> lam;
  for (int p : lambda.parts)
    if (p > 0) lam.push_back(p);
  return mn_character(lam, mu, memo);
}

long long sn_irrep_dim(const YoungDiagram& lambda) {
  std::vector<int> nz;
  for (int p : lambda.parts)
    if (p > 0) nz.push_back(p);
  const int rows = static_cast<int>(nz.size());
  if (rows == 0) return 1;
  std::vector<int> conj(nz[0], 0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < nz[i]; ++j) ++conj[j];
  long long hooks = 1;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < nz[i]; ++j) hooks *= (nz[i] - j) + (conj[j] - i) - 1;
  return factorial(lambda.boxes()) / hooks;
}

long long gl_irrep_dim(const YoungDiagram& lambda, int d) {
  if (lambda.rows() > d) return 0;
  std::vector<int> lam = lambda.parts;
  lam.resize(d, 0);
  double num = 1, den = 1;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      num *= lam[i] - lam[j] + j - i;
      den *= j - i;
    }
  return std::llround(num / den);
}

namespace {

std::filesystem::path cache_path(const YoungDiagram& lambda, int n, int d) {
  const char* dir = std::getenv("THERMOCAP_CACHE_DIR");
  if (!dir || !*dir) return {};
  std::ostringstream name;
  name << "schur_n" << n << "_d" << d << "_l";
  for (int p : lambda.parts) name << p << "-";
  name << ".bin";
  return std::filesystem::path(dir) / name.str();
}

bool load_cached(const std::filesystem::path& path, Matrix& m) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::int64_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  if (!in || dim <= 0 || dim > (1 << 14)) return false;
  m.resize(dim, dim);
  in.read(reinterpret_cast<char*>(m.data()), sizeof(Complex) * dim * dim);
  return bool(in);
}

void store_cached(const std::filesystem::path& path, const Matrix& m) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) return;
  const std::int64_t dim = m.rows();
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(m.data()), sizeof(Complex) * dim * dim);
}

}  // namespace

SchurBlock schur_projector(const YoungDiagram& lambda, int n, int d) {
  if (lambda.boxes() != n) throw std::invalid_argument("schur_projector: box count != n");
  long long dtot = 1;
  for (int i = 0; i < n; ++i) {
    dtot *= d;
    if (dtot > 4096) throw std::invalid_argument("schur_projector: d^n above the size guard");
  }
  SchurBlock block;
  block.diagram = lambda;
  block.dim_q = gl_irrep_dim(lambda, d);
  block.dim_p = sn_irrep_dim(lambda);
  block.entropy = lambda.shannon_entropy();

  const int dim = static_cast<int>(dtot);
  if (block.dim_q == 0) {
    block.projector = Matrix::Zero(dim, dim);
    return block;
  }

  const auto path = cache_path(lambda, n, d);
  if (!path.empty() && load_cached(path, block.projector)) return block;

  // characters by cycle type
  std::map<std::vector<int>, double> chi;
  for (const auto& mu : young_diagrams(n, n)) {
    std::vector<int> ct;
    for (int p : mu.parts)
      if (p > 0) ct.push_back(p);
    chi[ct] = static_cast<double>(character(lambda, ct));
  }

  const double scale = static_cast<double>(block.dim_p) / factorial(n);
  Matrix proj = Matrix::Zero(dim, dim);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> digits(n), nd(n);
  do {
    const double coeff = scale * chi[cycle_type(perm)];
    if (coeff == 0) continue;
    // accumulate coeff * U(perm): slot perm[k] of the output gets digit k
    for (int i = 0; i < dim; ++i) {
      int x = i;
      for (int k = n - 1; k >= 0; --k) {
        digits[k] = x % d;
        x /= d;
      }
      for (int k = 0; k < n; ++k) nd[perm[k]] = digits[k];
      int j = 0;
      for (int k = 0; k < n; ++k) j = j * d + nd[k];
      proj(j, i) += coeff;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  block.projector = 0.5 * (proj + proj.adjoint());
  if (!path.empty()) store_cached(path, block.projector);
  return block;
}

std::vector<SchurBlock> schur_blocks(int n, int d) {
  std::vector<SchurBlock> out;
  for (const auto& lam : young_diagrams(n, d)) out.push_back(schur_projector(lam, n, d));
  return out;
}

double entropy_estimation_success(const Matrix& rho, int n, double delta) {
  const int d = static_cast<int>(rho.rows());
  const double h = [&] {
    EigResult e = eig_hermitian(rho);
    double s = 0;
    for (int i = 0; i < d; ++i)
      if (e.values(i) > kSupportRelTol) s -= e.values(i) * std::log(e.values(i));
    return s;
  }();
  Matrix rho_n = kron_pow(rho, n);
  double success = 0;
  for (const auto& block : schur_blocks(n, d)) {
    if (std::abs(block.entropy - h) <= delta)
      success += std::real((block.projector * rho_n).trace());
  }
  return success;
}

Matrix EnergyPovm::window(double h, double delta) const {
  Matrix w = Matrix::Zero(projectors[0].rows(), projectors[0].cols());
  for (size_t i = 0; i < labels.size(); ++i)
    if (std::abs(labels[i] - h) <= delta) w += projectors[i];
  return w;
}

int EnergyPovm::index_of(double k, double tol) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (std::abs(labels[i] - k) <= tol) return static_cast<int>(i);
  return -1;
}

EnergyPovm energy_povm(const Matrix& h, double beta, int n, bool materialize) {
  const int d = static_cast<int>(h.rows());
  long long dtot = 1;
  for (int i = 0; i < n; ++i) {
    dtot *= d;
    if (dtot > 4096) throw std::invalid_argument("energy_povm: dim^n above the size guard");
  }
  EigResult eh = eig_hermitian(h);
  EnergyPovm povm;
  povm.n = n;
  povm.basis = eh.vectors;
  povm.energies = beta * eh.values;

  const int dim = static_cast<int>(dtot);
  const double tol = 1e-9 * std::max(1.0, povm.energies.cwiseAbs().maxCoeff());
  std::vector<double> seq_label(dim);
  for (int i = 0; i < dim; ++i) {
    int x = i;
    double sum = 0;
    for (int k = 0; k < n; ++k) {
      sum += povm.energies(x % d);
      x /= d;
    }
    seq_label[i] = sum / n;
  }
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return seq_label[a] < seq_label[b]; });

  Matrix ubig;
  if (materialize) ubig = kron_pow(eh.vectors, n);
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && seq_label[order[j]] - seq_label[order[i]] <= tol) ++j;
    double label = 0;
    for (size_t t = i; t < j; ++t) label += seq_label[order[t]];
    povm.labels.push_back(label / (j - i));
    if (materialize) {
      Matrix proj = Matrix::Zero(dim, dim);
      for (size_t t = i; t < j; ++t)
        proj += ubig.col(order[t]) * ubig.col(order[t]).adjoint();
      povm.projectors.push_back(std::move(proj));
    }
    i = j;
  }
  return povm;
}

EnergyPovm energy_povm_from_gamma(const Matrix& gamma, int n, bool materialize) {
  Matrix h = -log_support(gamma);
  return energy_povm(h, 1.0, n, materialize);
}

BlockOverlapReport block_overlap_check(const YoungDiagram& lambda,
                                       const YoungDiagram& lambda_prime, int n, int d_a,
                                       int d_b) {
  long long dtot = 1;
  for (int i = 0; i < n; ++i) {
    dtot *= d_a * d_b;
    if (dtot > 4096)
      throw std::invalid_argument("block_overlap_check: (dA dB)^n above the size guard");
  }
  SchurBlock big = schur_projector(lambda, n, d_a * d_b);
  SchurBlock small = schur_projector(lambda_prime, n, d_b);

  std::vector<int> dims;
  std::vector<int> a_pos, b_pos;
  for (int k = 0; k < n; ++k) {
    dims.push_back(d_a);
    dims.push_back(d_b);
    a_pos.push_back(2 * k);
    b_pos.push_back(2 * k + 1);
  }
  BlockOverlapReport rep;
  Matrix lifted = embed(small.projector, dims, b_pos);
  rep.commutator = inf_norm(lifted * big.projector - big.projector * lifted);

  if (big.dim_q == 0 || small.dim_q == 0) {
    rep.c = 0;
    return rep;
  }
  Matrix tr_a = partial_trace(big.projector, dims, b_pos);
  Matrix sandwich = small.projector * tr_a * small.projector;
  const double bound_scale =
      std::exp(n * (lambda.shannon_entropy() - lambda_prime.shannon_entropy()));
  rep.c = op_norm_hermitian(sandwich) / bound_scale;
  return rep;
}

DeFinettiState de_finetti_state(int n, int d) {
  long long dtot = 1;
  for (int i = 0; i < n; ++i) {
    dtot *= d * d;
    if (dtot > 4096) throw std::invalid_argument("de_finetti_state: d^{2n} above the size guard");
  }
  const int dim = static_cast<int>(dtot);
  Matrix sym = Matrix::Zero(dim, dim);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int count = 0;
  do {
    sym += permutation_operator(perm, d * d);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  sym /= count;

  std::vector<int> dims;
  std::vector<int> x_pos;
  for (int k = 0; k < n; ++k) {
    dims.push_back(d);
    dims.push_back(d);
    x_pos.push_back(2 * k);
  }
  DeFinettiState out;
  Matrix zeta = partial_trace(sym, dims, x_pos);
  zeta /= zeta.trace();
  out.state = 0.5 * (zeta + zeta.adjoint());

  // minimal purification from the eigendecomposition
  EigResult ez = eig_hermitian(out.state);
  const double cut = kSupportRelTol * std::max(1.0, ez.values.maxCoeff());
  int rank = 0;
  while (rank < ez.values.size() && ez.values(rank) > cut) ++rank;
  const int dx = static_cast<int>(out.state.rows());
  Vector psi = Vector::Zero(dx * rank);
  for (int r = 0; r < rank; ++r)
    for (int i = 0; i < dx; ++i)
      psi(i * rank + r) = std::sqrt(ez.values(r)) * ez.vectors(i, r);
  out.purification = psi * psi.adjoint();
  out.dim_r = rank;
  return out;
}

}  // namespace thermocap::schur
