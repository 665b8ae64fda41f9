#ifndef THERMOCAP_SCHUR_WEYL_HPP
#define THERMOCAP_SCHUR_WEYL_HPP

#include "thermocap/linalg.hpp"

#include <map>
#include <vector>

namespace thermocap::schur {

// Partition of n into at most d non-increasing parts (trailing zeros kept).
struct YoungDiagram {
  std::vector<int> parts;

  int boxes() const;
  int rows() const;  // nonzero parts
  double shannon_entropy() const;  // H(lambda/n) in nats
  bool operator==(const YoungDiagram&) const = default;
  bool operator<(const YoungDiagram& o) const { return parts > o.parts ? false : parts < o.parts; }
};

// All diagrams with n boxes and at most d rows, in descending
// lexicographic order.
std::vector<YoungDiagram> young_diagrams(int n, int d);

// Symmetric-group character chi^lambda on the conjugacy class of the given
// cycle type (Murnaghan-Nakayama, memoized).
long long character(const YoungDiagram& lambda, const std::vector<int>& cycle_type);

long long sn_irrep_dim(const YoungDiagram& lambda);        // hook lengths
long long gl_irrep_dim(const YoungDiagram& lambda, int d); // Weyl formula

struct SchurBlock {
  YoungDiagram diagram;
  Matrix projector;      // on (C^d)^{(x) n}
  long long dim_q = 0;   // GL(d) irrep
  long long dim_p = 0;   // S_n irrep
  double entropy = 0;    // H(lambda/n)
};

// Central-idempotent projector Pi^lambda = (dim P / n!) sum_pi chi(pi) U(pi).
// Cached on disk when THERMOCAP_CACHE_DIR is set.
SchurBlock schur_projector(const YoungDiagram& lambda, int n, int d);

// All blocks for (n, d).
std::vector<SchurBlock> schur_blocks(int n, int d);

// tr[(sum of Pi^lambda with |H(lambda/n) - H(rho)| <= delta) rho^{(x) n}].
double entropy_estimation_success(const Matrix& rho, int n, double delta);

// Projective measurement onto the eigenspaces of Gamma^{(x) n} with
// Gamma = e^{-beta H}; label k = beta * (energy sum) / n.
struct EnergyPovm {
  std::vector<double> labels;
  std::vector<Matrix> projectors;
  Matrix basis;                 // single-copy eigenbasis of H
  RealVector energies;          // single-copy eigenvalues (of beta H)
  int n = 1;

  // Aggregated window projector R^{~delta h} = sum_{|k-h|<=delta} R^k.
  Matrix window(double h, double delta) const;
  int index_of(double k, double tol = 1e-9) const;
};

// materialize=false skips the dense projectors (labels, basis, and
// energies stay available), which large typicality builds rely on.
EnergyPovm energy_povm(const Matrix& h, double beta, int n, bool materialize = true);
// Same POVM for abstract Gamma > 0 via H = -ln Gamma (beta folded in).
EnergyPovm energy_povm_from_gamma(const Matrix& gamma, int n, bool materialize = true);

struct BlockOverlapReport {
  double c = 0;            // smallest constant in the partial-trace bound
  double commutator = 0;   // |[I (x) Pi^{lambda'}, Pi^lambda]|_inf
};

// Smallest c with Pi'_B tr_A[Pi^lambda_AB] Pi'_B <= c e^{n(H(lambda)-H(lambda'))} Pi'_B.
BlockOverlapReport block_overlap_check(const YoungDiagram& lambda,
                                       const YoungDiagram& lambda_prime, int n, int d_a,
                                       int d_b);

struct DeFinettiState {
  Matrix state;          // zeta on X^n
  Matrix purification;   // |zeta><zeta| on X^n (x) R, R of minimal dimension
  int dim_r = 1;
};

// zeta = tr over the reference copies of the normalized symmetric-subspace
// projector on (X (x) R)^{(x) n}.
DeFinettiState de_finetti_state(int n, int d);

}  // namespace thermocap::schur

#endif
