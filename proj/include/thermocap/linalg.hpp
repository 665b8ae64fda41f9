#ifndef THERMOCAP_LINALG_HPP
#define THERMOCAP_LINALG_HPP

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace thermocap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Relative threshold below which eigenvalues count as zero for support /
// rank decisions.
constexpr double kSupportRelTol = 1e-12;

inline double inf_norm(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

// max_ij |A_ij - conj(A_ji)|, the deviation from Hermiticity.
double hermiticity_defect(const Matrix& a);

// Dense Hermitian operator.  Construction symmetrizes, so the stored matrix
// is exactly Hermitian; the defect of the input must stay below
// 1e-12 * max(1, |A|_inf) or construction throws.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(Matrix m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }

  static HermitianOperator identity(int d) { return HermitianOperator(Matrix::Identity(d, d)); }
  static HermitianOperator diagonal(const RealVector& d);

 private:
  Matrix mat_;
};

struct EigResult {
  RealVector values;  // descending
  Matrix vectors;     // columns, unitary
};

// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
EigResult eig_hermitian(const Matrix& a);
inline EigResult eig_hermitian(const HermitianOperator& a) { return eig_hermitian(a.mat()); }

// f applied to the spectrum of a Hermitian A.  With support_only set,
// eigenvalues below kSupportRelTol * |A|_inf in magnitude map to zero.
// Throws std::domain_error if f produces a non-finite value.
Matrix matrix_function(const Matrix& a, const std::function<double(double)>& f,
                       bool support_only = false);

Matrix sqrtm_psd(const Matrix& a);
Matrix log_support(const Matrix& a);          // ln on the support, 0 on the kernel
Matrix inv_sqrt_support(const Matrix& a);     // A^{-1/2} on the support
Matrix support_projector(const Matrix& a);

// True if the support of rho is contained in the support of tau (both PSD).
bool support_contained(const Matrix& rho, const Matrix& tau);

// --- tensor factor bookkeeping -------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_pow(const Matrix& a, int n);

// Partial trace of m over the factors NOT listed in keep.  dims lists every
// factor dimension in order; keep holds factor indices (ascending output
// order follows the original factor order).
Matrix partial_trace(const Matrix& m, const std::vector<int>& dims,
                     const std::vector<int>& keep);

// Embed op, acting on the factors listed in pos (in that order), into the
// full space described by dims; identity elsewhere.
Matrix embed(const Matrix& op, const std::vector<int>& dims, const std::vector<int>& pos);

// op (on factors pos) times m, without forming the embedded operator.
Matrix apply_left(const Matrix& op, const Matrix& m, const std::vector<int>& dims,
                  const std::vector<int>& pos);
// m times op^dagger (on factors pos).
Matrix apply_right_adjoint(const Matrix& op, const Matrix& m, const std::vector<int>& dims,
                           const std::vector<int>& pos);
// Sandwich op . m . op^dagger on the given factors.
Matrix conjugate_on_factors(const Matrix& op, const Matrix& m, const std::vector<int>& dims,
                            const std::vector<int>& pos);

// Vector version of apply_left.
Vector apply_left_vec(const Matrix& op, const Vector& v, const std::vector<int>& dims,
                      const std::vector<int>& pos);

// Reorder tensor factors of an operator: factor j of the result is factor
// perm[j] of the input.
Matrix permute_factors(const Matrix& m, const std::vector<int>& dims,
                       const std::vector<int>& perm);
Vector permute_factors_vec(const Vector& v, const std::vector<int>& dims,
                           const std::vector<int>& perm);

// Permutation operator U(pi) on d^n with U |i_1..i_n> = |i_{pi^{-1}(1)}..>,
// i.e. the operator sending factor slot j to slot pi[j].
Matrix permutation_operator(const std::vector<int>& pi, int d);

// --- norms and distances ---------------------------------------------------

double trace_norm_hermitian(const Matrix& a);   // sum |eig|
double op_norm_hermitian(const Matrix& a);      // max |eig|

struct OneNormCert {
  double norm = 0;
  Matrix maximizer;    // Z with |Z|_inf <= 1, tr[Z A] = |A|_1
  Matrix delta_plus;   // A = delta_plus - delta_minus, both PSD
  Matrix delta_minus;
};
OneNormCert one_norm_dual_check(const Matrix& a);

enum class DistanceKind { Fidelity, GeneralizedFidelity, Purified, Trace };

double fidelity(const Matrix& rho, const Matrix& sigma);
double generalized_fidelity(const Matrix& rho, const Matrix& sigma);
double purified_distance(const Matrix& rho, const Matrix& sigma);
double trace_distance(const Matrix& rho, const Matrix& sigma);

// Dispatcher with sub-normalization checks (traces <= 1 + 1e-10, PSD up to
// tolerance); throws std::invalid_argument otherwise.
double state_distance(DistanceKind kind, const Matrix& rho, const Matrix& sigma);

}  // namespace thermocap

#endif
