#ifndef THERMOCAP_SDP_HPP
#define THERMOCAP_SDP_HPP

#include "thermocap/linalg.hpp"

#include <functional>
#include <string>
#include <vector>

namespace thermocap::sdp {

// Dense-block semidefinite program in standard primal form
//
//   minimize    sum_b tr[C_b X_b]
//   subject to  sum_b tr[A_{i,b} X_b] = rhs_i   (i = 1..m)
//               X_b >= 0,
//
// with Hermitian data.  The dual reads  max rhs.y  s.t.
// Z_b = C_b - sum_i y_i A_{i,b} >= 0.
struct Problem {
  std::vector<int> block_dims;
  std::vector<Matrix> objective;
  struct Constraint {
    std::vector<std::pair<int, Matrix>> terms;  // (block index, coefficient)
    double rhs = 0;
  };
  std::vector<Constraint> constraints;

  int add_block(int dim);
  void set_objective(int block, const Matrix& c);
  void add_constraint(std::vector<std::pair<int, Matrix>> terms, double rhs);

  // Adds one scalar constraint per Hermitian-basis element E of dim d:
  //   sum_t tr[ adjoint_t(E) X_{block_t} ] = tr[E rhs].
  // adjoint_t is the adjoint of the linear map whose outputs are being
  // pinned, i.e. the constraint says  sum_t L_t(X_{block_t}) = rhs.
  void add_matrix_equality(
      int d, const Matrix& rhs,
      const std::vector<std::pair<int, std::function<Matrix(const Matrix&)>>>& adjoint_terms);

  int total_constraints() const { return static_cast<int>(constraints.size()); }
};

enum class Status { Optimal, Infeasible, MaxIterations };

struct Solution {
  Status status = Status::MaxIterations;
  double primal_value = 0;
  double dual_value = 0;
  double gap = 0;                 // |primal - dual| at exit
  std::vector<Matrix> x;          // primal blocks
  std::vector<Matrix> z;          // dual slacks
  Eigen::VectorXd y;              // dual multipliers
  int iterations = 0;
  std::string message;
};

struct Options {
  double tol = 1e-8;
  int max_iterations = 200;
  double mu_reduction = 0.3;
  double initial_scale = 0.0;     // 0 = automatic
  bool trace = false;
};

Solution solve(const Problem& p, const Options& opts = {});

// Hermitian basis of d x d matrices, in a fixed deterministic order.
std::vector<Matrix> hermitian_basis(int d);

}  // namespace thermocap::sdp

#endif
