#ifndef THERMOCAP_CHANNEL_HPP
#define THERMOCAP_CHANNEL_HPP

#include "thermocap/linalg.hpp"

#include <optional>
#include <vector>

namespace thermocap {

enum class TpClass { TracePreserving, TraceNonIncreasing };

// Completely positive map in Kraus form, with a cached Choi matrix.
// Choi convention: J = sum_{ij} |i><j|_R  (x)  E(|i><j|)  on R (x) out,
// R ~= in, built from the non-normalized reference ket Phi = sum_k |kk>.
class QuantumChannel {
 public:
  QuantumChannel(int dim_in, int dim_out, std::vector<Matrix> kraus,
                 TpClass tp = TpClass::TracePreserving);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  TpClass tp_class() const { return tp_; }
  const Matrix& choi() const { return choi_; }

  Matrix apply(const Matrix& rho) const;
  // Apply to the listed factors of a composite state (identity elsewhere).
  Matrix apply_on(const Matrix& rho, const std::vector<int>& dims,
                  const std::vector<int>& pos) const;
  Matrix apply_adjoint(const Matrix& z) const;

  QuantumChannel adjoint_map() const;         // E^dagger as a CP map
  QuantumChannel tensor(const QuantumChannel& other) const;
  QuantumChannel power(int n) const;

  static QuantumChannel identity(int d);
  static QuantumChannel replacement(int dim_in, const Matrix& out_state);
  static QuantumChannel unitary(const Matrix& u);
  static QuantumChannel depolarizing(int d, double p);
  static QuantumChannel dephasing(int d, double p = 1.0);
  static QuantumChannel amplitude_damping(double p);
  static QuantumChannel
  from_choi(const Matrix& j, int dim_in, int dim_out);  // kraus_from_choi

 private:
  int dim_in_, dim_out_;
  std::vector<Matrix> kraus_;
  TpClass tp_;
  Matrix choi_;
};

Matrix choi_from_kraus(const QuantumChannel& c);

struct StinespringDilation {
  Matrix isometry;  // (dim_out * dim_env) x dim_in, output ordering out (x) env
  int dim_env = 1;
};

// V with E(rho) = tr_env[V rho V^dagger]; dim_env = Kraus rank.
StinespringDilation stinespring(const QuantumChannel& c);

struct CovariantDilation {
  Matrix unitary;     // on X (x) E
  Matrix h_env;       // environment Hamiltonian
  int zero_index = 0; // basis index of the zero-energy environment state
  int dim_env = 1;
};

// True iff the Choi matrix commutes with H^T (x) I - I (x) H within tol.
bool is_time_covariant(const QuantumChannel& c, const Matrix& h_x, double tol = 1e-9);

// Energy-conserving dilation of a time-covariant channel X -> X:
// E(rho) = tr_E[ V (rho (x) |0><0|_E) V^dagger ], V (H_X + H_E) V^dagger = H_X + H_E.
// Throws std::invalid_argument if the channel is not covariant within tol.
CovariantDilation covariant_stinespring(const QuantumChannel& c, const Matrix& h_x,
                                        double tol = 1e-9);

// Half diamond-norm distance via the semidefinite program on the Choi
// difference; channels must share dims.
double diamond_distance(const QuantumChannel& a, const QuantumChannel& b, double tol = 1e-9);
// Same for a raw Hermitian Choi matrix (Hermiticity-preserving map).
double half_diamond_norm_choi(const Matrix& j_delta, int dim_in, int dim_out,
                              double tol = 1e-9);

}  // namespace thermocap

#endif
