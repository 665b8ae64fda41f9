#ifndef THERMOCAP_THERMO_HPP
#define THERMOCAP_THERMO_HPP

#include "thermocap/channel.hpp"
#include "thermocap/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace thermocap {

// Positive operator Gamma, optionally carrying (H, beta) provenance with
// Gamma = exp(-beta H).
struct GammaSpec {
  Matrix gamma;
  std::optional<Matrix> hamiltonian;
  double beta = 1.0;

  static GammaSpec from_hamiltonian(const Matrix& h, double beta);
  static GammaSpec abstract(const Matrix& g);
  static GammaSpec trivial(int d) { return abstract(Matrix::Identity(d, d)); }

  int dim() const { return static_cast<int>(gamma.rows()); }
  bool thermodynamic() const { return hamiltonian.has_value(); }
};

// Gibbs state Gamma / tr[Gamma].
Matrix gibbs(const GammaSpec& g);

// Information battery: state tau = P/r with P a rank-r projector on the
// first r basis levels of a d-level register with trivial Hamiltonian.
struct BatteryState {
  int dim = 1;
  int rank = 1;

  double charge() const;  // w = ln d - ln r
  Matrix state() const;
  Matrix support() const;
};

struct WorkLedger {
  struct Entry {
    std::string label;
    double w_before = 0;
    double w_after = 0;
  };
  std::vector<Entry> entries;

  void record(const std::string& label, double w_before, double w_after);
  double total() const;  // sum of (w_before - w_after), in nats
  std::string to_json_lines() const;
};

// T(.) = tr_W[ P_out Phi( (.) (x) tau_in ) ]  for Phi acting on X (x) W.
QuantumChannel effective_work_process(const QuantumChannel& phi, int dim_x,
                                      const BatteryState& tau_in, const BatteryState& tau_out);

// Least w with T(Gamma_in) <= e^w Gamma_out; +infinity when the support
// condition fails.
double gibbs_sub_preservation_margin(const QuantumChannel& t, const GammaSpec& gamma_in,
                                     const GammaSpec& gamma_out);
double gibbs_sub_preservation_margin(const Matrix& t_of_gamma, const Matrix& gamma_out);

// Phi(.) = T(tr_W[P^m .]) (x) tau^{m'}; requires m - m' >= margin(T) - 1e-9.
QuantumChannel lift_to_gpm(const QuantumChannel& t, const GammaSpec& gamma_in,
                           const GammaSpec& gamma_out, const BatteryState& tau_in,
                           const BatteryState& tau_out);

// Work cost of turning a thermal state into the pure eigenstate at energy E:
// beta E + ln tr[e^{-beta H}].
double thermal_to_pure_cost(const Matrix& h, double energy, double beta);

}  // namespace thermocap

#endif
