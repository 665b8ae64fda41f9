#ifndef THERMOCAP_CAPACITY_HPP
#define THERMOCAP_CAPACITY_HPP

#include "thermocap/channel.hpp"
#include "thermocap/thermo.hpp"

#include <optional>
#include <vector>

namespace thermocap {

struct CapacityOptions {
  double grad_tol = 1e-8;
  int max_iterations = 5000;
  int restarts = 5;
  std::uint64_t seed = 0;
  std::optional<Matrix> warm_start;
};

struct CapacityResult {
  double value = 0;                 // T(E) in nats
  Matrix maximizer;                 // optimal input state
  double stationarity_residual = 0; // |grad - mu I|_inf on the support
  int iterations = 0;
  bool converged = false;
};

// T(E) = max_sigma D(E(sigma) || Gamma_out) - D(sigma || Gamma_in), computed
// by entropic mirror ascent with a fixed-point accelerator.
CapacityResult thermodynamic_capacity(const QuantumChannel& e, const GammaSpec& gamma_in,
                                      const GammaSpec& gamma_out,
                                      const CapacityOptions& opts = {});

// Objective and gradient at a full-rank state (helpers shared with tests).
double capacity_objective(const QuantumChannel& e, const GammaSpec& gin,
                          const GammaSpec& gout, const Matrix& sigma);
Matrix capacity_gradient(const QuantumChannel& e, const GammaSpec& gin,
                         const GammaSpec& gout, const Matrix& sigma);

struct AdditivityReport {
  double joint = 0;     // T(E (x) F)
  double split = 0;     // T(E) + T(F)
  double gap = 0;
};
AdditivityReport additivity_check(const QuantumChannel& e, const QuantumChannel& f,
                                  const GammaSpec& gin_e, const GammaSpec& gout_e,
                                  const GammaSpec& gin_f, const GammaSpec& gout_f,
                                  const CapacityOptions& opts = {});

// -T(E) with trivial Gamma on both sides: min_sigma H(E(sigma)) - H(sigma).
double entropy_gain(const QuantumChannel& e, const CapacityOptions& opts = {});

struct CohRelResult {
  double value = 0;          // -ln alpha (work cost is -value)
  Matrix optimal_choi;       // Choi of the optimal T
  double epsilon = 0;
  double fidelity_achieved = 0;
  double max_constraint_residual = 0;  // re-verified outside the solver
  int sdp_iterations = 0;
  double sdp_gap = 0;
};

// Coherent relative entropy: min alpha over CP TNI maps T with
// T(Gamma_in) <= alpha Gamma_out and P(T(sigma_XR), E(sigma_XR)) <= eps,
// where |sigma>_XR = sigma^{1/2} |Phi>.
CohRelResult coherent_relative_entropy(const QuantumChannel& e, const Matrix& sigma_x,
                                       const GammaSpec& gamma_in, const GammaSpec& gamma_out,
                                       double eps, double tol = 1e-9);

// min w such that T(Gamma_in) <= e^w Gamma_out and (1/2)|T - E|_dia <= eps.
double universal_work_cost(const QuantumChannel& e, const GammaSpec& gamma_in,
                           const GammaSpec& gamma_out, double eps, double tol = 1e-9);

struct AepPoint {
  int n = 0;
  double value_per_copy = 0;
};
struct AepScan {
  std::vector<AepPoint> points;
  double limit = 0;  // D(sigma||Gamma_in) - D(E(sigma)||Gamma_out)
};
AepScan aep_scan(const QuantumChannel& e, const Matrix& sigma, const GammaSpec& gin,
                 const GammaSpec& gout, double eps, int n_max);

}  // namespace thermocap

#endif
