#ifndef THERMOCAP_TYPICALITY_HPP
#define THERMOCAP_TYPICALITY_HPP

#include "thermocap/channel.hpp"
#include "thermocap/schur_weyl.hpp"
#include "thermocap/thermo.hpp"

#include <vector>

namespace thermocap::typicality {

struct RelTypicalProjector {
  Matrix projector;   // on d^n
  double d_m = 0;     // -tr[rho ln tau]
  double eta = 0;     // Hoeffding exponent 2 delta^2 / range^2
  double weight = 0;  // tr[Pi rho^{(x) n}]
};

// Projector onto the eigenvector sequences of tau^{(x) n} whose mean
// -ln(eigenvalue) lies within delta of -tr[rho ln tau].
RelTypicalProjector relative_typical_projector(const Matrix& rho, const Matrix& tau, int n,
                                               double delta);

struct ConditionalTypicalProjector {
  Matrix projector;     // on (dA dB)^n, interleaved (a1 b1 a2 b2 ...)
  double c_measured = 0;  // smallest c with tr_A[P] <= c e^{n(s+2delta)} I
  int terms = 0;          // number of (lambda, lambda') pairs in the sum
};

// P^{s,delta} = sum over H(lambda)-H(lambda') <= s+2delta of
// (I (x) Pi^{lambda'}_B) Pi^lambda_AB.
ConditionalTypicalProjector universal_conditional_typical_projector(double s, double delta,
                                                                    int n, int d_a, int d_b);

enum class SmootherFlavor { Smoother, Projector };

struct SmoothingOperator {
  Matrix op;  // on (dA dB)^n, interleaved factor order
  double x = 0;
  double delta = 0;
  int n = 1;
  int d_a = 1, d_b = 1;
  SmootherFlavor flavor = SmootherFlavor::Smoother;

  struct Tuple {
    double k = 0, l = 0;
    int lambda_index = -1, mu_index = -1;
  };
  std::vector<Tuple> admissible;  // audit record of the index sets
  std::vector<schur::YoungDiagram> lambdas;
  std::vector<schur::YoungDiagram> mus;

  Matrix gamma_ab;  // inputs retained for certificate checks
  Matrix gamma_b;
};

// M^{x,delta} = sum over k - H(lambda) - l + H(mu) >= x - 4 delta of
// S^l Pi^mu Pi^lambda R^k, with R (S) the spectral POVM of Gamma_AB
// (Gamma'_B) tensor powers.  Zero eigenvalues of either Gamma are handled
// by support-projector conjugation of the operator built from the
// padded Gammas.
SmoothingOperator universal_smoothing_operator(const GammaSpec& gamma_ab,
                                               const GammaSpec& gamma_b, double x,
                                               double delta, int n, int d_a, int d_b);

struct SmootherCertificates {
  double norm = 0;           // |M^dag M|_inf  (property (i): <= 1)
  double min_overlap = 0;    // worst Re tr[M rho^{(x) n}] over the sampled states
  double c_measured = 0;     // property (iii) constant
  bool support_ok = true;    // tr_A[M Gamma M^dag] inside supp Gamma'
  double idempotency = 0;    // |M^2 - M|_inf
  double comm_gamma_ab = 0;  // |[M, Gamma_AB^n]|_inf
  double comm_gamma_b = 0;   // |[M, Gamma_B'^n]|_inf
};

// Property (i) and (iii) are evaluated exactly; property (ii) on the given
// sample of admissible single-copy states.
SmootherCertificates check_smoothing_operator(const SmoothingOperator& m,
                                              const std::vector<Matrix>& admissible_states);

struct Construction2Result {
  Matrix total_op;            // W = M (V permuted)^{(x) n} : X^n -> (E X')^n
  std::vector<Matrix> kraus;  // Kraus of T(.) = tr_{E^n}[W . W^dag]
  int dim_env = 1;
  int n = 1;
  double capacity = 0;        // T(E) used for x = -T(E)
  double delta = 0;
  double tni_excess = 0;      // max(0, |W^dag W|_inf - 1)
  double c_measured = 0;      // Gamma-domination constant
  double rate_certificate = 0;  // (1/n)(n(T+4delta) + ln c)
  double definetti_distance = -1;  // trace distance on the de Finetti input
  double diamond_exact = -1;       // exact half-diamond distance (n <= 2)
  double worst_iid_gap = 0;        // 1 - min_sigma Re<sigma^n|V^dag W|sigma^n>
};

Construction2Result construction2_map(const QuantumChannel& e, const GammaSpec& gamma_in,
                                      const GammaSpec& gamma_out, int n, double delta,
                                      std::uint64_t seed = 0);

struct AepMapResult {
  std::vector<Matrix> kraus;  // of T : X^n -> X'^n
  double exponent = 0;        // D(sigma||Gamma_in) - D(E(sigma)||Gamma_out)
  double gamma_bound_excess = 0;  // max(0, lambda_max(T(Gamma) - e^{-n(exp-4d)} Gamma'))
  double gamma_slack = 0;         // smallest s with T(Gamma) <= e^{-n(exp-4d)+s} Gamma'
  double closeness = 0;           // P(T(sigma^{n}_{XR}), rho^{(x) n})
  double eta_prime = 0;           // min Hoeffding exponent / 4
  bool closeness_bound_ok = false;  // closeness <= 4 exp(-n eta')
};

AepMapResult aep_protocol_map(const QuantumChannel& e, const Matrix& sigma,
                              const GammaSpec& gamma_in, const GammaSpec& gamma_out, int n,
                              double delta);

}  // namespace thermocap::typicality

#endif
