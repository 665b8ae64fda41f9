#ifndef THERMOCAP_PROTOCOLS_HPP
#define THERMOCAP_PROTOCOLS_HPP

#include "thermocap/channel.hpp"
#include "thermocap/thermo.hpp"
#include "thermocap/typicality.hpp"

#include <optional>
#include <vector>

namespace thermocap::protocols {

// --- dilation utilities ------------------------------------------------------

enum class CompletionMode { Plain, EnergyPreserving, EnergyPreservingNoFlag };

struct UnitaryCompletion {
  Matrix unitary;          // on X (x) qubit (flagged modes) or on X (no-flag)
  double unitarity_residual = 0;
  double energy_commutator = 0;   // |[U, H_total]|_inf for the energy modes
  double block_recovery = 0;      // |<0|U|0> - W|_inf (flagged modes)
};

// Dilate a contraction W (|W| <= 1) to a unitary.  Energy modes require
// [W, H] = 0; the no-flag mode extends W F^{-1/2} P_nu by the identity,
// with nu = 2 sqrt(eps).
UnitaryCompletion complete_to_unitary(const Matrix& w, CompletionMode mode,
                                      const Matrix& h = Matrix(), double eps = 0.01);

struct UtilityLemmaReport {
  double pinching_worst = 0;       // worst violation of the pinching inequality
  double gentle_worst = 0;         // worst P - sqrt(2 delta) overshoot
  double controlled_worst = 0;     // worst |W^dag W| - 1 overshoot
  int samples = 0;
};

// Randomized verification of the pinching, gentle-measurement, and
// POVM-controlled-unitary inequalities.
UtilityLemmaReport utility_lemma_checks(int samples = 100, std::uint64_t seed = 0);

// --- position-based decoding -------------------------------------------------

struct PgmDecoder {
  std::vector<Matrix> omega;  // normalized POVM elements
  Matrix remainder;           // I - sum omega
};

// Omega^j = Lambda^{-1/2} Lambda^j Lambda^{-1/2} with the support-restricted
// inverse square root of Lambda = sum Lambda^j.
PgmDecoder pretty_good_measurement(const std::vector<Matrix>& lambda);

// --- conditional erasure -----------------------------------------------------

struct ErasureInstance {
  Matrix test;            // P_SM, 0 <= P <= I
  int dim_s = 2;
  int dim_m = 2;
  int battery_rank = 2;   // e^m ancilla copies
  double kappa = 0;       // 1 - min tr[P rho] over the admissible set
  double kappa_prime = 0; // e^m max tr[P (gamma_S (x) rho_M)]
  std::optional<Matrix> h_s;  // Hamiltonians (default trivial)
  std::optional<Matrix> h_m;
  double beta = 1.0;
  std::vector<Matrix> admissible;  // sampled admissible rho_SM
};

struct ErasureUnitaryResult {
  Matrix unitary;              // W on S (x) M (x) A^{e^m} (x) J
  int dim_j = 2;
  double min_overlap = 1;      // worst Re<tau-hat^j, 0| W |rho, gamma, j>
  double overlap_bound = 0;    // 1 - (2 kappa + 4 kappa')
  double energy_commutator = 0;
  double unitarity_residual = 0;
};

// Explicit conditional-erasure unitary: controlled swaps, then the decoder
// shift, completed to a (energy-conserving when Hamiltonians are present)
// unitary on the doubled J register.
ErasureUnitaryResult conditional_erasure_unitary(const ErasureInstance& inst);

struct ErasureProcessResult {
  std::vector<Matrix> kraus_effective;  // T_SM of the thermal operation
  double min_fidelity = 1;              // worst F(T(rho_SMR), gamma_S (x) rho_MR)
  double fidelity_bound = 0;            // 1 - (2 kappa + 4 kappa')
  double overlap_proxy = 1;             // Uhlmann lower bound from the PGM overlaps
  double gibbs_residual = 0;            // |R(gamma_SMJ) - gamma_SMJ|_inf
  WorkLedger ledger;
  bool materialized = true;  // false when only the overlap route was feasible
};

ErasureProcessResult conditional_erasure_thermal_op(const ErasureInstance& inst);

// PGM overlaps tr[Omega^j tau-hat^j] evaluated in the subspace spanned by
// the ranges of the Lambda^j; feasible far beyond the dense guard.
std::vector<double> erasure_overlaps_restricted(const ErasureInstance& inst,
                                                const Matrix& rho_sm);

// --- single-shot protocols ---------------------------------------------------

struct SingleShotErasureResult {
  double d_h = 0;            // D_h^{1-eps}(rho_SM || gamma_S (x) rho_M)
  int battery_rank = 1;      // e^m
  int ideal_rank = 1;        // before the simulation cap
  double work = 0;           // -m, in nats
  double work_bound = 0;     // -D_h + ln(2/eps)
  double fidelity = 0;       // achieved (or overlap proxy)
  double fidelity_bound = 0; // 1 - 6 eps
  WorkLedger ledger;
  bool used_overlap_proxy = false;
};

SingleShotErasureResult single_shot_erasure(const Matrix& rho_sm, const Matrix& h_s,
                                            const Matrix& h_m, double beta, double eps,
                                            int dim_s, int dim_m);

struct SingleShotCovariantResult {
  double work_total = 0;
  double work_bound = 0;     // -D_h + ln tr e^{-beta H_X} + ln(2/eps)
  double fidelity = 0;
  double fidelity_bound = 0;     // 1 - (2 kappa + 4 kappa') as realized
  bool hypothesis_satisfied = true;  // D_h >= ln(2/eps)
  WorkLedger ledger;
};

SingleShotCovariantResult single_shot_covariant_process(const QuantumChannel& e,
                                                        const Matrix& h_x, double beta,
                                                        const Matrix& sigma_x, double eps);

// --- i.i.d. protocols --------------------------------------------------------

struct Construction3Result {
  int n = 1;
  double capacity = 0;
  int battery_rank = 1;       // e^m realized
  double ideal_m = 0;         // n(x - beta F_E - 4 delta - eta)
  double work_rate = 0;       // (1/n)(w_i - w_f)
  double kappa = 0;
  double kappa_prime = 0;
  double fidelity_proxy = -1; // PGM overlap bound; -1 when out of reach
  double fidelity_bound = 0;  // 1 - (2 kappa + 4 kappa')
  double definetti_distance = -1;
  WorkLedger ledger;
};

Construction3Result construction3_assembly(const QuantumChannel& e, const Matrix& h_x,
                                           double beta, int n, double delta,
                                           std::uint64_t seed = 0);

struct NcopyErasureResult {
  int n = 1;
  double s = 0;
  int battery_rank = 1;
  double ideal_m = 0;         // n(ln d_S - s - 3 delta)
  double kappa = 0;           // worst measured over the sampled states
  double kappa_prime = 0;
  double fidelity_proxy = 0;  // Uhlmann overlap bound, worst sampled state
  double fidelity_bound = 0;
  WorkLedger ledger;
};

// App-style n-copy erasure with trivial Hamiltonians; admissible states are
// rho_SM^{(x) n} with H(S|M) <= s.
NcopyErasureResult ncopy_erasure_trivial_h(double s, double delta, int n, int battery_rank,
                                           const std::vector<Matrix>& samples_sm, int dim_s,
                                           int dim_m);

// --- Hamiltonian flattening and the fixed-input implementation ---------------

struct FlattenResult {
  Matrix isometry;           // U_{AC -> BC}
  int dim_c = 1;             // ladder dimension consumed
  int ladder_l = 1;          // coherence length L
  int ladder_offset = 0;     // l0
  double energy_commutator = 0;
  double worst_distance = 0;  // max P(output, rho_BR) over probes
};

FlattenResult flatten_hamiltonian(const Matrix& h_a, double h_lo, double h_hi, double theta,
                                  double x_unit, int probes = 20, std::uint64_t seed = 0);

struct IidFixedInputResult {
  int n = 1;
  double per_copy_work = 0;
  double free_energy_difference = 0;  // F(E(sigma), H') - F(sigma, H)
  double error = 0;                   // purified distance to the ideal output
  double error_budget = 0;            // 3 theta + measured exponential terms
  int dim_c1 = 0, dim_c2 = 0;         // coherence ladder dims
  double coherence_constant = 0;      // d_C theta^2 / (n delta)
  WorkLedger ledger;
};

IidFixedInputResult iid_fixed_input_implementation(const QuantumChannel& e,
                                                   const Matrix& sigma, const Matrix& h_x,
                                                   const Matrix& h_xp, double beta, int n,
                                                   double delta, double theta);

}  // namespace thermocap::protocols

#endif
