#ifndef THERMOCAP_ENTROPIES_HPP
#define THERMOCAP_ENTROPIES_HPP

#include "thermocap/linalg.hpp"

#include <limits>
#include <vector>

namespace thermocap {

// All entropies in nats.
struct EntropyResult {
  double value = 0;
  bool support_warning = false;  // set when a rank-deficiency path was taken

  bool infinite() const { return std::isinf(value); }
  static EntropyResult infinity() {
    return {std::numeric_limits<double>::infinity(), true};
  }
};

double von_neumann(const Matrix& rho);
double conditional_entropy(const Matrix& rho_ab, const std::vector<int>& dims);

// D(rho || gamma) = tr[rho (ln rho - ln gamma)]; +infinity sentinel when
// supp(rho) is not contained in supp(gamma).
EntropyResult relative_entropy(const Matrix& rho, const Matrix& gamma);

// D_M(rho || tau) = -tr[rho ln tau]; support sentinel as above.
EntropyResult measured_relative(const Matrix& rho, const Matrix& tau);

enum class HypTestMethod { NeymanPearson, Sdp };

struct HypTestResult {
  double d_h = 0;                       // D_H^eta
  double d_h_ln = 0;                    // D_h^eta = D_H^eta - ln eta
  Matrix optimal_q;                     // 0 <= Q <= I, tr[Q rho] >= eta
  double mu = 0;                        // dual certificate (mu, X)
  Matrix dual_x;
  bool infinite = false;                // admissible Q with tr[Q sigma] = 0
};

// Hypothesis-testing relative entropies:
//   exp(-D_H^eta) = eta^{-1} min tr[Q sigma]  over 0 <= Q <= I, tr[Q rho] >= eta.
// Throws std::invalid_argument for eta outside (0, tr rho].
HypTestResult hypothesis_testing(const Matrix& rho, const Matrix& sigma, double eta,
                                 HypTestMethod method = HypTestMethod::NeymanPearson);

}  // namespace thermocap

#endif
