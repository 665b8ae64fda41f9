#ifndef THERMOCAP_RANDOM_HPP
#define THERMOCAP_RANDOM_HPP

#include "thermocap/linalg.hpp"

#include <cstdint>
#include <random>

namespace thermocap {

// Seeded generator with hand-rolled distributions so that results do not
// depend on the standard library's implementation of normal_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  double uniform();                 // [0, 1)
  double normal();                  // Box-Muller
  int uniform_int(int lo, int hi);  // inclusive bounds
  Complex cnormal() { return Complex(normal(), normal()); }

  Matrix ginibre(int rows, int cols);
  Matrix hermitian(int d);            // GUE-like, entries O(1)
  Matrix unitary(int d);              // Haar (QR with phase fix)
  Matrix isometry(int rows, int cols);
  Vector pure_state(int d);
  Matrix density_matrix(int d, int rank = 0);  // rank 0 = full rank
  Matrix real_pure_density(int d);             // real amplitudes

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace thermocap

#endif
