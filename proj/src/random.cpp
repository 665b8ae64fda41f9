#include "thermocap/random.hpp"

#include <cmath>

namespace thermocap {

double Rng::uniform() {
  // 53-bit mantissa from the top bits of the 64-bit state
  return (gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0;
  do { u1 = uniform(); } while (u1 <= 0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

int Rng::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(gen_() % span);
}

Matrix Rng::ginibre(int rows, int cols) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = cnormal();
  return g;
}

Matrix Rng::hermitian(int d) {
  Matrix g = ginibre(d, d);
  return 0.5 * (g + g.adjoint());
}

Matrix Rng::unitary(int d) {
  Matrix q = isometry(d, d);
  return q;
}

Matrix Rng::isometry(int rows, int cols) {
  Matrix g = ginibre(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  Matrix r = qr.matrixQR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
  // fix phases so the distribution is Haar and the result deterministic
  for (int j = 0; j < cols; ++j) {
    Complex rjj = r(j, j);
    if (std::abs(rjj) > 0) q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

Vector Rng::pure_state(int d) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = cnormal();
  v.normalize();
  return v;
}

Matrix Rng::density_matrix(int d, int rank) {
  if (rank <= 0 || rank > d) rank = d;
  Matrix g = ginibre(d, rank);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

Matrix Rng::real_pure_density(int d) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = normal();
  v.normalize();
  return v * v.adjoint();
}

}  // namespace thermocap
