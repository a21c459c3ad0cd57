#include "secrecy/rng.hpp"

#include <Eigen/QR>

namespace secrecy {

Matrix haar_orthogonal(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix signs so the distribution is Haar rather than QR-convention dependent.
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

SymMatrix random_spectrum(Eigen::Index dim, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Matrix q = haar_orthogonal(dim, rng);
  Vector ev(dim);
  for (Eigen::Index i = 0; i < dim; ++i) ev(i) = unif(rng);
  return SymMatrix(q * ev.asDiagonal() * q.transpose());
}

}  // namespace secrecy
