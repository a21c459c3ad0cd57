#include "secrecy/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace secrecy {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatch("SymMatrix requires a square matrix of dim >= 1, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  m_ = symmetrize(m);
}

SymMatrix SymMatrix::identity(Eigen::Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::zero(Eigen::Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

SymMatrix SymMatrix::diagonal(const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal()));
}

double min_eigenvalue(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_psd(const SymMatrix& m, double tol) { return min_eigenvalue(m) >= -tol; }

bool psd_leq(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("psd_leq: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
  return is_psd(SymMatrix(b.mat() - a.mat()), tol);
}

double logdet(const SymMatrix& m) {
  Eigen::LLT<Matrix> llt(m.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(min_eigenvalue(m));
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

SymMatrix sqrt_psd(const SymMatrix& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  const Vector& ev = es.eigenvalues();
  if (ev.minCoeff() < -tol) {
    throw NumericalError("sqrt_psd: matrix not PSD within tolerance (min eigenvalue " +
                         std::to_string(ev.minCoeff()) + ")");
  }
  Vector root = ev.cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose());
}

std::vector<GenEigPair> gen_eig(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("gen_eig: dimension mismatch");
  }
  Eigen::LLT<Matrix> llt(b.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(min_eigenvalue(b));
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(a.mat(), b.mat());
  std::vector<GenEigPair> pairs;
  pairs.reserve(static_cast<std::size_t>(a.dim()));
  // Eigen returns ascending order; flip to descending.
  for (Eigen::Index i = a.dim() - 1; i >= 0; --i) {
    pairs.push_back(GenEigPair{es.eigenvalues()(i), es.eigenvectors().col(i)});
  }
  return pairs;
}

SymMatrix psd_part(const SymMatrix& m) { return clip_spectrum(m, 0.0, std::numeric_limits<double>::infinity()); }

SymMatrix clip_spectrum(const SymMatrix& m, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  Vector ev = es.eigenvalues().cwiseMax(lo).cwiseMin(hi);
  return SymMatrix(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace secrecy
