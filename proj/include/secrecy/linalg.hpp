#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace secrecy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute eigenvalue tolerance used by the PSD predicates unless overridden.
inline constexpr double kPsdTol = 1e-9;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested computation has no feasible answer (e.g. a rate target above
/// the achievable maximum, or an infeasible covariance split).
class InfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPositiveDefinite : public NumericalError {
 public:
  explicit NotPositiveDefinite(double min_eig)
      : NumericalError("matrix is not positive definite (min eigenvalue " +
                       std::to_string(min_eig) + ")"),
        min_eig_(min_eig) {}
  double min_eigenvalue() const { return min_eig_; }

 private:
  double min_eig_;
};

/// Dense symmetric matrix. Inputs are symmetrized as (M + M^T)/2 on
/// construction so file round-trips cannot introduce asymmetry.
class SymMatrix {
 public:
  SymMatrix() : m_(Matrix::Zero(1, 1)) {}
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix zero(Eigen::Index dim);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

Matrix symmetrize(const Matrix& m);

double min_eigenvalue(const SymMatrix& m);

/// True iff the smallest eigenvalue of m is >= -tol.
bool is_psd(const SymMatrix& m, double tol = kPsdTol);

/// PSD order: a <= b iff b - a is positive semidefinite.
bool psd_leq(const SymMatrix& a, const SymMatrix& b, double tol = kPsdTol);

/// log(det(m)) in nats via Cholesky (sum of log diagonal factors).
/// Throws NotPositiveDefinite (carrying the min eigenvalue) for non-PD input.
double logdet(const SymMatrix& m);

/// Symmetric PSD square root; eigenvalues are clamped at zero before rooting.
/// Throws if m is non-PSD beyond tol.
SymMatrix sqrt_psd(const SymMatrix& m, double tol = kPsdTol);

struct GenEigPair {
  double value;
  Vector vector;
};

/// All pairs (lambda, v) with a v = lambda b v, b positive definite.
/// Eigenvalues sorted descending, eigenvectors b-orthonormal.
std::vector<GenEigPair> gen_eig(const SymMatrix& a, const SymMatrix& b);

/// Projection onto the PSD cone (negative eigenvalues clipped to zero).
SymMatrix psd_part(const SymMatrix& m);

/// Eigenvalues clipped into [lo, hi].
SymMatrix clip_spectrum(const SymMatrix& m, double lo, double hi);

}  // namespace secrecy
