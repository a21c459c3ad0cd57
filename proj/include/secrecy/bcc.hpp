#pragma once

#include "secrecy/linalg.hpp"
#include "secrecy/wiretap.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace secrecy::bcc {

/// Transmit covariance split: b0 carries the common message, b1 the first
/// confidential message, the remainder S - b0 - b1 the second one.
struct CovarianceSplit {
  SymMatrix b0;
  SymMatrix b1;
};

/// Additive-noise form of the two-receiver broadcast channel: Y_k = X + Z_k
/// with Z_k ~ N(0, N_k). Obtained from square invertible channel matrices.
struct CanonicalChannel {
  SymMatrix n1;
  SymMatrix n2;
  SymMatrix s;
  bool perturbed_h1 = false;
  bool perturbed_h2 = false;
  double eps_applied = 0.0;
};

struct RateTriple {
  double r0 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  bool r1_clamped = false;  // true when the raw bound was negative
  bool r2_clamped = false;
};

struct KktCertificate {
  SymMatrix m0, m1, m2;
  double lambda1 = 0.0, lambda2 = 0.0;
  double beta1 = 0.0, beta2 = 0.0;
  double r0_target = 0.0;
  std::map<std::string, double> residuals;
  bool pass = false;
  double tol = 1e-4;
};

struct EnhancedNoise {
  SymMatrix n_tilde;
  std::map<std::string, double> residuals;
  bool all_identities_hold = false;
  double identity_tol = 1e-7;
};

struct SolveResult {
  CovarianceSplit split;
  double value = 0.0;
  double beta1 = 0.0;   // multiplier estimates for the two common-rate components
  double beta2 = 0.0;
  double feasibility_violation = 0.0;
  int iterations = 0;
  bool converged = true;
};

struct SurfaceSample {
  double r0_target = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  RateTriple rates;
  CovarianceSplit split;
  bool converged = true;
};

struct RegionSurface {
  std::vector<SurfaceSample> samples;
  int r0_levels = 0;
  int lambda_dirs = 0;
};

struct TraceConfig {
  int r0_levels = 9;
  int lambda_dirs = 17;
  OptimizerConfig opt;
};

/// N_k = H_k^{-1} H_k^{-T}. Ill-conditioned H_k (condition number > 1/eps)
/// are perturbed to H_k + eps*I first; the perturbation is recorded.
CanonicalChannel canonicalize(const Matrix& h1, const Matrix& h2, const SymMatrix& s,
                              double eps = 1e-6);

/// Rate bounds of the three-message region evaluated directly from the
/// channel matrices (no inversion required).
RateTriple rate_bounds(const Matrix& h1, const Matrix& h2, const SymMatrix& s,
                       const CovarianceSplit& split);

/// Same bounds in additive-noise form; agrees with rate_bounds after
/// canonicalize for invertible channels.
RateTriple canonical_rate_bounds(const CanonicalChannel& cc, const CovarianceSplit& split);

/// Common-message rate supported by b0 (min over the two receivers). >= 0.
double common_rate(const CanonicalChannel& cc, const SymMatrix& b0);

/// The two per-receiver components whose minimum is common_rate.
std::array<double, 2> common_rate_components(const CanonicalChannel& cc, const SymMatrix& b0);

/// Confidential rate towards receiver 1 carried by b1 (can be negative).
double confidential_rate_1(const CanonicalChannel& cc, const SymMatrix& b1);

/// Confidential rate towards receiver 2 given (b0, b1) (can be negative).
double confidential_rate_2(const CanonicalChannel& cc, const SymMatrix& b0, const SymMatrix& b1);

Matrix confidential_rate_1_gradient(const CanonicalChannel& cc, const SymMatrix& b1);
Matrix confidential_rate_2_gradient_b0(const CanonicalChannel& cc, const SymMatrix& b0);
Matrix confidential_rate_2_gradient_b1(const CanonicalChannel& cc, const SymMatrix& b1);

/// Largest feasible common rate, attained at b0 = S.
double common_rate_max(const CanonicalChannel& cc);

struct SolveOptions {
  OptimizerConfig opt;
  bool fix_b0 = false;     // pin b0 to its starting value (used for fixed-b0 slices)
  SymMatrix b0_fixed;
};

/// Maximizes lambda1 * confidential_rate_1 + lambda2 * confidential_rate_2
/// over b0, b1 >= 0, b0 + b1 <= S subject to common_rate(b0) >= r0_target.
/// Augmented-Lagrangian treatment of the two common-rate components,
/// projected gradient ascent inside, multi-start.
SolveResult weighted_sum_solve(const CanonicalChannel& cc, double lambda1, double lambda2,
                               double r0_target, const SolveOptions& opts = {});

/// Reconstructs the stationarity multipliers (M0, M1, M2) by least squares
/// restricted to the active subspaces (complementary slackness built in) and
/// reports residuals: stationarity mismatch, PSD-ness, slackness norms and
/// the beta activity conditions. Never throws; pass/fail is data.
KktCertificate kkt_check(const CanonicalChannel& cc, const CovarianceSplit& split, double lambda1,
                         double lambda2, double beta1, double beta2, double r0_target,
                         double tol = 1e-4);

/// Enhanced noise N~ = (N1^{-1} + M1/(lambda1+lambda2))^{-1}, with the
/// order relations and determinant/resolvent/ratio/rate identities verified
/// and their residuals recorded.
EnhancedNoise enhance_noise(const CanonicalChannel& cc, const KktCertificate& cert,
                            const CovarianceSplit& split);

/// Samples the Pareto surface over a grid of common-rate levels and weight
/// directions; every sample stores its achieving split.
RegionSurface region_trace(const Matrix& h1, const Matrix& h2, const SymMatrix& s,
                           const TraceConfig& grid = {});

/// F = B H1^T (I + H1 B H1^T)^{-1} H1, the precoder used by the
/// superposition construction.
Matrix precoding_matrix(const SymMatrix& b, const Matrix& h1);

/// Frobenius projection of (b0, b1) onto {b0 >= 0, b1 >= 0, b0 + b1 <= s}
/// by Dykstra alternating projections.
CovarianceSplit project_split(const CovarianceSplit& split, const SymMatrix& s,
                              int max_rounds = 50, double movement_tol = 1e-10);

}  // namespace secrecy::bcc
