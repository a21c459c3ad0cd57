#pragma once

#include "secrecy/linalg.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace secrecy {

/// Real channel matrices towards the legitimate receiver and the eavesdropper
/// (or receivers 1 and 2). Both act on the same transmit vector.
struct ChannelPair {
  Matrix h_r;
  Matrix h_e;

  ChannelPair(Matrix hr, Matrix he);
  Eigen::Index transmit_dim() const { return h_r.cols(); }
};

/// Input power constraint: either a PSD covariance cap S or a trace budget P.
class PowerConstraint {
 public:
  static PowerConstraint matrix_s(SymMatrix s);
  static PowerConstraint trace_p(double p);

  bool is_matrix() const { return std::holds_alternative<SymMatrix>(v_); }
  const SymMatrix& s() const { return std::get<SymMatrix>(v_); }
  double p() const { return std::get<double>(v_); }

 private:
  PowerConstraint() = default;
  std::variant<SymMatrix, double> v_;
};

struct OptimizerConfig {
  int n_starts = 8;          // random starts, in addition to the 0 and full-power starts
  int max_iters = 5000;
  double grad_tol = 1e-8;    // projected-gradient residual
  std::uint64_t seed = 0;
  int trace_outer_iters = 120;  // outer iterations for trace-constraint sweeps
};

/// Convex region in the nonnegative quadrant, vertices counterclockwise.
struct RegionPolygon {
  std::vector<std::array<double, 2>> vertices;
  std::array<std::string, 2> axis_labels{"x", "y"};
};

struct SecrecyCapacityResult {
  double value = 0.0;  // nats
  SymMatrix b_star;
  int iterations = 0;
  bool converged = true;
};

/// (1/2) log det(I + h S h^T), the point-to-point rate in nats.
double capacity(const Matrix& h, const SymMatrix& s);

/// Difference of the receiver and eavesdropper log-det terms at covariance b.
double secrecy_objective(const ChannelPair& ch, const SymMatrix& b);

/// Gradient of secrecy_objective with respect to b (symmetric matrix,
/// defined through directional derivatives tr(G D)).
Matrix secrecy_objective_gradient(const ChannelPair& ch, const SymMatrix& b);

/// Maximizes secrecy_objective over 0 <= B <= S by projected gradient ascent
/// on B = S^{1/2} M S^{1/2} with spectral clipping of M into [0, I],
/// multi-start. Singular S is handled on range(S).
SecrecyCapacityResult secrecy_capacity(const ChannelPair& ch, const SymMatrix& s,
                                       const OptimizerConfig& cfg = {});

/// Rate-equivocation region: all (R, Re) with Re <= min(R, Cs), R <= C.
RegionPolygon ce_region(const ChannelPair& ch, const PowerConstraint& pc,
                        const OptimizerConfig& cfg = {});

/// Private-confidential region: all (Rp, Rs) with Rs <= Cs, Rs + Rp <= C.
RegionPolygon pc_region(const ChannelPair& ch, const PowerConstraint& pc,
                        const OptimizerConfig& cfg = {});

/// Shear map (Rp, Rs) -> (R, Re) = (Rp + Rs, Rs) applied vertex-wise.
RegionPolygon to_rate_equivocation(const RegionPolygon& private_confidential);

struct TraceSweepEntry {
  double w1 = 0.0;
  double w2 = 0.0;
  SymMatrix s;
  double c = 0.0;
  double cs = 0.0;
  bool converged = true;
};

/// For each weight pair, maximizes w1*C(S) + w2*Cs(S) over S >= 0,
/// Tr(S) <= p. Returns one boundary sample per weight pair.
std::vector<TraceSweepEntry> trace_sweep(const ChannelPair& ch, double p,
                                         const std::vector<std::array<double, 2>>& weights,
                                         const OptimizerConfig& cfg = {});

/// Default 33 weight pairs on the simplex for trace-constraint sweeps.
std::vector<std::array<double, 2>> default_sweep_weights(int count = 33);

namespace geometry {

/// Convex hull (counterclockwise, collinear points dropped) of 2-D points.
std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts);

}  // namespace geometry

}  // namespace secrecy
