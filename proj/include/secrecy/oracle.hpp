#pragma once

#include "secrecy/bcc.hpp"
#include "secrecy/wiretap.hpp"

#include <array>
#include <cstdint>
#include <functional>

namespace secrecy::oracle {

struct OracleConfig {
  int n_samples = 20000;
  int refine_rounds = 200;
  std::uint64_t seed = 0;
  double tol = 1e-3;
};

/// Independent maximizer of the secrecy objective over 0 <= B <= S:
/// random spectral sampling of B = S^{1/2} M S^{1/2} followed by Nelder-Mead
/// refinement of the best candidates. Reproducible given (seed, cfg).
double cs_bruteforce(const ChannelPair& ch, const SymMatrix& s, const OracleConfig& cfg = {});

/// Closed-form secrecy capacity via the generalized eigenvalues of
/// (I + S^{1/2} Hr^T Hr S^{1/2}, I + S^{1/2} He^T He S^{1/2}):
/// half the sum of log of the eigenvalues above one. Requires S PD.
double cs_closed_form(const ChannelPair& ch, const SymMatrix& s);

/// Point-in-convex-region test with outward slack tol. Handles degenerate
/// polygons (points and segments) by distance.
bool region_member(const RegionPolygon& region, const std::array<double, 2>& point, double tol);

/// Independent maximizer for the weighted-sum program: rejection sampling of
/// feasible (b0, b1) plus Nelder-Mead refinement with projection. Returns the
/// best value whose common-rate violation is within 1e-6.
double opA_bruteforce(const bcc::CanonicalChannel& cc, double lambda1, double lambda2,
                      double r0_target, const OracleConfig& cfg = {});

/// Minimal Nelder-Mead maximizer used by the brute-force oracles.
Vector nelder_mead_max(const std::function<double(const Vector&)>& f, Vector x0, double scale,
                       int max_iters);

}  // namespace secrecy::oracle
