#pragma once

#include "secrecy/linalg.hpp"

#include <cstdint>
#include <random>

namespace secrecy {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic per-task generator derived from (base_seed, stream).
inline std::mt19937_64 rng_stream(std::uint64_t base_seed, std::uint64_t stream) {
  std::uint64_t s = base_seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(base_seed)};
  return std::mt19937_64(seq);
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
Matrix haar_orthogonal(Eigen::Index dim, std::mt19937_64& rng);

/// Random symmetric matrix with eigenvalues i.i.d. uniform on [lo, hi]
/// and Haar-random eigenvectors.
SymMatrix random_spectrum(Eigen::Index dim, double lo, double hi, std::mt19937_64& rng);

}  // namespace secrecy
