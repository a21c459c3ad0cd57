#pragma once

#include "secrecy/linalg.hpp"
#include "secrecy/wiretap.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace secrecy::dmc {

/// Finite-alphabet wiretap channel p(y, z | x).
struct DmcWiretapSpec {
  int x_size = 0;
  int y_size = 0;
  int z_size = 0;
  std::vector<Matrix> p_yz_given_x;  // one y_size x z_size table per input symbol
  Matrix p_y_given_x;                // x rows, y cols (marginal, precomputed)
  Matrix p_z_given_x;

  DmcWiretapSpec(int xs, int ys, int zs, std::vector<Matrix> tables);

  /// Independent-noise construction from per-receiver transition rows.
  static DmcWiretapSpec from_marginals(const Matrix& py_x, const Matrix& pz_x);

  /// Binary symmetric pair: Y = BSC(p_main)(X), Z = BSC(p_eave)(X).
  static DmcWiretapSpec bsc_pair(double p_main, double p_eave);
};

/// p(u) p(v|u) p(x|v) over finite auxiliary alphabets.
struct JointAuxDist {
  Vector p_u;
  Matrix p_v_given_u;  // u rows, v cols
  Matrix p_x_given_v;  // v rows, x cols

  JointAuxDist() = default;
  JointAuxDist(Vector pu, Matrix pvu, Matrix pxv);
  int u_size() const { return static_cast<int>(p_u.size()); }
  int v_size() const { return static_cast<int>(p_v_given_u.cols()); }

  /// U constant, V = X uniform (identity mapping).
  static JointAuxDist uniform_identity(int x_size);
};

struct CodeParams {
  int n = 4;
  double rp_prime = 0.0;     // nats/symbol
  double rp_dblprime = 0.0;
  double rs = 0.0;
  double t_rate = 0.0;
  double delta = 1e-9;
  std::uint64_t seed = 0;
  std::size_t enumeration_budget = std::size_t{1} << 16;
};

/// Codeword count for one rate level: exp(n * rate) rounded up, at least 1.
long codebook_size(int n, double rate);

/// Superposition/binning codebook: a U-codebook of size J and, per
/// U-codeword, V-codewords arranged as bins x sub-bins x dither words.
struct WiretapCode {
  int n = 0;
  long j_count = 1;        // U-codewords
  long bin_count = 1;      // confidential-message bins
  long subbin_count = 1;   // private-submessage sub-bins per bin
  long dither_count = 1;   // codewords per sub-bin
  std::vector<std::vector<int>> u_codebook;                 // [j][symbol]
  std::vector<std::vector<std::vector<int>>> v_codebooks;   // [j][k*L*T + l*T + t][symbol]
  JointAuxDist dist;
  Matrix p_y_given_v;  // v rows, y cols
  Matrix p_z_given_v;
  double realized_rp_prime = 0.0;
  double realized_rs = 0.0;
  double realized_rp_dblprime = 0.0;
  double realized_t = 0.0;

  std::size_t total_v_codewords() const {
    return static_cast<std::size_t>(j_count) * static_cast<std::size_t>(bin_count) *
           static_cast<std::size_t>(subbin_count) * static_cast<std::size_t>(dither_count);
  }
  const std::vector<int>& v_word(long j, long k, long l, long t) const {
    return v_codebooks[static_cast<std::size_t>(j)]
                      [static_cast<std::size_t>((k * subbin_count + l) * dither_count + t)];
  }
};

/// Draws the codebook i.i.d. from dist; deterministic given params.seed.
/// Throws InfeasibleError when the codeword count exceeds the budget.
WiretapCode generate_code(const DmcWiretapSpec& spec, const JointAuxDist& dist,
                          const CodeParams& params);

/// Picks the U-codeword wp_prime and a uniformly random dither word in
/// sub-bin (ws, wp_dblprime), then draws x^n from p(x|v).
std::vector<int> encode(const WiretapCode& code, long ws, long wp_prime, long wp_dblprime,
                        std::uint64_t rng_seed);

struct DecodeResult {
  bool ok = false;
  long wp_prime = 0;
  long ws = 0;
  long wp_dblprime = 0;
  long t = 0;
};

/// Exact maximum-likelihood decoding over all codeword tuples; ties resolve
/// to the lowest index tuple. Fails only when every likelihood is zero.
DecodeResult decode(const WiretapCode& code, std::span<const int> y);

struct LeakageResult {
  double per_symbol = 0.0;  // I(Ws; Z^n)/n in nats
  double std_error = 0.0;   // 0 for the exact computation
  bool exact = true;
  long samples = 0;
};

/// Exact I(Ws; Z^n)/n by enumerating z^n. Throws InfeasibleError when
/// z_size^n * total codewords exceeds the budget.
LeakageResult exact_leakage(const WiretapCode& code, const DmcWiretapSpec& spec,
                            std::size_t budget = std::size_t{1} << 16);

/// Unbiased Monte-Carlo estimate of the same quantity: z^n sampled from the
/// true joint, posterior over the codebook computed exactly per sample.
LeakageResult mc_leakage(const WiretapCode& code, const DmcWiretapSpec& spec, int n_samples,
                         std::uint64_t seed);

/// Exact when the enumeration fits the budget, Monte Carlo otherwise.
LeakageResult leakage(const WiretapCode& code, const DmcWiretapSpec& spec, std::size_t budget,
                      int mc_samples, std::uint64_t seed);

double entropy(const Vector& p);           // nats, 0 log 0 := 0
double binary_entropy(double p);           // nats
double mutual_information(const Matrix& joint);

struct MutualInfoTriple {
  double i_u_y = 0.0;
  double i_v_y_given_u = 0.0;
  double i_v_z_given_u = 0.0;
};

MutualInfoTriple aux_mutual_informations(const JointAuxDist& dist, const DmcWiretapSpec& spec);

struct RateConditionReport {
  MutualInfoTriple info;
  double margin_u = 0.0;       // I(U;Y) - Rp'
  double margin_decode = 0.0;  // I(V;Y|U) - (Rs + Rp'' + T)
  double margin_mask = 0.0;    // (Rp'' + T) - I(V;Z|U)
  bool u_rate_ok = false;
  bool decode_rate_ok = false;
  bool masking_ok = false;
};

/// Reports whether the reliability and masking rate inequalities hold for
/// the given distribution, with margins.
RateConditionReport rate_condition_report(const CodeParams& params, const JointAuxDist& dist,
                                          const DmcWiretapSpec& spec);

struct DistGrid {
  int u_max = 3;
  int v_max = 0;  // 0 means x_size + 1
  int n_samples = 2000;
  int refine_top = 10;
  int refine_rounds = 80;
  std::uint64_t seed = 0;
};

struct SlRegionResult {
  RegionPolygon polygon;  // (rp, rs), inner approximation
  double max_rs = 0.0;
  double max_sum = 0.0;
  JointAuxDist best_rs_dist;
  JointAuxDist best_sum_dist;
};

/// Inner approximation of the single-letter private-confidential region by
/// Dirichlet sampling of p(u)p(v|u)p(x|v) plus coordinate refinement.
SlRegionResult sl_region_eval(const DmcWiretapSpec& spec, const DistGrid& grid = {});

struct SimReport {
  double decode_error_rate = 0.0;
  double leakage_per_symbol = 0.0;
  double leakage_std_error = 0.0;
  bool leakage_exact = true;
  long trials = 0;
  double realized_rs = 0.0;
  double realized_rp_prime = 0.0;
  double realized_rp_dblprime = 0.0;
  double realized_t = 0.0;
};

/// End-to-end run: generate the code, Monte-Carlo the decoding error,
/// compute the leakage (exact when it fits the budget).
SimReport simulate(const DmcWiretapSpec& spec, const JointAuxDist& dist, const CodeParams& params,
                   int n_trials, int leakage_mc_samples, std::uint64_t seed);

}  // namespace secrecy::dmc
