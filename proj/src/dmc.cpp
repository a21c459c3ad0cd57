#include "secrecy/dmc.hpp"

#include "secrecy/parallel.hpp"
#include "secrecy/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace secrecy::dmc {

namespace {

constexpr double kProbTol = 1e-12;

int sample_categorical(const double* p, int size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double cum = 0.0;
  for (int i = 0; i < size; ++i) {
    cum += p[i];
    if (u <= cum) return i;
  }
  return size - 1;
}

int sample_row(const Matrix& rows, int row, std::mt19937_64& rng) {
  std::vector<double> p(static_cast<std::size_t>(rows.cols()));
  for (int j = 0; j < rows.cols(); ++j) p[static_cast<std::size_t>(j)] = rows(row, j);
  return sample_categorical(p.data(), static_cast<int>(rows.cols()), rng);
}

}  // namespace

DmcWiretapSpec::DmcWiretapSpec(int xs, int ys, int zs, std::vector<Matrix> tables)
    : x_size(xs), y_size(ys), z_size(zs), p_yz_given_x(std::move(tables)) {
  if (x_size < 1 || y_size < 1 || z_size < 1 ||
      p_yz_given_x.size() != static_cast<std::size_t>(x_size)) {
    throw DimensionMismatch("DmcWiretapSpec: alphabet sizes and table count inconsistent");
  }
  p_y_given_x = Matrix::Zero(x_size, y_size);
  p_z_given_x = Matrix::Zero(x_size, z_size);
  for (int x = 0; x < x_size; ++x) {
    const Matrix& t = p_yz_given_x[static_cast<std::size_t>(x)];
    if (t.rows() != y_size || t.cols() != z_size) {
      throw DimensionMismatch("DmcWiretapSpec: table shape mismatch");
    }
    double total = 0.0;
    for (int y = 0; y < y_size; ++y) {
      for (int z = 0; z < z_size; ++z) {
        double p = t(y, z);
        if (p < -kProbTol || p > 1.0 + kProbTol) {
          throw NumericalError("DmcWiretapSpec: probability outside [0, 1]");
        }
        total += p;
        p_y_given_x(x, y) += p;
        p_z_given_x(x, z) += p;
      }
    }
    if (std::abs(total - 1.0) > kProbTol) {
      throw NumericalError("DmcWiretapSpec: conditional distribution does not sum to 1");
    }
  }
}

DmcWiretapSpec DmcWiretapSpec::from_marginals(const Matrix& py_x, const Matrix& pz_x) {
  if (py_x.rows() != pz_x.rows()) throw DimensionMismatch("from_marginals: row mismatch");
  std::vector<Matrix> tables;
  for (int x = 0; x < py_x.rows(); ++x) {
    Matrix t(py_x.cols(), pz_x.cols());
    for (int y = 0; y < py_x.cols(); ++y)
      for (int z = 0; z < pz_x.cols(); ++z) t(y, z) = py_x(x, y) * pz_x(x, z);
    tables.push_back(t);
  }
  return DmcWiretapSpec(static_cast<int>(py_x.rows()), static_cast<int>(py_x.cols()),
                        static_cast<int>(pz_x.cols()), std::move(tables));
}

DmcWiretapSpec DmcWiretapSpec::bsc_pair(double p_main, double p_eave) {
  Matrix py(2, 2), pz(2, 2);
  py << 1.0 - p_main, p_main, p_main, 1.0 - p_main;
  pz << 1.0 - p_eave, p_eave, p_eave, 1.0 - p_eave;
  return from_marginals(py, pz);
}

JointAuxDist::JointAuxDist(Vector pu, Matrix pvu, Matrix pxv)
    : p_u(std::move(pu)), p_v_given_u(std::move(pvu)), p_x_given_v(std::move(pxv)) {
  if (p_v_given_u.rows() != p_u.size() || p_x_given_v.rows() != p_v_given_u.cols()) {
    throw DimensionMismatch("JointAuxDist: inconsistent shapes");
  }
  auto check_simplex = [](double total) {
    if (std::abs(total - 1.0) > 1e-9) {
      throw NumericalError("JointAuxDist: distribution does not sum to 1");
    }
  };
  check_simplex(p_u.sum());
  for (int u = 0; u < p_v_given_u.rows(); ++u) check_simplex(p_v_given_u.row(u).sum());
  for (int v = 0; v < p_x_given_v.rows(); ++v) check_simplex(p_x_given_v.row(v).sum());
}

JointAuxDist JointAuxDist::uniform_identity(int x_size) {
  Vector pu = Vector::Ones(1);
  Matrix pvu = Matrix::Constant(1, x_size, 1.0 / x_size);
  Matrix pxv = Matrix::Identity(x_size, x_size);
  return JointAuxDist(pu, pvu, pxv);
}

long codebook_size(int n, double rate) {
  if (rate <= 0.0) return 1;
  double raw = std::exp(static_cast<double>(n) * rate);
  // Rounded up, with slack so that rates meant to hit an integer count (or a
  // vanishing delta) do not overshoot by one.
  return std::max<long>(1, static_cast<long>(std::ceil(raw - 1e-6)));
}

WiretapCode generate_code(const DmcWiretapSpec& spec, const JointAuxDist& dist,
                          const CodeParams& params) {
  if (dist.p_x_given_v.cols() != spec.x_size) {
    throw DimensionMismatch("generate_code: dist x-alphabet does not match channel");
  }
  WiretapCode code;
  code.n = params.n;
  code.j_count = codebook_size(params.n, params.rp_prime + params.delta);
  code.bin_count = codebook_size(params.n, params.rs);
  code.subbin_count = codebook_size(params.n, params.rp_dblprime);
  code.dither_count = codebook_size(params.n, params.t_rate);
  code.dist = dist;
  code.realized_rp_prime = std::log(static_cast<double>(code.j_count)) / params.n;
  code.realized_rs = std::log(static_cast<double>(code.bin_count)) / params.n;
  code.realized_rp_dblprime = std::log(static_cast<double>(code.subbin_count)) / params.n;
  code.realized_t = std::log(static_cast<double>(code.dither_count)) / params.n;

  std::size_t total = code.total_v_codewords() + static_cast<std::size_t>(code.j_count);
  if (total > params.enumeration_budget) {
    throw InfeasibleError("generate_code: codebook needs " + std::to_string(total) +
                          " codewords, budget is " + std::to_string(params.enumeration_budget));
  }

  code.p_y_given_v = dist.p_x_given_v * spec.p_y_given_x;
  code.p_z_given_v = dist.p_x_given_v * spec.p_z_given_x;

  auto rng = rng_stream(params.seed, 0);
  code.u_codebook.resize(static_cast<std::size_t>(code.j_count));
  for (auto& u : code.u_codebook) {
    u.resize(static_cast<std::size_t>(params.n));
    for (auto& sym : u) {
      std::vector<double> p(static_cast<std::size_t>(dist.u_size()));
      for (int i = 0; i < dist.u_size(); ++i) p[static_cast<std::size_t>(i)] = dist.p_u(i);
      sym = sample_categorical(p.data(), dist.u_size(), rng);
    }
  }
  code.v_codebooks.resize(static_cast<std::size_t>(code.j_count));
  long per_u = code.bin_count * code.subbin_count * code.dither_count;
  for (long j = 0; j < code.j_count; ++j) {
    auto& book = code.v_codebooks[static_cast<std::size_t>(j)];
    book.resize(static_cast<std::size_t>(per_u));
    for (auto& v : book) {
      v.resize(static_cast<std::size_t>(params.n));
      for (int i = 0; i < params.n; ++i) {
        int u_sym = code.u_codebook[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        v[static_cast<std::size_t>(i)] = sample_row(dist.p_v_given_u, u_sym, rng);
      }
    }
  }
  return code;
}

std::vector<int> encode(const WiretapCode& code, long ws, long wp_prime, long wp_dblprime,
                        std::uint64_t rng_seed) {
  if (wp_prime < 0 || wp_prime >= code.j_count || ws < 0 || ws >= code.bin_count ||
      wp_dblprime < 0 || wp_dblprime >= code.subbin_count) {
    throw InfeasibleError("encode: message index out of range");
  }
  auto rng = rng_stream(rng_seed, 1);
  long t = 0;
  if (code.dither_count > 1) {
    std::uniform_int_distribution<long> pick(0, code.dither_count - 1);
    t = pick(rng);
  }
  const auto& v = code.v_word(wp_prime, ws, wp_dblprime, t);
  std::vector<int> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[i] = sample_row(code.dist.p_x_given_v, v[i], rng);
  }
  return x;
}

DecodeResult decode(const WiretapCode& code, std::span<const int> y) {
  DecodeResult best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (long j = 0; j < code.j_count; ++j) {
    for (long k = 0; k < code.bin_count; ++k) {
      for (long l = 0; l < code.subbin_count; ++l) {
        for (long t = 0; t < code.dither_count; ++t) {
          const auto& v = code.v_word(j, k, l, t);
          double ll = 0.0;
          for (std::size_t i = 0; i < y.size(); ++i) {
            double p = code.p_y_given_v(v[i], y[i]);
            if (p <= 0.0) {
              ll = -std::numeric_limits<double>::infinity();
              break;
            }
            ll += std::log(p);
          }
          if (ll > best_ll) {
            best_ll = ll;
            best = DecodeResult{true, j, k, l, t};
          }
        }
      }
    }
  }
  if (!std::isfinite(best_ll)) best.ok = false;
  return best;
}

namespace {

// p(z^n | bin k) for all k, averaged over the uniform (j, l, t) choices.
std::vector<double> bin_likelihoods(const WiretapCode& code, std::span<const int> z) {
  std::vector<double> out(static_cast<std::size_t>(code.bin_count), 0.0);
  double weight = 1.0 / (static_cast<double>(code.j_count) *
                         static_cast<double>(code.subbin_count) *
                         static_cast<double>(code.dither_count));
  for (long j = 0; j < code.j_count; ++j) {
    for (long k = 0; k < code.bin_count; ++k) {
      double acc = 0.0;
      for (long l = 0; l < code.subbin_count; ++l) {
        for (long t = 0; t < code.dither_count; ++t) {
          const auto& v = code.v_word(j, k, l, t);
          double prob = 1.0;
          for (std::size_t i = 0; i < z.size(); ++i) prob *= code.p_z_given_v(v[i], z[i]);
          acc += prob;
        }
      }
      out[static_cast<std::size_t>(k)] += weight * acc;
    }
  }
  return out;
}

}  // namespace

LeakageResult exact_leakage(const WiretapCode& code, const DmcWiretapSpec& spec,
                            std::size_t budget) {
  double z_count = std::pow(static_cast<double>(spec.z_size), code.n);
  double needed = z_count * static_cast<double>(code.total_v_codewords());
  if (needed > static_cast<double>(budget)) {
    throw InfeasibleError("exact_leakage: enumeration needs " +
                          std::to_string(static_cast<long long>(needed)) +
                          " evaluations, budget is " + std::to_string(budget) +
                          "; use the Monte-Carlo mode");
  }
  const double pk = 1.0 / static_cast<double>(code.bin_count);
  double info = 0.0;
  std::vector<int> z(static_cast<std::size_t>(code.n), 0);
  bool done = false;
  while (!done) {
    auto lik = bin_likelihoods(code, z);
    double pbar = 0.0;
    for (double p : lik) pbar += pk * p;
    if (pbar > 0.0) {
      for (double p : lik) {
        if (p > 0.0) info += pk * p * std::log(p / pbar);
      }
    }
    // odometer increment
    done = true;
    for (int i = 0; i < code.n; ++i) {
      if (++z[static_cast<std::size_t>(i)] < spec.z_size) {
        done = false;
        break;
      }
      z[static_cast<std::size_t>(i)] = 0;
    }
  }
  LeakageResult r;
  r.per_symbol = std::max(0.0, info / code.n);
  r.exact = true;
  return r;
}

LeakageResult mc_leakage(const WiretapCode& code, const DmcWiretapSpec& spec, int n_samples,
                         std::uint64_t seed) {
  (void)spec;
  std::vector<double> draws(static_cast<std::size_t>(n_samples), 0.0);
  parallel_for(draws.size(), [&](std::size_t si) {
    auto rng = rng_stream(seed, 0xE000000ULL + si);
    std::uniform_int_distribution<long> pick_k(0, code.bin_count - 1);
    std::uniform_int_distribution<long> pick_j(0, code.j_count - 1);
    std::uniform_int_distribution<long> pick_l(0, code.subbin_count - 1);
    std::uniform_int_distribution<long> pick_t(0, code.dither_count - 1);
    long k = pick_k(rng), j = pick_j(rng), l = pick_l(rng), t = pick_t(rng);
    const auto& v = code.v_word(j, k, l, t);
    std::vector<int> z(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) z[i] = sample_row(code.p_z_given_v, v[i], rng);
    auto lik = bin_likelihoods(code, z);
    double pbar = 0.0;
    for (double p : lik) pbar += p / static_cast<double>(code.bin_count);
    double pk = lik[static_cast<std::size_t>(k)];
    draws[si] = (pk > 0.0 && pbar > 0.0) ? std::log(pk / pbar) : 0.0;
  });
  double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= std::max<std::size_t>(1, draws.size() - 1);
  LeakageResult r;
  double cap = std::log(static_cast<double>(code.bin_count)) / code.n;
  r.per_symbol = std::clamp(mean / code.n, 0.0, cap);
  r.std_error = std::sqrt(var / draws.size()) / code.n;
  r.exact = false;
  r.samples = n_samples;
  return r;
}

LeakageResult leakage(const WiretapCode& code, const DmcWiretapSpec& spec, std::size_t budget,
                      int mc_samples, std::uint64_t seed) {
  double z_count = std::pow(static_cast<double>(spec.z_size), code.n);
  if (z_count * static_cast<double>(code.total_v_codewords()) <= static_cast<double>(budget)) {
    return exact_leakage(code, spec, budget);
  }
  return mc_leakage(code, spec, mc_samples, seed);
}

double entropy(const Vector& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  }
  return h;
}

double binary_entropy(double p) {
  Vector v(2);
  v << p, 1.0 - p;
  return entropy(v);
}

double mutual_information(const Matrix& joint) {
  Vector row = joint.rowwise().sum();
  Vector col = joint.colwise().sum();
  double info = 0.0;
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      double p = joint(i, j);
      if (p > 0.0) info += p * std::log(p / (row(i) * col(j)));
    }
  }
  return info;
}

MutualInfoTriple aux_mutual_informations(const JointAuxDist& dist, const DmcWiretapSpec& spec) {
  Matrix p_y_given_v = dist.p_x_given_v * spec.p_y_given_x;
  Matrix p_z_given_v = dist.p_x_given_v * spec.p_z_given_x;

  MutualInfoTriple out;
  // I(U;Y) from the joint p(u) p(y|u).
  Matrix joint_uy(dist.u_size(), spec.y_size);
  for (int u = 0; u < dist.u_size(); ++u) {
    joint_uy.row(u) = dist.p_u(u) * (dist.p_v_given_u.row(u) * p_y_given_v);
  }
  out.i_u_y = mutual_information(joint_uy);

  for (int u = 0; u < dist.u_size(); ++u) {
    if (dist.p_u(u) <= 0.0) continue;
    Matrix joint_vy(dist.v_size(), spec.y_size);
    Matrix joint_vz(dist.v_size(), spec.z_size);
    for (int v = 0; v < dist.v_size(); ++v) {
      joint_vy.row(v) = dist.p_v_given_u(u, v) * p_y_given_v.row(v);
      joint_vz.row(v) = dist.p_v_given_u(u, v) * p_z_given_v.row(v);
    }
    out.i_v_y_given_u += dist.p_u(u) * mutual_information(joint_vy);
    out.i_v_z_given_u += dist.p_u(u) * mutual_information(joint_vz);
  }
  return out;
}

RateConditionReport rate_condition_report(const CodeParams& params, const JointAuxDist& dist,
                                          const DmcWiretapSpec& spec) {
  RateConditionReport r;
  r.info = aux_mutual_informations(dist, spec);
  r.margin_u = r.info.i_u_y - params.rp_prime;
  r.margin_decode = r.info.i_v_y_given_u - (params.rs + params.rp_dblprime + params.t_rate);
  r.margin_mask = (params.rp_dblprime + params.t_rate) - r.info.i_v_z_given_u;
  r.u_rate_ok = params.rp_prime < r.info.i_u_y;
  r.decode_rate_ok = params.rs + params.rp_dblprime + params.t_rate < r.info.i_v_y_given_u;
  r.masking_ok = params.rp_dblprime + params.t_rate > r.info.i_v_z_given_u;
  return r;
}

namespace {

struct RegionPoint {
  double rs_bound = 0.0;   // I(V;Y|U) - I(V;Z|U), clamped at 0
  double sum_bound = 0.0;  // I(V;Y)
};

RegionPoint evaluate_dist(const JointAuxDist& dist, const DmcWiretapSpec& spec) {
  MutualInfoTriple info = aux_mutual_informations(dist, spec);
  Matrix p_y_given_v = dist.p_x_given_v * spec.p_y_given_x;
  Vector p_v = (dist.p_u.transpose() * dist.p_v_given_u).transpose();
  Matrix joint_vy(dist.v_size(), spec.y_size);
  for (int v = 0; v < dist.v_size(); ++v) joint_vy.row(v) = p_v(v) * p_y_given_v.row(v);
  RegionPoint pt;
  pt.rs_bound = std::max(0.0, info.i_v_y_given_u - info.i_v_z_given_u);
  pt.sum_bound = std::max(0.0, mutual_information(joint_vy));
  return pt;
}

Vector random_simplex(int size, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  Vector v(size);
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    v(i) = exp1(rng);
    total += v(i);
  }
  return v / total;
}

JointAuxDist random_dist(int u_max, int v_max, int x_size, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_u(1, u_max);
  std::uniform_int_distribution<int> pick_v(1, v_max);
  int us = pick_u(rng);
  int vs = pick_v(rng);
  Vector pu = random_simplex(us, rng);
  Matrix pvu(us, vs), pxv(vs, x_size);
  for (int u = 0; u < us; ++u) pvu.row(u) = random_simplex(vs, rng).transpose();
  for (int v = 0; v < vs; ++v) pxv.row(v) = random_simplex(x_size, rng).transpose();
  return JointAuxDist(pu, pvu, pxv);
}

JointAuxDist perturb_dist(const JointAuxDist& d, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, scale);
  auto renorm_row = [&](Vector row) {
    for (Eigen::Index i = 0; i < row.size(); ++i) row(i) = std::max(1e-12, row(i) + gauss(rng));
    return Vector(row / row.sum());
  };
  Vector pu = renorm_row(d.p_u);
  Matrix pvu = d.p_v_given_u;
  Matrix pxv = d.p_x_given_v;
  for (int u = 0; u < pvu.rows(); ++u) pvu.row(u) = renorm_row(pvu.row(u).transpose()).transpose();
  for (int v = 0; v < pxv.rows(); ++v) pxv.row(v) = renorm_row(pxv.row(v).transpose()).transpose();
  return JointAuxDist(pu, pvu, pxv);
}

}  // namespace

SlRegionResult sl_region_eval(const DmcWiretapSpec& spec, const DistGrid& grid) {
  const int v_max = grid.v_max > 0 ? grid.v_max : spec.x_size + 1;

  std::vector<JointAuxDist> candidates;
  candidates.push_back(JointAuxDist::uniform_identity(spec.x_size));
  for (int i = 0; i < grid.n_samples; ++i) {
    auto rng = rng_stream(grid.seed, 0xD15701ULL + static_cast<std::uint64_t>(i));
    candidates.push_back(random_dist(grid.u_max, v_max, spec.x_size, rng));
  }

  std::vector<RegionPoint> points(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    points[i] = evaluate_dist(candidates[i], spec);
  });

  // Refine the best candidates for each of the two extreme objectives.
  auto refine = [&](std::vector<std::size_t> order, auto score) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return score(points[a]) > score(points[b]);
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(grid.refine_top)));
    std::size_t best = order.empty() ? 0 : order.front();
    JointAuxDist best_dist = candidates[best];
    double best_score = score(points[best]);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      JointAuxDist cur = candidates[order[oi]];
      double cur_score = score(points[order[oi]]);
      auto rng = rng_stream(grid.seed, 0xBEEF00ULL + oi);
      double scale = 0.1;
      for (int r = 0; r < grid.refine_rounds; ++r) {
        JointAuxDist prop = perturb_dist(cur, scale, rng);
        double s = score(evaluate_dist(prop, spec));
        if (s > cur_score) {
          cur = prop;
          cur_score = s;
        } else {
          scale *= 0.9;
        }
      }
      if (cur_score > best_score) {
        best_score = cur_score;
        best_dist = cur;
      }
    }
    return std::pair<double, JointAuxDist>(best_score, best_dist);
  };

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0u);
  auto [max_rs, rs_dist] = refine(order, [](const RegionPoint& p) {
    return std::min(p.rs_bound, p.sum_bound);
  });
  auto [max_sum, sum_dist] = refine(order, [](const RegionPoint& p) { return p.sum_bound; });

  std::vector<std::array<double, 2>> vertices{{0.0, 0.0}};
  auto add_point = [&](const RegionPoint& p) {
    double rs = std::min(p.rs_bound, p.sum_bound);
    vertices.push_back({0.0, rs});
    vertices.push_back({p.sum_bound - rs, rs});
    vertices.push_back({p.sum_bound, 0.0});
  };
  for (const auto& p : points) add_point(p);
  add_point(evaluate_dist(rs_dist, spec));
  add_point(evaluate_dist(sum_dist, spec));

  SlRegionResult out;
  out.polygon.vertices = geometry::convex_hull(std::move(vertices));
  out.polygon.axis_labels = {"rp", "rs"};
  out.max_rs = max_rs;
  out.max_sum = max_sum;
  out.best_rs_dist = rs_dist;
  out.best_sum_dist = sum_dist;
  return out;
}

SimReport simulate(const DmcWiretapSpec& spec, const JointAuxDist& dist, const CodeParams& params,
                   int n_trials, int leakage_mc_samples, std::uint64_t seed) {
  WiretapCode code = generate_code(spec, dist, params);
  SimReport report;
  report.realized_rs = code.realized_rs;
  report.realized_rp_prime = code.realized_rp_prime;
  report.realized_rp_dblprime = code.realized_rp_dblprime;
  report.realized_t = code.realized_t;
  report.trials = n_trials;

  std::vector<int> errors(static_cast<std::size_t>(n_trials), 0);
  parallel_for(errors.size(), [&](std::size_t trial) {
    auto rng = rng_stream(seed, 0xB00ULL + trial);
    std::uniform_int_distribution<long> pick_k(0, code.bin_count - 1);
    std::uniform_int_distribution<long> pick_j(0, code.j_count - 1);
    std::uniform_int_distribution<long> pick_l(0, code.subbin_count - 1);
    long ws = pick_k(rng), wp = pick_j(rng), wl = pick_l(rng);
    std::uint64_t enc_state = seed + 0xC0DE0000ULL + trial;
    std::vector<int> x = encode(code, ws, wp, wl, splitmix64(enc_state));
    std::vector<int> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = sample_row(spec.p_y_given_x, x[i], rng);
    DecodeResult dec = decode(code, y);
    errors[trial] = (!dec.ok || dec.ws != ws || dec.wp_prime != wp || dec.wp_dblprime != wl) ? 1 : 0;
  });
  report.decode_error_rate =
      std::accumulate(errors.begin(), errors.end(), 0.0) / std::max(1, n_trials);

  LeakageResult lk = leakage(code, spec, params.enumeration_budget, leakage_mc_samples, seed ^ 0x5EEDULL);
  report.leakage_per_symbol = lk.per_symbol;
  report.leakage_std_error = lk.std_error;
  report.leakage_exact = lk.exact;
  return report;
}

}  // namespace secrecy::dmc
