#include "secrecy/oracle.hpp"

#include "secrecy/parallel.hpp"
#include "secrecy/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace secrecy::oracle {

namespace {

Eigen::Index packed_size(Eigen::Index d) { return d * (d + 1) / 2; }

Vector pack_sym(const Matrix& m) {
  const Eigen::Index d = m.rows();
  Vector x(packed_size(d));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) x(k++) = m(i, j);
  return x;
}

Matrix unpack_sym(const Vector& x, Eigen::Index d) {
  Matrix m(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) {
      m(i, j) = x(k);
      m(j, i) = x(k);
      ++k;
    }
  return m;
}

struct Scored {
  double value;
  std::uint64_t stream;
};

}  // namespace

Vector nelder_mead_max(const std::function<double(const Vector&)>& f, Vector x0, double scale,
                       int max_iters) {
  const Eigen::Index n = x0.size();
  std::vector<Vector> xs;
  std::vector<double> vals;
  xs.push_back(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector x = x0;
    x(i) += scale;
    xs.push_back(x);
  }
  vals.reserve(xs.size());
  for (const auto& x : xs) vals.push_back(f(x));

  std::vector<std::size_t> order(xs.size());
  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  };

  for (int it = 0; it < max_iters; ++it) {
    sort_order();
    std::size_t best = order.front();
    std::size_t worst = order.back();
    std::size_t second_worst = order[order.size() - 2];

    Vector centroid = Vector::Zero(n);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += xs[order[k]];
    centroid /= static_cast<double>(order.size() - 1);

    Vector xr = centroid + (centroid - xs[worst]);
    double vr = f(xr);
    if (vr > vals[best]) {
      Vector xe = centroid + 2.0 * (centroid - xs[worst]);
      double ve = f(xe);
      if (ve > vr) {
        xs[worst] = xe;
        vals[worst] = ve;
      } else {
        xs[worst] = xr;
        vals[worst] = vr;
      }
    } else if (vr > vals[second_worst]) {
      xs[worst] = xr;
      vals[worst] = vr;
    } else {
      Vector xc = centroid + 0.5 * (xs[worst] - centroid);
      double vc = f(xc);
      if (vc > vals[worst]) {
        xs[worst] = xc;
        vals[worst] = vc;
      } else {
        for (std::size_t k = 1; k < order.size(); ++k) {
          std::size_t idx = order[k];
          xs[idx] = xs[best] + 0.5 * (xs[idx] - xs[best]);
          vals[idx] = f(xs[idx]);
        }
      }
    }
    double spread = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k)
      spread = std::max(spread, std::abs(vals[k] - vals[order.front()]));
    if (spread < 1e-13) break;
  }
  sort_order();
  return xs[order.front()];
}

double cs_bruteforce(const ChannelPair& ch, const SymMatrix& s, const OracleConfig& cfg) {
  const Eigen::Index d = s.dim();
  Matrix s12 = sqrt_psd(s).mat();

  auto sample_m = [&](std::uint64_t stream) {
    auto rng = rng_stream(cfg.seed, stream);
    return random_spectrum(d, 0.0, 1.0, rng).mat();
  };
  auto value_of_m = [&](const Matrix& m) {
    Matrix clipped = clip_spectrum(SymMatrix(m), 0.0, 1.0).mat();
    return secrecy_objective(ch, SymMatrix(s12 * clipped * s12));
  };

  std::vector<Scored> scores(static_cast<std::size_t>(cfg.n_samples));
  parallel_for(scores.size(), [&](std::size_t i) {
    scores[i] = {value_of_m(sample_m(i)), i};
  });
  std::stable_sort(scores.begin(), scores.end(),
                   [](const Scored& a, const Scored& b) { return a.value > b.value; });

  double best = scores.empty() ? 0.0 : scores.front().value;
  const std::size_t top = std::min<std::size_t>(5, scores.size());
  for (std::size_t k = 0; k < top; ++k) {
    Vector x0 = pack_sym(sample_m(scores[k].stream));
    Vector xbest = nelder_mead_max([&](const Vector& x) { return value_of_m(unpack_sym(x, d)); },
                                   x0, 0.1, cfg.refine_rounds);
    best = std::max(best, value_of_m(unpack_sym(xbest, d)));
  }
  return std::max(0.0, best);
}

double cs_closed_form(const ChannelPair& ch, const SymMatrix& s) {
  Eigen::LLT<Matrix> llt(s.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(min_eigenvalue(s));
  }
  Matrix s12 = sqrt_psd(s).mat();
  const Eigen::Index d = s.dim();
  SymMatrix a(Matrix::Identity(d, d) + s12 * ch.h_r.transpose() * ch.h_r * s12);
  SymMatrix b(Matrix::Identity(d, d) + s12 * ch.h_e.transpose() * ch.h_e * s12);
  double total = 0.0;
  for (const auto& pair : gen_eig(a, b)) {
    if (pair.value > 1.0) total += std::log(pair.value);
  }
  return 0.5 * total;
}

bool region_member(const RegionPolygon& region, const std::array<double, 2>& point, double tol) {
  const auto& v = region.vertices;
  if (v.empty()) return false;
  auto dist2 = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
  };
  if (v.size() == 1) return dist2(v[0], point) <= tol * tol;
  if (v.size() == 2) {
    // Distance to segment.
    double vx = v[1][0] - v[0][0], vy = v[1][1] - v[0][1];
    double wx = point[0] - v[0][0], wy = point[1] - v[0][1];
    double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
    std::array<double, 2> proj{v[0][0] + t * vx, v[0][1] + t * vy};
    return dist2(proj, point) <= tol * tol;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    double ex = b[0] - a[0], ey = b[1] - a[1];
    double cross = ex * (point[1] - a[1]) - ey * (point[0] - a[0]);
    double len = std::sqrt(ex * ex + ey * ey);
    if (cross < -tol * std::max(len, 1e-300)) return false;
  }
  return true;
}

double opA_bruteforce(const bcc::CanonicalChannel& cc, double lambda1, double lambda2,
                      double r0_target, const OracleConfig& cfg) {
  const Eigen::Index d = cc.s.dim();
  Matrix s12 = sqrt_psd(cc.s).mat();

  auto split_of = [&](const Matrix& m0, const Matrix& m1) {
    return bcc::CovarianceSplit{SymMatrix(s12 * m0 * s12), SymMatrix(s12 * m1 * s12)};
  };
  auto violation = [&](const bcc::CovarianceSplit& sp) {
    auto c = bcc::common_rate_components(cc, sp.b0);
    return std::max({0.0, r0_target - c[0], r0_target - c[1]});
  };
  auto objective = [&](const bcc::CovarianceSplit& sp) {
    return lambda1 * bcc::confidential_rate_1(cc, sp.b1) +
           lambda2 * bcc::confidential_rate_2(cc, sp.b0, sp.b1);
  };

  auto sample_pair = [&](std::uint64_t stream, Matrix& m0, Matrix& m1) -> bool {
    auto rng = rng_stream(cfg.seed, 0xA0000000ULL + stream);
    m0 = random_spectrum(d, 0.0, 1.0, rng).mat();
    m1 = random_spectrum(d, 0.0, 1.0, rng).mat();
    return min_eigenvalue(SymMatrix(Matrix::Identity(d, d) - m0 - m1)) >= -1e-12;
  };

  std::vector<Scored> scores(static_cast<std::size_t>(cfg.n_samples),
                             Scored{-std::numeric_limits<double>::infinity(), 0});
  parallel_for(scores.size(), [&](std::size_t i) {
    Matrix m0, m1;
    if (!sample_pair(i, m0, m1)) return;  // rejected: outside the spectahedron
    auto sp = split_of(m0, m1);
    if (violation(sp) > 1e-9) return;
    scores[i] = {objective(sp), i};
  });
  std::stable_sort(scores.begin(), scores.end(),
                   [](const Scored& a, const Scored& b) { return a.value > b.value; });

  // Penalized objective for the refinement stage; projection keeps the PSD
  // constraints, the penalty drives the common-rate constraint.
  auto refine_value = [&](const Vector& x) {
    Matrix m0 = unpack_sym(x.head(packed_size(d)), d);
    Matrix m1 = unpack_sym(x.tail(packed_size(d)), d);
    auto pr = bcc::project_split(bcc::CovarianceSplit{SymMatrix(m0), SymMatrix(m1)},
                                 SymMatrix::identity(d));
    auto sp = split_of(pr.b0.mat(), pr.b1.mat());
    double v = violation(sp);
    return objective(sp) - 1e5 * v * v;
  };
  auto actual_value = [&](const Vector& x) {
    Matrix m0 = unpack_sym(x.head(packed_size(d)), d);
    Matrix m1 = unpack_sym(x.tail(packed_size(d)), d);
    auto pr = bcc::project_split(bcc::CovarianceSplit{SymMatrix(m0), SymMatrix(m1)},
                                 SymMatrix::identity(d));
    auto sp = split_of(pr.b0.mat(), pr.b1.mat());
    if (violation(sp) > 1e-6) return -std::numeric_limits<double>::infinity();
    return objective(sp);
  };

  double best = -std::numeric_limits<double>::infinity();
  std::vector<Vector> seeds;
  const std::size_t top = std::min<std::size_t>(5, scores.size());
  for (std::size_t k = 0; k < top; ++k) {
    if (!std::isfinite(scores[k].value)) break;
    best = std::max(best, scores[k].value);
    Matrix m0, m1;
    sample_pair(scores[k].stream, m0, m1);
    Vector x(2 * packed_size(d));
    x << pack_sym(m0), pack_sym(m1);
    seeds.push_back(x);
  }
  if (seeds.empty()) {
    // Fall back to a deterministic feasible seed: b0 = t*S, b1 = (S - b0)/2.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      double mid = 0.5 * (lo + hi);
      if (bcc::common_rate(cc, SymMatrix(mid * cc.s.mat())) >= r0_target)
        hi = mid;
      else
        lo = mid;
    }
    Vector x(2 * packed_size(d));
    x << pack_sym(hi * Matrix::Identity(d, d)),
        pack_sym(0.5 * (1.0 - hi) * Matrix::Identity(d, d));
    seeds.push_back(x);
  }

  for (const auto& seed : seeds) {
    Vector xbest = nelder_mead_max(refine_value, seed, 0.08, cfg.refine_rounds);
    best = std::max(best, actual_value(xbest));
  }
  return best;
}

}  // namespace secrecy::oracle
