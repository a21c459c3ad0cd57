#include "secrecy/wiretap.hpp"

#include "secrecy/parallel.hpp"
#include "secrecy/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace secrecy {

ChannelPair::ChannelPair(Matrix hr, Matrix he) : h_r(std::move(hr)), h_e(std::move(he)) {
  if (h_r.cols() != h_e.cols()) {
    throw DimensionMismatch("ChannelPair: transmit dimensions differ (" +
                            std::to_string(h_r.cols()) + " vs " + std::to_string(h_e.cols()) + ")");
  }
}

PowerConstraint PowerConstraint::matrix_s(SymMatrix s) {
  if (!is_psd(s)) throw NumericalError("PowerConstraint: S must be PSD");
  PowerConstraint pc;
  pc.v_ = std::move(s);
  return pc;
}

PowerConstraint PowerConstraint::trace_p(double p) {
  if (!(p >= 0.0)) throw NumericalError("PowerConstraint: trace budget must be >= 0");
  PowerConstraint pc;
  pc.v_ = p;
  return pc;
}

double capacity(const Matrix& h, const SymMatrix& s) {
  if (h.cols() != s.dim()) {
    throw DimensionMismatch("capacity: channel has " + std::to_string(h.cols()) +
                            " transmit dims, S has " + std::to_string(s.dim()));
  }
  Matrix g = Matrix::Identity(h.rows(), h.rows()) + h * s.mat() * h.transpose();
  return std::max(0.0, 0.5 * logdet(SymMatrix(g)));
}

double secrecy_objective(const ChannelPair& ch, const SymMatrix& b) {
  auto term = [&](const Matrix& h) {
    Matrix g = Matrix::Identity(h.rows(), h.rows()) + h * b.mat() * h.transpose();
    return logdet(SymMatrix(g));
  };
  return 0.5 * (term(ch.h_r) - term(ch.h_e));
}

Matrix secrecy_objective_gradient(const ChannelPair& ch, const SymMatrix& b) {
  auto term = [&](const Matrix& h) -> Matrix {
    Matrix g = Matrix::Identity(h.rows(), h.rows()) + h * b.mat() * h.transpose();
    return h.transpose() * SymMatrix(g).mat().llt().solve(h);
  };
  return symmetrize(0.5 * (term(ch.h_r) - term(ch.h_e)));
}

namespace {

struct RangeFactor {
  Matrix s12;      // dim x rank, S = s12 s12^T
  Eigen::Index rank;
};

RangeFactor range_factor(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.mat());
  const Vector& ev = es.eigenvalues();
  double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff) keep.push_back(i);
  RangeFactor f;
  f.rank = static_cast<Eigen::Index>(keep.size());
  f.s12.resize(s.dim(), f.rank);
  for (Eigen::Index k = 0; k < f.rank; ++k)
    f.s12.col(k) = es.eigenvectors().col(keep[static_cast<std::size_t>(k)]) * std::sqrt(ev(keep[static_cast<std::size_t>(k)]));
  return f;
}

double frob_dot(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

struct AscentResult {
  Matrix m;
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
};

// Projected gradient ascent over {0 <= M <= I} with Armijo backtracking.
AscentResult ascend_clipped(const std::function<double(const Matrix&)>& obj,
                            const std::function<Matrix(const Matrix&)>& grad, Matrix m0,
                            int max_iters, double tol) {
  auto clip = [](const Matrix& m) { return clip_spectrum(SymMatrix(m), 0.0, 1.0).mat(); };
  AscentResult r;
  r.m = clip(m0);
  r.value = obj(r.m);
  double step = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    r.iterations = it + 1;
    Matrix g = grad(r.m);
    double residual = (clip(r.m + g) - r.m).norm();
    if (residual <= tol) {
      r.converged = true;
      return r;
    }
    step = std::min(step * 2.0, 1e4);
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      Matrix mt = clip(r.m + step * g);
      double vt = obj(mt);
      double ref = frob_dot(g, mt - r.m);
      if (vt >= r.value + 1e-4 * ref && ref > 0.0) {
        r.m = mt;
        r.value = vt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      r.converged = residual <= 10.0 * tol;
      return r;
    }
  }
  r.converged = false;
  return r;
}

struct SecrecySolve {
  double value = 0.0;
  Matrix m;  // rank x rank optimizer variable
  SymMatrix b;
  int iterations = 0;
  bool converged = true;
};

SecrecySolve secrecy_solve(const ChannelPair& ch, const SymMatrix& s, const OptimizerConfig& cfg,
                           const std::vector<Matrix>& extra_starts) {
  if (ch.transmit_dim() != s.dim()) throw DimensionMismatch("secrecy_capacity: dimension mismatch");
  if (!is_psd(s)) throw NumericalError("secrecy_capacity: S must be PSD");

  RangeFactor f = range_factor(s);
  SecrecySolve out;
  out.b = SymMatrix::zero(s.dim());
  if (f.rank == 0) return out;

  const Matrix gr = ch.h_r * f.s12;
  const Matrix ge = ch.h_e * f.s12;
  auto obj = [&](const Matrix& m) {
    auto term = [&](const Matrix& g) {
      Matrix x = Matrix::Identity(g.rows(), g.rows()) + g * m * g.transpose();
      return logdet(SymMatrix(x));
    };
    return 0.5 * (term(gr) - term(ge));
  };
  auto grad = [&](const Matrix& m) -> Matrix {
    auto term = [&](const Matrix& g) -> Matrix {
      Matrix x = Matrix::Identity(g.rows(), g.rows()) + g * m * g.transpose();
      return g.transpose() * SymMatrix(x).mat().llt().solve(g);
    };
    return symmetrize(0.5 * (term(gr) - term(ge)));
  };

  std::vector<Matrix> starts;
  starts.push_back(Matrix::Zero(f.rank, f.rank));
  starts.push_back(Matrix::Identity(f.rank, f.rank));
  for (int k = 0; k < cfg.n_starts; ++k) {
    auto rng = rng_stream(cfg.seed, static_cast<std::uint64_t>(k));
    starts.push_back(random_spectrum(f.rank, 0.0, 1.0, rng).mat());
  }
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());

  std::vector<AscentResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    results[i] = ascend_clipped(obj, grad, starts[i], cfg.max_iters, cfg.grad_tol);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].value > results[best].value) best = i;
  }
  const AscentResult& win = results[best];
  out.iterations = win.iterations;
  out.converged = win.converged;
  if (win.value <= 0.0) {
    out.value = 0.0;
    out.m = Matrix::Zero(f.rank, f.rank);
    out.b = SymMatrix::zero(s.dim());
  } else {
    out.value = win.value;
    out.m = win.m;
    out.b = SymMatrix(f.s12 * win.m * f.s12.transpose());
  }
  return out;
}

}  // namespace

SecrecyCapacityResult secrecy_capacity(const ChannelPair& ch, const SymMatrix& s,
                                       const OptimizerConfig& cfg) {
  SecrecySolve sol = secrecy_solve(ch, s, cfg, {});
  SecrecyCapacityResult r;
  r.value = sol.value;
  r.b_star = sol.b;
  r.iterations = sol.iterations;
  r.converged = sol.converged;
  return r;
}

namespace geometry {

std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts) {
  if (pts.empty()) return pts;
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
  const double merge_tol = 1e-9 * (1.0 + scale);

  // Merge near-duplicates, keeping first occurrence.
  std::vector<std::array<double, 2>> uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : uniq) {
      if (std::abs(p[0] - q[0]) <= merge_tol && std::abs(p[1] - q[1]) <= merge_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() <= 2) {
    std::sort(uniq.begin(), uniq.end());
    return uniq;
  }

  std::sort(uniq.begin(), uniq.end());
  const double area_tol = 1e-12 * (1.0 + scale) * (1.0 + scale);
  auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                  const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<double, 2>> hull(2 * uniq.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < uniq.size(); ++i) {  // lower
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], uniq[i]) <= area_tol) --k;
    hull[k++] = uniq[i];
  }
  for (std::size_t i = uniq.size() - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(hull[k - 2], hull[k - 1], uniq[i]) <= area_tol) --k;
    hull[k++] = uniq[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace geometry

namespace {

struct RegionScalars {
  double c;
  double cs;
};

std::vector<RegionScalars> region_scalars(const ChannelPair& ch, const PowerConstraint& pc,
                                          const OptimizerConfig& cfg) {
  std::vector<RegionScalars> out;
  if (pc.is_matrix()) {
    double c = capacity(ch.h_r, pc.s());
    double cs = secrecy_capacity(ch, pc.s(), cfg).value;
    out.push_back({c, std::min(cs, c)});
  } else {
    auto entries = trace_sweep(ch, pc.p(), default_sweep_weights(), cfg);
    for (const auto& e : entries) out.push_back({e.c, std::min(e.cs, e.c)});
  }
  return out;
}

}  // namespace

RegionPolygon ce_region(const ChannelPair& ch, const PowerConstraint& pc,
                        const OptimizerConfig& cfg) {
  std::vector<std::array<double, 2>> candidates{{0.0, 0.0}};
  for (const auto& rs : region_scalars(ch, pc, cfg)) {
    candidates.push_back({rs.c, 0.0});
    candidates.push_back({rs.c, rs.cs});
    candidates.push_back({rs.cs, rs.cs});
  }
  RegionPolygon poly;
  poly.vertices = geometry::convex_hull(std::move(candidates));
  poly.axis_labels = {"r", "re"};
  return poly;
}

RegionPolygon pc_region(const ChannelPair& ch, const PowerConstraint& pc,
                        const OptimizerConfig& cfg) {
  std::vector<std::array<double, 2>> candidates{{0.0, 0.0}};
  for (const auto& rs : region_scalars(ch, pc, cfg)) {
    candidates.push_back({rs.c, 0.0});
    candidates.push_back({rs.c - rs.cs, rs.cs});
    candidates.push_back({0.0, rs.cs});
  }
  RegionPolygon poly;
  poly.vertices = geometry::convex_hull(std::move(candidates));
  poly.axis_labels = {"rp", "rs"};
  return poly;
}

RegionPolygon to_rate_equivocation(const RegionPolygon& private_confidential) {
  std::vector<std::array<double, 2>> sheared;
  sheared.reserve(private_confidential.vertices.size());
  for (const auto& v : private_confidential.vertices) sheared.push_back({v[0] + v[1], v[1]});
  RegionPolygon poly;
  poly.vertices = geometry::convex_hull(std::move(sheared));
  poly.axis_labels = {"r", "re"};
  return poly;
}

std::vector<std::array<double, 2>> default_sweep_weights(int count) {
  std::vector<std::array<double, 2>> w;
  w.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double t = (count == 1) ? 0.5 : static_cast<double>(i) / (count - 1);
    w.push_back({1.0 - t, t});
  }
  return w;
}

namespace {

// Frobenius projection onto {S >= 0, Tr(S) <= budget}: clip eigenvalues to the
// nonnegative orthant intersected with the trace ball.
Matrix project_trace_psd(const Matrix& s, double budget) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s));
  Vector ev = es.eigenvalues().cwiseMax(0.0);
  double total = ev.sum();
  if (total > budget) {
    // Project onto {lambda >= 0, sum = budget}.
    Vector sorted = ev;
    std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
    double cum = 0.0;
    double theta = 0.0;
    for (Eigen::Index i = 0; i < sorted.size(); ++i) {
      cum += sorted(i);
      double cand = (cum - budget) / static_cast<double>(i + 1);
      if (i + 1 == sorted.size() || sorted(i + 1) <= cand) {
        theta = cand;
        break;
      }
    }
    ev = (ev.array() - theta).max(0.0).matrix();
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

std::vector<TraceSweepEntry> trace_sweep(const ChannelPair& ch, double p,
                                         const std::vector<std::array<double, 2>>& weights,
                                         const OptimizerConfig& cfg) {
  if (!(p >= 0.0)) throw NumericalError("trace_sweep: p must be >= 0");
  for (const auto& w : weights) {
    if (w[0] < 0.0 || w[1] < 0.0) throw NumericalError("trace_sweep: weights must be nonnegative");
  }
  const Eigen::Index d = ch.transmit_dim();
  std::vector<TraceSweepEntry> entries(weights.size());

  OptimizerConfig inner = cfg;
  inner.n_starts = 2;  // warm starts make the inner solve cheap along the sweep

  parallel_for(weights.size(), [&](std::size_t wi) {
    const double w1 = weights[wi][0];
    const double w2 = weights[wi][1];
    TraceSweepEntry entry;
    entry.w1 = w1;
    entry.w2 = w2;
    if (p == 0.0 || (w1 == 0.0 && w2 == 0.0)) {
      entry.s = SymMatrix::zero(d);
      entry.c = 0.0;
      entry.cs = 0.0;
      entries[wi] = entry;
      return;
    }

    Matrix s = (p / static_cast<double>(d)) * Matrix::Identity(d, d);
    std::vector<Matrix> warm;
    double step = std::max(1.0, p);
    bool converged = false;
    for (int it = 0; it < cfg.trace_outer_iters; ++it) {
      SecrecySolve sol = secrecy_solve(ch, SymMatrix(s), inner, warm);
      warm.assign(1, sol.m.size() > 0 ? sol.m : Matrix());
      if (warm[0].size() == 0) warm.clear();

      // Danskin surrogate: capacity exactly, secrecy at the fixed inner optimum.
      auto surrogate = [&](const Matrix& sm) {
        SymMatrix ssym(sm);
        double val = w1 * capacity(ch.h_r, ssym);
        if (w2 > 0.0 && sol.m.size() > 0) {
          RangeFactor f = range_factor(ssym);
          if (f.rank == sol.m.rows()) {
            SymMatrix b(f.s12 * sol.m * f.s12.transpose());
            val += w2 * secrecy_objective(ch, b);
          } else {
            val += w2 * secrecy_solve(ch, ssym, inner, warm).value;
          }
        }
        return val;
      };

      // Forward differences over the symmetric coordinates.
      double base = surrogate(s);
      double h = 1e-6 * std::max(1.0, s.norm());
      Matrix g = Matrix::Zero(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
          Matrix e = Matrix::Zero(d, d);
          e(i, j) = e(j, i) = 1.0;
          double fp = surrogate(project_trace_psd(s + h * e, p + 1.0));
          double fm = surrogate(project_trace_psd(s - h * e, p + 1.0));
          double der = (fp - fm) / (2.0 * h);
          g(i, j) = der;
          g(j, i) = der;
        }
      }
      (void)base;

      bool moved = false;
      double local = step;
      for (int ls = 0; ls < 40; ++ls) {
        Matrix st = project_trace_psd(s + local * g, p);
        double movement = (st - s).norm();
        if (movement < 1e-12) break;
        if (surrogate(st) > surrogate(s) + 1e-10) {
          s = st;
          step = local * 2.0;
          moved = true;
          break;
        }
        local *= 0.5;
      }
      if (!moved) {
        converged = true;
        break;
      }
    }

    SymMatrix sfinal(s);
    SecrecySolve final_sol = secrecy_solve(ch, sfinal, cfg, warm);
    entry.s = sfinal;
    entry.c = capacity(ch.h_r, sfinal);
    entry.cs = final_sol.value;
    entry.converged = converged && final_sol.converged;
    entries[wi] = entry;
  });

  return entries;
}

}  // namespace secrecy
