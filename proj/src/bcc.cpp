#include "secrecy/bcc.hpp"

#include "secrecy/parallel.hpp"
#include "secrecy/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>

namespace secrecy::bcc {

namespace {

double half_logdet_ratio(const SymMatrix& num, const SymMatrix& den) {
  return 0.5 * (logdet(num) - logdet(den));
}

Matrix inv_spd(const Matrix& m) {
  return SymMatrix(m).mat().llt().solve(Matrix::Identity(m.rows(), m.cols()));
}

void check_split(const SymMatrix& s, const CovarianceSplit& split) {
  if (split.b0.dim() != s.dim() || split.b1.dim() != s.dim()) {
    throw DimensionMismatch("split dimensions do not match S");
  }
  const double tol = 1e-7 * (1.0 + s.mat().norm());
  if (!is_psd(split.b0, tol) || !is_psd(split.b1, tol)) {
    throw NumericalError("split violates b0, b1 >= 0 beyond tolerance");
  }
  if (!psd_leq(SymMatrix(split.b0.mat() + split.b1.mat()), s, tol)) {
    throw NumericalError("split violates b0 + b1 <= S beyond tolerance");
  }
}

}  // namespace

CanonicalChannel canonicalize(const Matrix& h1, const Matrix& h2, const SymMatrix& s, double eps) {
  if (h1.rows() != h1.cols() || h2.rows() != h2.cols() || h1.cols() != s.dim() ||
      h2.cols() != s.dim()) {
    throw DimensionMismatch(
        "canonicalize requires square channel matrices matching S; "
        "use rate_bounds for the general (non-canonical) evaluation");
  }
  CanonicalChannel cc;
  cc.s = s;
  auto noise_of = [&](Matrix h, bool& flag) {
    Eigen::JacobiSVD<Matrix> svd(h);
    double smin = svd.singularValues().minCoeff();
    double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1.0 / eps) {
      h += eps * Matrix::Identity(h.rows(), h.cols());
      flag = true;
    }
    Matrix hinv = h.partialPivLu().solve(Matrix::Identity(h.rows(), h.cols()));
    return SymMatrix(hinv * hinv.transpose());
  };
  cc.n1 = noise_of(h1, cc.perturbed_h1);
  cc.n2 = noise_of(h2, cc.perturbed_h2);
  cc.eps_applied = (cc.perturbed_h1 || cc.perturbed_h2) ? eps : 0.0;
  return cc;
}

RateTriple rate_bounds(const Matrix& h1, const Matrix& h2, const SymMatrix& s,
                       const CovarianceSplit& split) {
  check_split(s, split);
  Matrix rem = s.mat() - split.b0.mat();
  auto gram = [](const Matrix& h, const Matrix& b) {
    return SymMatrix(Matrix::Identity(h.rows(), h.rows()) + h * b * h.transpose());
  };
  double c0_1 = half_logdet_ratio(gram(h1, s.mat()), gram(h1, rem));
  double c0_2 = half_logdet_ratio(gram(h2, s.mat()), gram(h2, rem));
  double raw1 = half_logdet_ratio(gram(h1, split.b1.mat()), gram(h2, split.b1.mat()));
  double raw2 = half_logdet_ratio(gram(h2, rem), gram(h2, split.b1.mat())) -
                half_logdet_ratio(gram(h1, rem), gram(h1, split.b1.mat()));
  RateTriple t;
  t.r0 = std::max(0.0, std::min(c0_1, c0_2));
  t.r1_clamped = raw1 < 0.0;
  t.r2_clamped = raw2 < 0.0;
  t.r1 = std::max(0.0, raw1);
  t.r2 = std::max(0.0, raw2);
  return t;
}

std::array<double, 2> common_rate_components(const CanonicalChannel& cc, const SymMatrix& b0) {
  Matrix rem = cc.s.mat() - b0.mat();
  double c1 = half_logdet_ratio(SymMatrix(cc.s.mat() + cc.n1.mat()), SymMatrix(rem + cc.n1.mat()));
  double c2 = half_logdet_ratio(SymMatrix(cc.s.mat() + cc.n2.mat()), SymMatrix(rem + cc.n2.mat()));
  return {c1, c2};
}

double common_rate(const CanonicalChannel& cc, const SymMatrix& b0) {
  auto c = common_rate_components(cc, b0);
  return std::max(0.0, std::min(c[0], c[1]));
}

double confidential_rate_1(const CanonicalChannel& cc, const SymMatrix& b1) {
  return half_logdet_ratio(SymMatrix(b1.mat() + cc.n1.mat()), cc.n1) -
         half_logdet_ratio(SymMatrix(b1.mat() + cc.n2.mat()), cc.n2);
}

double confidential_rate_2(const CanonicalChannel& cc, const SymMatrix& b0, const SymMatrix& b1) {
  Matrix rem = cc.s.mat() - b0.mat();
  return half_logdet_ratio(SymMatrix(rem + cc.n2.mat()), SymMatrix(b1.mat() + cc.n2.mat())) -
         half_logdet_ratio(SymMatrix(rem + cc.n1.mat()), SymMatrix(b1.mat() + cc.n1.mat()));
}

Matrix confidential_rate_1_gradient(const CanonicalChannel& cc, const SymMatrix& b1) {
  return symmetrize(0.5 * (inv_spd(b1.mat() + cc.n1.mat()) - inv_spd(b1.mat() + cc.n2.mat())));
}

Matrix confidential_rate_2_gradient_b0(const CanonicalChannel& cc, const SymMatrix& b0) {
  Matrix rem = cc.s.mat() - b0.mat();
  return symmetrize(0.5 * (inv_spd(rem + cc.n1.mat()) - inv_spd(rem + cc.n2.mat())));
}

Matrix confidential_rate_2_gradient_b1(const CanonicalChannel& cc, const SymMatrix& b1) {
  return confidential_rate_1_gradient(cc, b1);
}

RateTriple canonical_rate_bounds(const CanonicalChannel& cc, const CovarianceSplit& split) {
  check_split(cc.s, split);
  auto c = common_rate_components(cc, split.b0);
  double raw1 = confidential_rate_1(cc, split.b1);
  double raw2 = confidential_rate_2(cc, split.b0, split.b1);
  RateTriple t;
  t.r0 = std::max(0.0, std::min(c[0], c[1]));
  t.r1_clamped = raw1 < 0.0;
  t.r2_clamped = raw2 < 0.0;
  t.r1 = std::max(0.0, raw1);
  t.r2 = std::max(0.0, raw2);
  return t;
}

double common_rate_max(const CanonicalChannel& cc) { return common_rate(cc, cc.s); }

CovarianceSplit project_split(const CovarianceSplit& split, const SymMatrix& s, int max_rounds,
                              double movement_tol) {
  Matrix b0 = split.b0.mat();
  Matrix b1 = split.b1.mat();
  Matrix p0 = Matrix::Zero(b0.rows(), b0.cols());
  Matrix p1 = p0, p2a = p0, p2b = p0;
  for (int round = 0; round < max_rounds; ++round) {
    Matrix prev0 = b0, prev1 = b1;

    Matrix y = psd_part(SymMatrix(b0 + p0)).mat();
    p0 = b0 + p0 - y;
    b0 = y;

    y = psd_part(SymMatrix(b1 + p1)).mat();
    p1 = b1 + p1 - y;
    b1 = y;

    Matrix u0 = b0 + p2a;
    Matrix u1 = b1 + p2b;
    Matrix excess = psd_part(SymMatrix(u0 + u1 - s.mat())).mat();
    Matrix v0 = u0 - 0.5 * excess;
    Matrix v1 = u1 - 0.5 * excess;
    p2a = u0 - v0;
    p2b = u1 - v1;
    b0 = v0;
    b1 = v1;

    double movement = (b0 - prev0).norm() + (b1 - prev1).norm();
    if (movement < movement_tol) break;
  }
  // Dykstra gives the nearest point only in the limit; finish with plain
  // cyclic projections until the iterate is feasible to high accuracy.
  const double feas_eps = 1e-11 * (1.0 + s.mat().norm());
  for (int round = 0; round < 300; ++round) {
    bool ok0 = min_eigenvalue(SymMatrix(b0)) >= -feas_eps;
    bool ok1 = min_eigenvalue(SymMatrix(b1)) >= -feas_eps;
    bool oks = min_eigenvalue(SymMatrix(s.mat() - b0 - b1)) >= -feas_eps;
    if (ok0 && ok1 && oks) break;
    b0 = psd_part(SymMatrix(b0)).mat();
    b1 = psd_part(SymMatrix(b1)).mat();
    Matrix excess = psd_part(SymMatrix(b0 + b1 - s.mat())).mat();
    b0 -= 0.5 * excess;
    b1 -= 0.5 * excess;
  }
  return CovarianceSplit{SymMatrix(b0), SymMatrix(b1)};
}

namespace {

struct InnerResult {
  CovarianceSplit split;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected ascent over the split spectahedron (or the b1-only box when b0 is
// pinned) with Armijo backtracking. When contract_iters > 0 a fixed-step
// projected-gradient phase follows; it has no sufficient-increase test, so it
// keeps contracting to the stationary point after the line search hits
// floating-point resolution.
InnerResult ascend_split(const CanonicalChannel& cc,
                         const std::function<double(const CovarianceSplit&)>& obj,
                         const std::function<std::pair<Matrix, Matrix>(const CovarianceSplit&)>& grad,
                         CovarianceSplit start, bool fix_b0, int max_iters, double tol,
                         int contract_iters = 0) {
  auto project = [&](const CovarianceSplit& x) -> CovarianceSplit {
    if (!fix_b0) return project_split(x, cc.s);
    // b0 fixed: Dykstra on {b1 >= 0} and {b1 <= S - b0}.
    Matrix cap = cc.s.mat() - x.b0.mat();
    Matrix b = x.b1.mat();
    Matrix p = Matrix::Zero(b.rows(), b.cols());
    Matrix q = p;
    for (int round = 0; round < 50; ++round) {
      Matrix prev = b;
      Matrix y = psd_part(SymMatrix(b + p)).mat();
      p = b + p - y;
      b = y;
      y = cap - psd_part(SymMatrix(cap - (b + q))).mat();
      q = b + q - y;
      b = y;
      if ((b - prev).norm() < 1e-12) break;
    }
    return CovarianceSplit{x.b0, SymMatrix(b)};
  };

  InnerResult r;
  r.split = project(start);
  r.objective = obj(r.split);
  double step = 1.0;
  auto residual_at = [&](const CovarianceSplit& x,
                         const std::pair<Matrix, Matrix>& g) {
    CovarianceSplit probe =
        project(CovarianceSplit{SymMatrix(x.b0.mat() + g.first), SymMatrix(x.b1.mat() + g.second)});
    return (probe.b0.mat() - x.b0.mat()).norm() + (probe.b1.mat() - x.b1.mat()).norm();
  };

  bool stalled = false;
  for (int it = 0; it < max_iters; ++it) {
    r.iterations = it + 1;
    auto [g0, g1] = grad(r.split);
    if (fix_b0) g0.setZero();
    double residual = residual_at(r.split, {g0, g1});
    if (residual <= tol) {
      r.converged = true;
      return r;
    }
    step = std::min(step * 2.0, 1e4);
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      CovarianceSplit trial = project(CovarianceSplit{SymMatrix(r.split.b0.mat() + step * g0),
                                                      SymMatrix(r.split.b1.mat() + step * g1)});
      double vt = obj(trial);
      double ref = ((g0.array() * (trial.b0.mat() - r.split.b0.mat()).array()).sum() +
                    (g1.array() * (trial.b1.mat() - r.split.b1.mat()).array()).sum());
      if (vt >= r.objective + 1e-4 * ref && ref > 0.0) {
        r.split = trial;
        r.objective = vt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
  }

  if (contract_iters > 0) {
    double t = std::clamp(step, 1e-4, 1.0);
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < contract_iters; ++it) {
      auto [g0, g1] = grad(r.split);
      if (fix_b0) g0.setZero();
      double residual = residual_at(r.split, {g0, g1});
      if (residual <= tol) {
        r.converged = true;
        break;
      }
      if (residual > 2.0 * best_res) t *= 0.5;  // oscillation guard
      best_res = std::min(best_res, residual);
      r.split = project(CovarianceSplit{SymMatrix(r.split.b0.mat() + t * g0),
                                        SymMatrix(r.split.b1.mat() + t * g1)});
    }
    r.objective = obj(r.split);
    return r;
  }

  if (stalled) {
    auto g = grad(r.split);
    if (fix_b0) g.first.setZero();
    r.converged = residual_at(r.split, g) <= 10.0 * tol;
  }
  return r;
}

struct StartResult {
  CovarianceSplit split;
  double value = 0.0;
  double beta1 = 0.0, beta2 = 0.0;
  double violation = 0.0;
  int iterations = 0;
  bool converged = false;
};

}  // namespace

SolveResult weighted_sum_solve(const CanonicalChannel& cc, double lambda1, double lambda2,
                               double r0_target, const SolveOptions& opts) {
  if (lambda1 < 0.0 || lambda2 < 0.0) throw NumericalError("weights must be nonnegative");
  const Eigen::Index d = cc.s.dim();
  const double r0max = common_rate_max(cc);
  if (r0_target > r0max + 1e-9) {
    throw InfeasibleError("r0_target " + std::to_string(r0_target) +
                          " exceeds the maximum common rate " + std::to_string(r0max));
  }
  if (opts.fix_b0 && common_rate(cc, opts.b0_fixed) < r0_target - 1e-9) {
    throw InfeasibleError("fixed b0 does not support the requested common rate");
  }

  auto objective = [&](const CovarianceSplit& x) {
    return lambda1 * confidential_rate_1(cc, x.b1) +
           lambda2 * confidential_rate_2(cc, x.b0, x.b1);
  };
  auto objective_grad = [&](const CovarianceSplit& x) -> std::pair<Matrix, Matrix> {
    Matrix g1 = (lambda1 + lambda2) * confidential_rate_1_gradient(cc, x.b1);
    Matrix g0 = lambda2 * confidential_rate_2_gradient_b0(cc, x.b0);
    return {g0, g1};
  };
  auto violation_of = [&](const SymMatrix& b0) {
    auto c = common_rate_components(cc, b0);
    return std::max({0.0, r0_target - c[0], r0_target - c[1]});
  };

  // b0 = t*S with the smallest t supporting r0_target; used to seed starts.
  auto scaled_b0_for = [&](double target) -> SymMatrix {
    if (target <= 0.0) return SymMatrix::zero(d);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      double mid = 0.5 * (lo + hi);
      if (common_rate(cc, SymMatrix(mid * cc.s.mat())) >= target)
        hi = mid;
      else
        lo = mid;
    }
    return SymMatrix(hi * cc.s.mat());
  };

  std::vector<CovarianceSplit> starts;
  if (opts.fix_b0) {
    starts.push_back({opts.b0_fixed, SymMatrix::zero(d)});
    Matrix cap = cc.s.mat() - opts.b0_fixed.mat();
    starts.push_back({opts.b0_fixed, SymMatrix(0.5 * cap)});
    starts.push_back({opts.b0_fixed, SymMatrix(cap)});
  } else {
    SymMatrix b0_seed = scaled_b0_for(r0_target);
    starts.push_back({b0_seed, SymMatrix(0.5 * (cc.s.mat() - b0_seed.mat()))});
    starts.push_back({b0_seed, SymMatrix(cc.s.mat() - b0_seed.mat())});
    starts.push_back({b0_seed, SymMatrix::zero(d)});
  }
  for (int k = 0; k < opts.opt.n_starts; ++k) {
    auto rng = rng_stream(opts.opt.seed, 1000 + static_cast<std::uint64_t>(k));
    SymMatrix m0 = random_spectrum(d, 0.0, 0.6, rng);
    SymMatrix m1 = random_spectrum(d, 0.0, 0.6, rng);
    Matrix s12 = sqrt_psd(cc.s).mat();
    CovarianceSplit cand{SymMatrix(s12 * m0.mat() * s12), SymMatrix(s12 * m1.mat() * s12)};
    if (opts.fix_b0) cand.b0 = opts.b0_fixed;
    starts.push_back(cand);
  }

  const double feas_tol = 1e-6;
  std::vector<StartResult> results(starts.size());

  parallel_for(starts.size(), [&](std::size_t si) {
    StartResult sr;
    CovarianceSplit x = starts[si];
    double beta[2] = {0.0, 0.0};
    int total_iters = 0;
    bool converged = false;

    auto make_al_obj = [&](double mu) {
      return [&, mu](const CovarianceSplit& y) {
        double val = objective(y);
        auto c = common_rate_components(cc, y.b0);
        for (int k = 0; k < 2; ++k) {
          double g = c[k] - r0_target;
          double t = std::max(0.0, beta[k] - mu * g);
          val -= (t * t - beta[k] * beta[k]) / (2.0 * mu);
        }
        return val;
      };
    };
    auto make_al_grad = [&](double mu) {
      return [&, mu](const CovarianceSplit& y) -> std::pair<Matrix, Matrix> {
        auto [g0, g1] = objective_grad(y);
        auto c = common_rate_components(cc, y.b0);
        Matrix rem = cc.s.mat() - y.b0.mat();
        const SymMatrix* noises[2] = {&cc.n1, &cc.n2};
        for (int k = 0; k < 2; ++k) {
          double t = std::max(0.0, beta[k] - mu * (c[k] - r0_target));
          if (t > 0.0) g0 += t * symmetrize(0.5 * inv_spd(rem + noises[k]->mat()));
        }
        return {g0, g1};
      };
    };

    if (opts.fix_b0) {
      auto plain_obj = [&](const CovarianceSplit& y) { return objective(y); };
      InnerResult inner = ascend_split(cc, plain_obj, objective_grad, x, true,
                                       opts.opt.max_iters, opts.opt.grad_tol, 20000);
      x = inner.split;
      total_iters = inner.iterations;
      converged = inner.converged;
    } else {
      double mu = 10.0;
      for (int outer = 0; outer < 25; ++outer) {
        double inner_tol = std::max(1e-11, 1e-4 * std::pow(0.2, outer));
        InnerResult inner = ascend_split(cc, make_al_obj(mu), make_al_grad(mu), x, false,
                                         opts.opt.max_iters, inner_tol);
        x = inner.split;
        total_iters += inner.iterations;

        auto c = common_rate_components(cc, x.b0);
        double viol = 0.0;
        for (int k = 0; k < 2; ++k) {
          double g = c[k] - r0_target;
          beta[k] = std::max(0.0, beta[k] - mu * g);
          viol = std::max(viol, -std::min(0.0, g));
        }
        if (viol <= 1e-10 && inner.converged && inner_tol <= 1e-10) break;
        mu = std::min(mu * 2.0, 1e6);
      }

      // Multiplier refresh at the terminal weight, contraction phase driving
      // the stationarity residual towards 1e-12; the identities checked
      // downstream inherit this precision.
      const double mu_final = 1e6;
      for (int round = 0; round < 4; ++round) {
        InnerResult fin = ascend_split(cc, make_al_obj(mu_final), make_al_grad(mu_final), x,
                                       false, opts.opt.max_iters, 1e-12, 30000);
        x = fin.split;
        total_iters += fin.iterations;
        converged = fin.converged;
        auto c = common_rate_components(cc, x.b0);
        double drift = 0.0;
        for (int k = 0; k < 2; ++k) {
          double nb = std::max(0.0, beta[k] - mu_final * (c[k] - r0_target));
          drift = std::max(drift, std::abs(nb - beta[k]));
          beta[k] = nb;
        }
        if (drift <= 1e-9 && fin.converged) break;
      }
    }

    sr.split = x;
    sr.value = objective(x);
    sr.beta1 = beta[0];
    sr.beta2 = beta[1];
    sr.violation = opts.fix_b0 ? 0.0 : violation_of(x.b0);
    sr.iterations = total_iters;
    sr.converged = converged;
    results[si] = sr;
  });

  // Best feasible start; ties resolved towards the lowest start index.
  std::size_t best = results.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].violation > feas_tol) continue;
    if (best == results.size() || results[i].value > results[best].value + 1e-9) best = i;
  }
  if (best == results.size()) {
    // No feasible start: report the least-violating one, flagged.
    best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
      if (results[i].violation < results[best].violation) best = i;
    results[best].converged = false;
  }

  SolveResult out;
  out.split = results[best].split;
  out.value = results[best].value;
  out.beta1 = results[best].beta1;
  out.beta2 = results[best].beta2;
  out.feasibility_violation = results[best].violation;
  out.iterations = results[best].iterations;
  out.converged = results[best].converged;
  return out;
}

namespace {

// Orthonormal basis of the (numerical) null space of a PSD matrix.
Matrix null_basis(const SymMatrix& m, double act_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < m.dim(); ++i)
    if (es.eigenvalues()(i) <= act_tol) idx.push_back(i);
  Matrix z(m.dim(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) z.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(idx[k]);
  return z;
}

std::vector<Matrix> sym_basis_on(const Matrix& z) {
  std::vector<Matrix> basis;
  for (Eigen::Index a = 0; a < z.cols(); ++a) {
    for (Eigen::Index b = a; b < z.cols(); ++b) {
      Matrix e = z.col(a) * z.col(b).transpose();
      e = symmetrize(e);
      double n = e.norm();
      if (n > 0) basis.push_back(e / n);
    }
  }
  return basis;
}

}  // namespace

KktCertificate kkt_check(const CanonicalChannel& cc, const CovarianceSplit& split, double lambda1,
                         double lambda2, double beta1, double beta2, double r0_target, double tol) {
  const Eigen::Index d = cc.s.dim();
  KktCertificate cert;
  cert.lambda1 = lambda1;
  cert.lambda2 = lambda2;
  cert.beta1 = beta1;
  cert.beta2 = beta2;
  cert.r0_target = r0_target;
  cert.tol = tol;

  Matrix rem = cc.s.mat() - split.b0.mat();
  Matrix slack = rem - split.b1.mat();
  Matrix q1 = inv_spd(rem + cc.n1.mat());
  Matrix q2 = inv_spd(rem + cc.n2.mat());
  Matrix g1 = (lambda1 + lambda2) *
              (inv_spd(split.b1.mat() + cc.n1.mat()) - inv_spd(split.b1.mat() + cc.n2.mat()));
  Matrix g0 = (beta1 + lambda2) * q1 + (beta2 - lambda2) * q2;

  const double act_tol = 1e-7 * (1.0 + cc.s.mat().norm());
  Matrix z0 = null_basis(split.b0, act_tol);
  Matrix z1 = null_basis(split.b1, act_tol);
  Matrix z2 = null_basis(SymMatrix(slack), act_tol);
  auto basis0 = sym_basis_on(z0);
  auto basis1 = sym_basis_on(z1);
  auto basis2 = sym_basis_on(z2);

  const Eigen::Index n0 = static_cast<Eigen::Index>(basis0.size());
  const Eigen::Index n1 = static_cast<Eigen::Index>(basis1.size());
  const Eigen::Index n2 = static_cast<Eigen::Index>(basis2.size());
  const Eigen::Index rows = 2 * d * d;

  Matrix a = Matrix::Zero(rows, n0 + n1 + n2);
  Vector rhs(rows);
  auto put = [&](Eigen::Index row0, const Matrix& m, Eigen::Index col) {
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) a(row0 + i * d + j, col) = m(i, j);
  };
  // Block 1: M2 - M1 = G1. Block 2: M2 - M0 = G0.
  for (Eigen::Index k = 0; k < n0; ++k) put(d * d, -basis0[static_cast<std::size_t>(k)], k);
  for (Eigen::Index k = 0; k < n1; ++k) put(0, -basis1[static_cast<std::size_t>(k)], n0 + k);
  for (Eigen::Index k = 0; k < n2; ++k) {
    put(0, basis2[static_cast<std::size_t>(k)], n0 + n1 + k);
    put(d * d, basis2[static_cast<std::size_t>(k)], n0 + n1 + k);
  }
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      rhs(i * d + j) = g1(i, j);
      rhs(d * d + i * d + j) = g0(i, j);
    }

  Vector x = Vector::Zero(n0 + n1 + n2);
  if (x.size() > 0) x = a.colPivHouseholderQr().solve(rhs);

  Matrix m0 = Matrix::Zero(d, d), m1 = Matrix::Zero(d, d), m2 = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < n0; ++k) m0 += x(k) * basis0[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 0; k < n1; ++k) m1 += x(n0 + k) * basis1[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 0; k < n2; ++k) m2 += x(n0 + n1 + k) * basis2[static_cast<std::size_t>(k)];

  auto& res = cert.residuals;
  res["stationarity_b1"] = (m2 - m1 - g1).norm();
  res["stationarity_b0"] = (m2 - m0 - g0).norm();
  res["psd_m0"] = std::max(0.0, -min_eigenvalue(SymMatrix(m0)));
  res["psd_m1"] = std::max(0.0, -min_eigenvalue(SymMatrix(m1)));
  res["psd_m2"] = std::max(0.0, -min_eigenvalue(SymMatrix(m2)));
  res["slackness_m0_b0"] = (m0 * split.b0.mat()).norm();
  res["slackness_m1_b1"] = (m1 * split.b1.mat()).norm();
  res["slackness_m2_rem"] = (m2 * slack).norm();

  auto c = common_rate_components(cc, split.b0);
  double beta_res = 0.0;
  if (beta1 > tol) beta_res = std::max(beta_res, std::abs(c[0] - r0_target));
  if (beta2 > tol) beta_res = std::max(beta_res, std::abs(c[1] - r0_target));
  res["beta_activity"] = beta_res;

  cert.m0 = psd_part(SymMatrix(m0));
  cert.m1 = psd_part(SymMatrix(m1));
  cert.m2 = psd_part(SymMatrix(m2));

  cert.pass = true;
  for (const auto& [key, value] : res) {
    if (value > tol) cert.pass = false;
    (void)key;
  }
  return cert;
}

EnhancedNoise enhance_noise(const CanonicalChannel& cc, const KktCertificate& cert,
                            const CovarianceSplit& split) {
  const double lsum = cert.lambda1 + cert.lambda2;
  if (lsum <= 0.0) throw NumericalError("enhance_noise requires lambda1 + lambda2 > 0");
  Eigen::LLT<Matrix> llt(cc.n1.mat());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(min_eigenvalue(cc.n1));

  EnhancedNoise out;
  Matrix n1inv = inv_spd(cc.n1.mat());
  Matrix nt = inv_spd(n1inv + cert.m1.mat() / lsum);
  out.n_tilde = SymMatrix(nt);

  const Matrix b1 = split.b1.mat();
  const Matrix rem = cc.s.mat() - split.b0.mat();
  // Multipliers rebuilt so the b1-stationarity equation holds exactly; the
  // identity residuals then isolate complementary-slackness quality.
  Matrix g1 = lsum * (inv_spd(b1 + cc.n1.mat()) - inv_spd(b1 + cc.n2.mat()));
  Matrix m2 = cert.m1.mat() + g1;
  Matrix q1 = inv_spd(rem + cc.n1.mat());
  Matrix q2 = inv_spd(rem + cc.n2.mat());
  Matrix m0 = m2 - (cert.beta1 + cert.lambda2) * q1 - (cert.beta2 - cert.lambda2) * q2;

  auto& res = out.residuals;
  res["order_n1"] = std::max(0.0, -min_eigenvalue(SymMatrix(cc.n1.mat() - nt))) /
                    (1.0 + cc.n1.mat().norm());
  res["order_n2"] = std::max(0.0, -min_eigenvalue(SymMatrix(cc.n2.mat() - nt))) /
                    (1.0 + cc.n2.mat().norm());

  double lhs_det = logdet(SymMatrix(b1 + nt)) + logdet(cc.n1);
  double rhs_det = logdet(SymMatrix(b1 + cc.n1.mat())) + logdet(SymMatrix(nt));
  res["det_identity"] = std::abs(lhs_det - rhs_det) / (1.0 + std::abs(lhs_det));

  Matrix resolvent = lsum * inv_spd(b1 + nt) - lsum * inv_spd(b1 + cc.n2.mat()) - m2;
  res["resolvent_identity"] = resolvent.norm() / (1.0 + (lsum * inv_spd(b1 + cc.n2.mat())).norm());

  double lhs_ratio = logdet(SymMatrix(rem + nt)) - logdet(SymMatrix(b1 + nt));
  double rhs_ratio = logdet(SymMatrix(rem + cc.n2.mat())) - logdet(SymMatrix(b1 + cc.n2.mat()));
  res["ratio_identity"] = std::abs(lhs_ratio - rhs_ratio) / (1.0 + std::abs(lhs_ratio));

  Matrix rate = lsum * inv_spd(rem + nt) - (cert.lambda2 + cert.beta1) * q1 -
                (cert.lambda1 + cert.beta2) * q2 - m0;
  res["rate_identity"] = rate.norm() / (1.0 + (lsum * inv_spd(rem + nt)).norm());

  out.all_identities_hold = true;
  for (const auto& [key, value] : res) {
    if (value > out.identity_tol) out.all_identities_hold = false;
    (void)key;
  }
  return out;
}

RegionSurface region_trace(const Matrix& h1, const Matrix& h2, const SymMatrix& s,
                           const TraceConfig& grid) {
  CanonicalChannel cc = canonicalize(h1, h2, s);
  const double r0max = common_rate_max(cc);
  RegionSurface surface;
  surface.r0_levels = grid.r0_levels;
  surface.lambda_dirs = grid.lambda_dirs;
  surface.samples.resize(static_cast<std::size_t>(grid.r0_levels) *
                         static_cast<std::size_t>(grid.lambda_dirs));

  parallel_for(surface.samples.size(), [&](std::size_t cell) {
    int li = static_cast<int>(cell) / grid.lambda_dirs;
    int di = static_cast<int>(cell) % grid.lambda_dirs;
    double frac = grid.r0_levels == 1 ? 0.0
                                      : static_cast<double>(li) / (grid.r0_levels - 1);
    double r0 = frac * r0max;
    double t = grid.lambda_dirs == 1 ? 0.5 : static_cast<double>(di) / (grid.lambda_dirs - 1);
    double l1 = 1.0 - t;
    double l2 = t;

    SolveOptions opts;
    opts.opt = grid.opt;
    opts.opt.seed = grid.opt.seed ^ (0x51ed2700dcafULL + cell);
    SolveResult sol = weighted_sum_solve(cc, l1, l2, r0, opts);

    SurfaceSample sample;
    sample.r0_target = r0;
    sample.lambda1 = l1;
    sample.lambda2 = l2;
    sample.split = sol.split;
    sample.rates = rate_bounds(h1, h2, s, sol.split);
    sample.converged = sol.converged;
    surface.samples[cell] = sample;
  });

  return surface;
}

Matrix precoding_matrix(const SymMatrix& b, const Matrix& h1) {
  Matrix gram = Matrix::Identity(h1.rows(), h1.rows()) + h1 * b.mat() * h1.transpose();
  return b.mat() * h1.transpose() * SymMatrix(gram).mat().llt().solve(h1);
}

}  // namespace secrecy::bcc
