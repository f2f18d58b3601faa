#include "vcde/lgp.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#include "vcde/errors.hpp"
#include "vcde/rng.hpp"

namespace vcde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(const Eigen::VectorXd& f) {
  const double m = f.maxCoeff();
  return m + std::log((f.array() - m).exp().sum());
}

Eigen::VectorXd softmax(const Eigen::VectorXd& f) {
  Eigen::VectorXd e = (f.array() - f.maxCoeff()).exp();
  return e / e.sum();
}

void check_params(const KernelParams& params) {
  if (!(params.sigma2 > 0.0) || !(params.length_scale > 0.0))
    throw std::invalid_argument("kernel: sigma2 and length_scale must be positive");
}

// grid-dependent pieces shared by every hyperparameter evaluation
struct PriorWork {
  Eigen::MatrixXd d2;    // squared center distances
  Eigen::MatrixXd hbh;   // H B H^T
  Eigen::VectorXd mean;  // H b
};

PriorWork make_prior_work(const Grid& grid, const BasisPrior& basis_prior) {
  const Eigen::VectorXd& z = grid.centers;
  const Eigen::Index r = z.size();
  PriorWork w;
  w.d2.resize(r, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index k = 0; k < r; ++k) w.d2(j, k) = (z[j] - z[k]) * (z[j] - z[k]);
  Eigen::MatrixXd h(r, 2);
  h.col(0) = z;
  h.col(1) = z.array().square();
  w.hbh = h * basis_prior.B * h.transpose();
  w.mean = h * basis_prior.b;
  return w;
}

// diagonal jitter grows tenfold from 1e-10 to 1e-4 of the covariance scale on
// factorization failure. The scale is sigma2 plus a small share of the trend
// term: H B H^T is only positive semidefinite, so its rounding error sets an
// absolute negativity floor that a purely sigma2-relative ladder cannot clear
// once sigma2 is pushed toward zero.
struct JitterPlan {
  Eigen::MatrixXd base;
  double scale = 0.0;
};

JitterPlan jitter_plan(const PriorWork& work, const KernelParams& params) {
  check_params(params);
  const double two_l2 = 2.0 * params.length_scale * params.length_scale;
  JitterPlan plan;
  plan.base =
      params.sigma2 * (-work.d2.array() / two_l2).exp().matrix() + work.hbh;
  const double hbh_diag =
      work.hbh.size() > 0 ? work.hbh.diagonal().cwiseAbs().maxCoeff() : 0.0;
  plan.scale = params.sigma2 + 1e-3 * hbh_diag;
  return plan;
}

Eigen::MatrixXd jittered_covariance(const PriorWork& work,
                                    const KernelParams& params) {
  const JitterPlan plan = jitter_plan(work, params);
  const Eigen::Index r = plan.base.rows();
  for (double jit = 1e-10 * plan.scale; jit <= 1.0000001e-4 * plan.scale;
       jit *= 10.0) {
    Eigen::MatrixXd cov = plan.base + jit * Eigen::MatrixXd::Identity(r, r);
    if (Eigen::LLT<Eigen::MatrixXd>(cov).info() == Eigen::Success) return cov;
  }
  throw numerical_error("prior_covariance: factorization failed at maximum jitter");
}

struct NewtonResult {
  Eigen::VectorXd f_hat;
  Eigen::VectorXd a_hat;   // C^-1 (f_hat - mean), tracked without inverting C
  double log_lik = 0.0;
  double quad = 0.0;       // a^T (f_hat - mean)
  double log_det_b = 0.0;  // log det(I + W C) at the mode
  Eigen::PartialPivLU<Eigen::MatrixXd> mode_lu;  // factor of I + W C
};

// Newton ascent of the concave log posterior, parameterized by
// a = C^-1 (f - mean) so that C is applied but never inverted; the update
// solves (I + W C) a_new = W (f - mean) + grad_loglik. The warm start only
// changes the start point, never the mode.
NewtonResult newton_core(const BinnedCounts& counts, const Eigen::VectorXd& mean,
                         const Eigen::MatrixXd& cov, const NewtonSettings& settings,
                         const Eigen::VectorXd* warm_a) {
  const Eigen::Index r = mean.size();
  const Eigen::VectorXd y = counts.counts.cast<double>();
  const double n = static_cast<double>(counts.total);

  Eigen::VectorXd a = (warm_a != nullptr && warm_a->size() == r &&
                       warm_a->allFinite())
                          ? *warm_a
                          : Eigen::VectorXd::Zero(r);
  Eigen::VectorXd f = mean + cov * a;

  for (int iter = 0; iter < settings.max_iters; ++iter) {
    const Eigen::VectorXd u = softmax(f);
    const Eigen::VectorXd g = y - n * u;
    const Eigen::VectorXd grad = g - a;
    const double gnorm = grad.lpNorm<Eigen::Infinity>();

    // I + W C assembled from the rank structure of W = n (diag(u) - u u^T)
    const Eigen::RowVectorXd utc = u.transpose() * cov;
    Eigen::MatrixXd m_mat = n * (u.asDiagonal() * cov - u * utc);
    m_mat.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(std::move(m_mat));

    bool at_mode = gnorm < settings.tol;
    if (!at_mode) {
      const Eigen::VectorXd fm = f - mean;
      const Eigen::VectorXd b = n * (u.array() * fm.array()).matrix() -
                                n * u * u.dot(fm) + g;
      const Eigen::VectorXd a_new = lu.solve(b);
      const Eigen::VectorXd delta = a_new - a;
      const Eigen::VectorXd cd = cov * delta;  // f moves along cd

      // psi(a + t*delta) - psi(a) evaluated in difference form so that
      // improvements far below |psi| rounding stay visible near the mode:
      //   t*y.cd - n*log(sum_j u_j e^{t cd_j}) - (t*s1 + t^2*s2)/2
      const double ycd = y.dot(cd);
      const double s1 = a.dot(cd) + delta.dot(fm);
      const double s2 = delta.dot(cd);
      const auto psi_gain = [&](double t) {
        double lse_ratio = 0.0;
        for (Eigen::Index j = 0; j < r; ++j)
          lse_ratio += u[j] * std::expm1(t * cd[j]);
        return t * ycd - n * std::log1p(lse_ratio) -
               0.5 * (t * s1 + t * t * s2);
      };

      double step = 1.0;
      bool improved = false;
      for (int h = 0; h <= settings.max_halvings; ++h) {
        const double gain = psi_gain(step);
        if (std::isfinite(gain) && gain > 0.0) {
          a += step * delta;
          f += step * cd;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) {
        // no ascent step survives rounding, so this is the numerical mode;
        // accept it when the gradient already sits within a few digits of
        // the target, otherwise report the stall
        if (gnorm > 1e3 * settings.tol)
          throw convergence_error("newton_mode: step halving exhausted", gnorm);
        at_mode = true;
      }
    }

    if (at_mode) {
      NewtonResult res;
      res.f_hat = f;
      res.a_hat = a;
      res.log_lik = y.dot(f) - n * logsumexp(f);
      res.quad = a.dot(f - mean);
      double log_det = 0.0;
      for (Eigen::Index j = 0; j < r; ++j) {
        const double piv = std::abs(lu.matrixLU()(j, j));
        if (piv <= 0.0)
          throw numerical_error("newton_mode: singular curvature at the mode");
        log_det += std::log(piv);
      }
      res.log_det_b = log_det;
      res.mode_lu = std::move(lu);
      return res;
    }
  }

  const Eigen::VectorXd u = softmax(f);
  const double gnorm = (y - n * u - a).lpNorm<Eigen::Infinity>();
  throw convergence_error("newton_mode: iteration limit reached", gnorm);
}

// mode solve that walks the same jitter ladder as jittered_covariance but
// also escalates when the ascent itself stalls: a covariance can factorize
// yet be so ill-conditioned (deep small-sigma2 regime, base ~ rank-2 trend
// plus a whisper of ridge) that step halving exhausts at rounding noise.
// One rung up is invisible in the marginal there because the jitter-level
// directions enter only through det(I + WC) as log(1 + W*jit) ~ 0.
NewtonResult solve_mode_jittered(const BinnedCounts& counts,
                                 const PriorWork& work,
                                 const KernelParams& params,
                                 const NewtonSettings& settings,
                                 Eigen::MatrixXd* cov_out) {
  const JitterPlan plan = jitter_plan(work, params);
  const Eigen::Index r = plan.base.rows();
  std::exception_ptr stalled;
  for (double jit = 1e-10 * plan.scale; jit <= 1.0000001e-4 * plan.scale;
       jit *= 10.0) {
    Eigen::MatrixXd cov = plan.base + jit * Eigen::MatrixXd::Identity(r, r);
    if (Eigen::LLT<Eigen::MatrixXd>(cov).info() != Eigen::Success) continue;
    try {
      NewtonResult res = newton_core(counts, work.mean, cov, settings, nullptr);
      if (cov_out) *cov_out = std::move(cov);
      return res;
    } catch (const convergence_error&) {
      stalled = std::current_exception();
    }
  }
  if (stalled) std::rethrow_exception(stalled);
  throw numerical_error("prior_covariance: factorization failed at maximum jitter");
}

// the half log det of the prior covariance cancels between the Gaussian
// normalizer and the Laplace integral, leaving log det(I + W C)
double laplace_log_marginal(const NewtonResult& res) {
  return res.log_lik - 0.5 * res.quad - 0.5 * res.log_det_b;
}

// Sigma = (C^-1 + W)^-1 = (I + C W)^-1 C, solved off the mode factorization
Eigen::MatrixXd laplace_sigma(const NewtonResult& res, const Eigen::MatrixXd& cov) {
  Eigen::MatrixXd sigma = res.mode_lu.transpose().solve(cov);
  return 0.5 * (sigma + sigma.transpose());
}

// half-Cauchy log density at v >= 0 with scale s
double half_cauchy_log(double v, double s) {
  return std::log(2.0 / (M_PI * s)) - std::log1p((v / s) * (v / s));
}

void fill_normals(SplitMix64& gen, Eigen::VectorXd& out) {
  const double two_pi = 6.283185307179586476925286766559;
  for (Eigen::Index j = 0; j < out.size(); j += 2) {
    const double u1 = ((gen.next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = gen.uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    out[j] = rad * std::cos(two_pi * u2);
    if (j + 1 < out.size()) out[j + 1] = rad * std::sin(two_pi * u2);
  }
}

Eigen::MatrixXd density_draws_impl(const RegionFit& fit, int n_draws,
                                   std::uint64_t seed, bool parallel) {
  if (n_draws < 1) throw std::invalid_argument("density_draws: n_draws < 1");
  const Eigen::Index r = fit.grid.r();
  if (fit.f_hat.size() != r || fit.sigma_post.rows() != r ||
      fit.sigma_post.cols() != r || !(fit.grid.dz > 0.0))
    throw std::invalid_argument("density_draws: inconsistent fit");

  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(r, r);
  if (fit.sigma_post.lpNorm<Eigen::Infinity>() > 0.0) {
    const double scale = fit.sigma_post.diagonal().array().abs().maxCoeff();
    if (!(scale > 0.0))
      throw numerical_error("density_draws: covariance has a zero diagonal");
    bool ok = false;
    for (double jit = 0.0; jit <= 1.0000001e-6 * scale;
         jit = (jit == 0.0 ? 1e-12 * scale : jit * 10.0)) {
      Eigen::LLT<Eigen::MatrixXd> llt(
          fit.sigma_post + jit * Eigen::MatrixXd::Identity(r, r));
      if (llt.info() == Eigen::Success) {
        chol = llt.matrixL();
        ok = true;
        break;
      }
    }
    if (!ok)
      throw numerical_error("density_draws: covariance factorization failed");
  }

  Eigen::MatrixXd out(n_draws, r);
#pragma omp parallel for schedule(static) if (parallel)
  for (int d = 0; d < n_draws; ++d) {
    SplitMix64 gen(mix64(seed, static_cast<std::uint64_t>(d)));
    Eigen::VectorXd eps(r);
    fill_normals(gen, eps);
    const Eigen::VectorXd g = fit.f_hat + chol * eps;
    out.row(d) = ((g.array() - logsumexp(g)).exp() / fit.grid.dz).transpose();
  }
  return out;
}

}  // namespace

Grid build_grid(const Eigen::VectorXd& y_region, int r, double pad_frac) {
  if (r < 3) throw std::invalid_argument("build_grid: need at least 3 subregions");
  if (y_region.size() == 0) throw std::invalid_argument("build_grid: empty input");
  if (!y_region.allFinite())
    throw std::invalid_argument("build_grid: non-finite input");
  if (pad_frac < 0.0) throw std::invalid_argument("build_grid: negative pad_frac");

  const double mn = y_region.minCoeff();
  const double mx = y_region.maxCoeff();
  double range = mx - mn;
  if (range <= 0.0) range = 1.0;  // single distinct value
  Grid grid;
  grid.lo = mn - pad_frac * range;
  grid.hi = mx + pad_frac * range;
  if (!(grid.hi > grid.lo))
    throw std::invalid_argument("build_grid: degenerate support");
  grid.dz = (grid.hi - grid.lo) / r;
  grid.centers.resize(r);
  for (int j = 0; j < r; ++j) grid.centers[j] = grid.lo + (j + 0.5) * grid.dz;
  return grid;
}

BinnedCounts bin_counts(const Eigen::VectorXd& y_region, const Grid& grid) {
  const int r = grid.r();
  if (r < 1 || !(grid.dz > 0.0))
    throw std::invalid_argument("bin_counts: bad grid");
  BinnedCounts out;
  out.counts = Eigen::VectorXi::Zero(r);
  for (Eigen::Index i = 0; i < y_region.size(); ++i) {
    const double y = y_region[i];
    if (!std::isfinite(y) || y < grid.lo || y > grid.hi)
      throw std::domain_error("bin_counts: value outside the grid support");
    const double u = (y - grid.lo) / grid.dz;
    long k = static_cast<long>(std::floor(u));
    // a value exactly on an interior edge is equidistant to the two
    // neighboring centers; the tie goes to the lower bin
    if (static_cast<double>(k) == u && k > 0) --k;
    k = std::clamp(k, 0L, static_cast<long>(r - 1));
    ++out.counts[static_cast<int>(k)];
  }
  out.total = y_region.size();
  return out;
}

Eigen::MatrixXd kernel_matrix(const Grid& grid, const KernelParams& params) {
  check_params(params);
  const Eigen::VectorXd& z = grid.centers;
  const Eigen::Index r = z.size();
  const double two_l2 = 2.0 * params.length_scale * params.length_scale;
  Eigen::MatrixXd k(r, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < r; ++i)
      k(i, j) = params.sigma2 * std::exp(-(z[i] - z[j]) * (z[i] - z[j]) / two_l2);
  return k;
}

Eigen::MatrixXd basis_matrix(const Grid& grid) {
  Eigen::MatrixXd h(grid.r(), 2);
  h.col(0) = grid.centers;
  h.col(1) = grid.centers.array().square();
  return h;
}

Eigen::MatrixXd prior_covariance(const Grid& grid, const KernelParams& params,
                                 const BasisPrior& basis_prior) {
  return jittered_covariance(make_prior_work(grid, basis_prior), params);
}

Eigen::VectorXd prior_mean(const Grid& grid, const BasisPrior& basis_prior) {
  return basis_matrix(grid) * basis_prior.b;
}

double log_likelihood(const Eigen::VectorXd& f, const BinnedCounts& counts) {
  if (f.size() != counts.counts.size())
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  if (counts.total == 0) return 0.0;
  return counts.counts.cast<double>().dot(f) -
         static_cast<double>(counts.total) * logsumexp(f);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> newton_mode(
    const BinnedCounts& counts, const Eigen::VectorXd& prior_mean,
    const Eigen::MatrixXd& prior_cov, const NewtonSettings& settings) {
  const Eigen::Index r = prior_mean.size();
  if (counts.counts.size() != r || prior_cov.rows() != r || prior_cov.cols() != r)
    throw std::invalid_argument("newton_mode: dimension mismatch");
  if (counts.total == 0) return {prior_mean, prior_cov};
  if (Eigen::LLT<Eigen::MatrixXd>(prior_cov).info() != Eigen::Success)
    throw numerical_error("newton_mode: prior covariance not positive definite");

  const NewtonResult res = newton_core(counts, prior_mean, prior_cov, settings,
                                       nullptr);
  return {res.f_hat, laplace_sigma(res, prior_cov)};
}

double log_marginal(const BinnedCounts& counts, const Grid& grid,
                    const KernelParams& params, const BasisPrior& basis_prior,
                    const NewtonSettings& settings) {
  if (counts.counts.size() != grid.r())
    throw std::invalid_argument("log_marginal: dimension mismatch");
  if (counts.total == 0) {
    check_params(params);
    return 0.0;
  }
  const PriorWork work = make_prior_work(grid, basis_prior);
  return laplace_log_marginal(
      solve_mode_jittered(counts, work, params, settings, nullptr));
}

MapResult map_hyperparams(const BinnedCounts& counts, const Grid& grid,
                          const BasisPrior& basis_prior, const KernelParams& init,
                          const NewtonSettings& settings) {
  if (counts.counts.size() != grid.r())
    throw std::invalid_argument("map_hyperparams: dimension mismatch");
  check_params(init);

  const PriorWork work = make_prior_work(grid, basis_prior);
  const double s_sigma = std::sqrt(10.0);
  const double s_len = 1.0;

  // solve the mode tighter than the caller asks for the final fit: warm
  // starts make the objective history-dependent at the Newton tolerance
  // scale, and that jitter must sit well below the finite-difference step
  // for the gradient to be usable
  NewtonSettings inner = settings;
  inner.tol = std::min(settings.tol, 1e-9);

  Eigen::VectorXd warm;
  Eigen::Vector2d best_th = Eigen::Vector2d::Zero();
  double best_val = -kInf;

  // objective in theta = (log sigma2, log length_scale)
  const auto eval = [&](const Eigen::Vector2d& th) -> double {
    const KernelParams p{std::exp(th[0]), std::exp(th[1])};
    if (!std::isfinite(p.sigma2) || !std::isfinite(p.length_scale) ||
        p.sigma2 <= 0.0 || p.length_scale <= 0.0)
      return -kInf;
    try {
      const Eigen::MatrixXd cov = jittered_covariance(work, p);
      const NewtonResult res = newton_core(counts, work.mean, cov, inner,
                                           warm.size() > 0 ? &warm : nullptr);
      warm = res.a_hat;
      const double obj = laplace_log_marginal(res) +
                         half_cauchy_log(std::sqrt(p.sigma2), s_sigma) +
                         half_cauchy_log(p.length_scale, s_len);
      if (!std::isfinite(obj)) return -kInf;
      if (obj > best_val) {
        best_val = obj;
        best_th = th;
      }
      return obj;
    } catch (const numerical_error&) {
      return -kInf;
    }
  };

  const double fd_h = 1e-4;
  const auto fd_grad = [&](const Eigen::Vector2d& th) {
    Eigen::Vector2d g;
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d hi = th, lo = th;
      hi[k] += fd_h;
      lo[k] -= fd_h;
      g[k] = (eval(hi) - eval(lo)) / (2.0 * fd_h);
    }
    return g;
  };

  Eigen::Vector2d th(std::log(init.sigma2), std::log(init.length_scale));
  double val = eval(th);
  if (val == -kInf) {
    // surface the underlying failure instead of the -inf sentinel
    const Eigen::MatrixXd cov = jittered_covariance(work, init);
    newton_core(counts, work.mean, cov, inner, nullptr);
    throw numerical_error("map_hyperparams: objective undefined at the start");
  }

  const double gtol = 1e-5;
  // accept a rounding-noise stall as converged when the gradient is already
  // small: near an optimum the achievable improvement per step falls to
  // ~eps*|objective|, which for large |objective| is hit before gtol is
  const double gtol_stall = 1e-3;
  const int max_iters = 100;
  Eigen::Matrix2d hinv = Eigen::Matrix2d::Identity();
  Eigen::Vector2d grad = -fd_grad(th);  // gradient of the negated objective
  bool strict = false;

  for (int it = 0; it < max_iters; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() < gtol) {
      strict = true;
      break;
    }
    Eigen::Vector2d dir = -hinv * grad;
    if (dir.dot(grad) >= 0.0) {  // not a descent direction, reset
      hinv.setIdentity();
      dir = -grad;
    }
    // cap the step in log space; an unscaled first step can vault over an
    // interior optimum onto the flat small-length-scale plateau and stall
    const double dir_norm = dir.lpNorm<Eigen::Infinity>();
    if (dir_norm > 2.0) dir *= 2.0 / dir_norm;
    const double slope = grad.dot(dir);
    double step = 1.0;
    bool accepted = false;
    Eigen::Vector2d th_new;
    double val_new = -kInf;
    for (int h = 0; h < 40; ++h) {
      // keep exp(th) well inside double range; flat tails otherwise let the
      // iterate drift to overflow before the gradient test can stop it
      th_new = (th + step * dir).cwiseMax(-46.0).cwiseMin(46.0);
      val_new = eval(th_new);
      // value-based Armijo saturates at rounding resolution near an optimum,
      // so allow a few ulps of slack instead of stalling unconverged
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                           (std::abs(val) + std::abs(val_new) + 1.0);
      if (val_new > -kInf && -val_new <= -val + 1e-4 * step * slope + slack) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::Vector2d grad_new = -fd_grad(th_new);
    const Eigen::Vector2d s = th_new - th;
    const Eigen::Vector2d yv = grad_new - grad;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      const Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
      hinv = (eye - s * yv.transpose() / sy) * hinv *
                 (eye - yv * s.transpose() / sy) +
             s * s.transpose() / sy;
    }
    th = th_new;
    val = val_new;
    grad = grad_new;
  }

  MapResult out;
  if (strict) {
    out.params = KernelParams{std::exp(th[0]), std::exp(th[1])};
    out.objective = val;
    out.converged = true;
  } else {
    out.params = KernelParams{std::exp(best_th[0]), std::exp(best_th[1])};
    out.objective = best_val;
    out.converged =
        grad.allFinite() && grad.lpNorm<Eigen::Infinity>() < gtol_stall;
  }
  return out;
}

RegionFit fit_region(const Eigen::VectorXd& y_region, int r, double pad_frac,
                     const BasisPrior& basis_prior, const KernelParams& hyper_init,
                     const NewtonSettings& settings) {
  RegionFit fit;
  fit.grid = build_grid(y_region, r, pad_frac);
  fit.counts = bin_counts(y_region, fit.grid);
  const MapResult map =
      map_hyperparams(fit.counts, fit.grid, basis_prior, hyper_init, settings);
  fit.params = map.params;
  fit.hyper_converged = map.converged;

  // the reported fit is recomputed cold so it does not depend on the
  // optimizer's evaluation history
  const PriorWork work = make_prior_work(fit.grid, basis_prior);
  Eigen::MatrixXd cov;
  const NewtonResult res =
      solve_mode_jittered(fit.counts, work, fit.params, settings, &cov);
  fit.f_hat = res.f_hat;
  fit.sigma_post = laplace_sigma(res, cov);
  fit.log_marginal = laplace_log_marginal(res);
  return fit;
}

RegionEval eval_region(const Eigen::VectorXd& y_region, int r, double pad_frac,
                       const BasisPrior& basis_prior, const KernelParams& hyper_init,
                       const NewtonSettings& settings) {
  const Grid grid = build_grid(y_region, r, pad_frac);
  const BinnedCounts counts = bin_counts(y_region, grid);
  const MapResult map =
      map_hyperparams(counts, grid, basis_prior, hyper_init, settings);
  const PriorWork work = make_prior_work(grid, basis_prior);
  const NewtonResult res =
      solve_mode_jittered(counts, work, map.params, settings, nullptr);
  RegionEval out;
  out.params = map.params;
  out.log_marginal = laplace_log_marginal(res);
  out.log_marginal_y =
      out.log_marginal - static_cast<double>(counts.total) * std::log(grid.dz);
  out.hyper_converged = map.converged;
  return out;
}

Eigen::MatrixXd density_draws(const RegionFit& fit, int n_draws,
                              std::uint64_t seed) {
  return density_draws_impl(fit, n_draws, seed, true);
}

Eigen::MatrixXd ref::density_draws(const RegionFit& fit, int n_draws,
                                   std::uint64_t seed) {
  return density_draws_impl(fit, n_draws, seed, false);
}

}  // namespace vcde
