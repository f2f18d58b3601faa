#pragma once

// Independent reimplementations used to cross-check the library. Everything
// here favors clarity over speed: plain loops, no shared code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "vcde/dataset.hpp"
#include "vcde/lgp.hpp"
#include "vcde/tessellation.hpp"

namespace oracle {

// exhaustive nearest-center scan, ties to the first-listed center
inline std::vector<int> brute_force_labels(const vcde::Dataset& data,
                                           const vcde::Tessellation& tess) {
  std::vector<int> labels(static_cast<std::size_t>(data.n()), -1);
  for (Eigen::Index row = 0; row < data.n(); ++row) {
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int i = 0; i < tess.size(); ++i) {
      double dist = 0.0;
      for (Eigen::Index k = 0; k < data.p(); ++k) {
        const double diff = data.x(row, k) - data.x(tess.center_idx[i], k);
        dist += tess.w[k] * diff * diff;
      }
      if (dist < best) {
        best = dist;
        arg = i;
      }
    }
    labels[static_cast<std::size_t>(row)] = arg;
  }
  return labels;
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// nearest-grid-center binning by direct distance scan over all centers
inline Eigen::VectorXi histogram_counts(const Eigen::VectorXd& y,
                                        const vcde::Grid& grid) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(grid.r());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int j = 0; j < grid.r(); ++j) {
      const double dist = std::abs(y[i] - grid.centers[j]);
      if (dist < best - 1e-14) {  // ties stay with the lower index
        best = dist;
        arg = j;
      }
    }
    ++counts[arg];
  }
  return counts;
}

inline Eigen::MatrixXd kernel_loop(const Eigen::VectorXd& z, double sigma2,
                                   double length_scale) {
  const Eigen::Index r = z.size();
  Eigen::MatrixXd k(r, r);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b) {
      const double diff = z[a] - z[b];
      k(a, b) = sigma2 * std::exp(-diff * diff / (2.0 * length_scale * length_scale));
    }
  return k;
}

// two-pass likelihood without a logsumexp guard; fine at moderate magnitudes
inline double loglik_naive(const Eigen::VectorXd& f, const Eigen::VectorXi& counts) {
  double dot = 0.0, sum_exp = 0.0;
  long n = 0;
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    dot += static_cast<double>(counts[j]) * f[j];
    sum_exp += std::exp(f[j]);
    n += counts[j];
  }
  return dot - static_cast<double>(n) * std::log(sum_exp);
}

// exact gradient of log p(y*|f) + log N(f | m, C)
inline Eigen::VectorXd log_post_grad(const Eigen::VectorXd& f,
                                     const Eigen::VectorXi& counts,
                                     const Eigen::VectorXd& m,
                                     const Eigen::MatrixXd& cov) {
  const double n = static_cast<double>(counts.sum());
  const Eigen::VectorXd shifted = f.array() - f.maxCoeff();
  Eigen::VectorXd u = shifted.array().exp();
  u /= u.sum();
  const Eigen::VectorXd cnt = counts.cast<double>();
  return cnt - n * u - cov.ldlt().solve(f - m);
}

inline double log_post_value(const Eigen::VectorXd& f, const Eigen::VectorXi& counts,
                             const Eigen::VectorXd& m, const Eigen::MatrixXd& cov) {
  const double n = static_cast<double>(counts.sum());
  const double mx = f.maxCoeff();
  const double lse = mx + std::log((f.array() - mx).exp().sum());
  const Eigen::VectorXd cnt = counts.cast<double>();
  const Eigen::VectorXd diff = f - m;
  return cnt.dot(f) - n * lse - 0.5 * diff.dot(cov.ldlt().solve(diff));
}

// plain BFGS ascent with backtracking; generic maximizer used to cross-check
// the dedicated Newton iteration
inline Eigen::VectorXd maximize_log_post(const Eigen::VectorXi& counts,
                                         const Eigen::VectorXd& m,
                                         const Eigen::MatrixXd& cov,
                                         double gtol = 1e-9, int max_iters = 20000) {
  const Eigen::Index r = m.size();
  Eigen::VectorXd f = m;
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(r, r);
  Eigen::VectorXd g = log_post_grad(f, counts, m, cov);
  double val = log_post_value(f, counts, m, cov);
  for (int it = 0; it < max_iters; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= gtol) return f;
    Eigen::VectorXd dir = hinv * g;
    if (dir.dot(g) <= 0.0) {
      hinv = Eigen::MatrixXd::Identity(r, r);
      dir = g;
    }
    double step = 1.0;
    Eigen::VectorXd f_new;
    double val_new;
    for (int h = 0; h < 60; ++h) {
      f_new = f + step * dir;
      val_new = log_post_value(f_new, counts, m, cov);
      // the slack keeps the search accepting once true improvements shrink
      // below what the value can resolve in floating point
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                           (std::abs(val) + std::abs(val_new) + 1.0);
      if (std::isfinite(val_new) &&
          val_new > val + 1e-4 * step * dir.dot(g) - slack)
        break;
      step *= 0.5;
    }
    const Eigen::VectorXd g_new = log_post_grad(f_new, counts, m, cov);
    const Eigen::VectorXd s = f_new - f;
    const Eigen::VectorXd yv = g - g_new;  // ascent: y = -(g_new - g)
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      const Eigen::VectorXd hy = hinv * yv;
      hinv += ((sy + yv.dot(hy)) / (sy * sy)) * (s * s.transpose()) -
              (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    f = f_new;
    g = g_new;
    val = val_new;
  }
  throw std::runtime_error("oracle maximize_log_post: no convergence");
}

// central-difference Hessian of the exact log posterior
inline Eigen::MatrixXd fd_hessian_log_post(const Eigen::VectorXd& f,
                                           const Eigen::VectorXi& counts,
                                           const Eigen::VectorXd& m,
                                           const Eigen::MatrixXd& cov,
                                           double h = 1e-5) {
  const Eigen::Index r = f.size();
  Eigen::MatrixXd hess(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::VectorXd fp = f, fm = f;
    fp[j] += h;
    fm[j] -= h;
    const Eigen::VectorXd gp = log_post_grad(fp, counts, m, cov);
    const Eigen::VectorXd gm = log_post_grad(fm, counts, m, cov);
    hess.col(j) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

struct GaussHermite {
  Eigen::VectorXd nodes;        // roots of H_q
  Eigen::VectorXd log_weights;  // for the e^{-x^2} weight function
};

// Golub-Welsch on the symmetric Jacobi matrix
inline GaussHermite gauss_hermite(int order) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    jac(k - 1, k) = off;
    jac(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussHermite gh;
  gh.nodes = es.eigenvalues();
  gh.log_weights.resize(order);
  const double log_mu0 = 0.5 * std::log(M_PI);  // integral of e^{-x^2}
  for (int i = 0; i < order; ++i) {
    const double q0 = es.eigenvectors()(0, i);
    gh.log_weights[i] = log_mu0 + 2.0 * std::log(std::abs(q0));
  }
  return gh;
}

// log of  integral  p(y*|f) N(f | m, C) df  over R^3 by product quadrature;
// f = m + sqrt(2) L s with C = L L^T turns it into a Gauss-Hermite sum
inline double log_marginal_quadrature_r3(const Eigen::VectorXi& counts,
                                         const Eigen::VectorXd& m,
                                         const Eigen::MatrixXd& cov, int order) {
  if (m.size() != 3) throw std::invalid_argument("quadrature oracle expects r=3");
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  const GaussHermite gh = gauss_hermite(order);
  const double log_norm = -1.5 * std::log(M_PI);  // (pi)^{-d/2}, d=3
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(order) * order * order);
  Eigen::Vector3d s;
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c) {
        s << gh.nodes[a], gh.nodes[b], gh.nodes[c];
        const Eigen::VectorXd f = m + std::sqrt(2.0) * (l * s);
        terms.push_back(gh.log_weights[a] + gh.log_weights[b] + gh.log_weights[c] +
                        loglik_naive(f, counts));
      }
  const double mx = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - mx);
  return log_norm + mx + std::log(acc);
}

// regularized upper incomplete gamma Q(a, x); series + continued fraction
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double log_pre = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - std::exp(log_pre) * sum;  // 1 - P(a, x)
  }
  // Lentz continued fraction for Q
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(log_pre) * h;
}

inline double chi2_sf(double stat, int dof) { return gamma_q(dof / 2.0, stat / 2.0); }

// M-walk of the sampler under a constant likelihood: up/down flows are the
// menu probabilities damped by the acceptance min(1, menu ratio)
inline Eigen::MatrixXd prior_only_transition_matrix(int m_max) {
  const auto menu = [m_max](int m, bool birth) {
    const int n_avail = 2 + (m < m_max ? 1 : 0) + (m > 1 ? 1 : 0);
    if (birth && m >= m_max) return 0.0;
    if (!birth && m <= 1) return 0.0;
    return 1.0 / n_avail;
  };
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m_max, m_max);
  for (int m = 1; m <= m_max; ++m) {
    double up = 0.0, down = 0.0;
    if (m < m_max)
      up = menu(m, true) * std::min(1.0, menu(m + 1, false) / menu(m, true));
    if (m > 1)
      down = menu(m, false) * std::min(1.0, menu(m - 1, true) / menu(m, false));
    if (m < m_max) p(m - 1, m) = up;
    if (m > 1) p(m - 1, m - 2) = down;
    p(m - 1, m - 1) = 1.0 - up - down;
  }
  return p;
}

inline Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& p) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(p.rows(), 1.0 / p.rows());
  for (int it = 0; it < 200000; ++it) {
    Eigen::VectorXd next = p.transpose() * v;
    next /= next.sum();
    if ((next - v).lpNorm<Eigen::Infinity>() < 1e-14) return next;
    v = next;
  }
  return v;
}

inline double log_dirichlet(const Eigen::VectorXd& x, const Eigen::VectorXd& alpha) {
  double out = std::lgamma(alpha.sum());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    out -= std::lgamma(alpha[k]);
    out += (alpha[k] - 1.0) * std::log(std::max(x[k], 1e-15));
  }
  return out;
}

inline std::vector<double> sorted_midpoints(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> mids;
  for (std::size_t k = 1; k < xs.size(); ++k)
    mids.push_back(0.5 * (xs[k - 1] + xs[k]));
  return mids;
}

inline double normal_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

// naive quantile of an unsorted sample, linear interpolation at q*(n-1)
inline double quantile_naive(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double pos = q * static_cast<double>(v.size() - 1);
  std::size_t i = static_cast<std::size_t>(pos);
  if (i > v.size() - 2) i = v.size() - 2;
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

}  // namespace oracle
