#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

namespace vcde {

// Regular discretization of the finite support of y within one region.
struct Grid {
  Eigen::VectorXd centers;  // r strictly increasing subregion midpoints
  double dz = 0.0;          // uniform spacing
  double lo = 0.0;
  double hi = 0.0;

  int r() const { return static_cast<int>(centers.size()); }
};

struct BinnedCounts {
  Eigen::VectorXi counts;
  long total = 0;  // n_i
};

// Squared-exponential kernel hyperparameters.
struct KernelParams {
  double sigma2 = 1.0;        // magnitude
  double length_scale = 1.0;  // l
};

// Gaussian prior on the quadratic-trend basis coefficients, h(z) = (z, z^2).
struct BasisPrior {
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  Eigen::Matrix2d B = 100.0 * Eigen::Matrix2d::Identity();
};

// Laplace fit of the latent density in one region.
struct RegionFit {
  Grid grid;
  BinnedCounts counts;
  KernelParams params;
  Eigen::VectorXd f_hat;       // latent posterior mode
  Eigen::MatrixXd sigma_post;  // Laplace covariance
  double log_marginal = 0.0;
  bool hyper_converged = true;
};

struct NewtonSettings {
  double tol = 1e-6;      // max-norm of the gradient at the mode
  int max_iters = 100;
  int max_halvings = 20;
};

// Support [min - pad_frac*range, max + pad_frac*range] split into r uniform
// bins with midpoint centers; a zero data range falls back to range 1.
// Throws std::invalid_argument for r < 3 or empty/non-finite input.
Grid build_grid(const Eigen::VectorXd& y_region, int r, double pad_frac);

// Nearest-grid-center counts; edge ties go to the lower-indexed bin.
// Throws std::domain_error when some y lies outside [lo, hi].
BinnedCounts bin_counts(const Eigen::VectorXd& y_region, const Grid& grid);

// K_jk = sigma2 * exp(-(z_j - z_k)^2 / (2 l^2)).
Eigen::MatrixXd kernel_matrix(const Grid& grid, const KernelParams& params);

// Row j = (z_j, z_j^2).
Eigen::MatrixXd basis_matrix(const Grid& grid);

// Prior over the latent values: mean H b, covariance K + H B H^T with enough
// jitter to factorize (1e-10 escalating tenfold to 1e-4, scaled by sigma2
// plus a small share of the H B H^T diagonal so the ladder still clears the
// semidefinite trend term's rounding noise when sigma2 is tiny).
// Throws numerical_error when jitter runs out.
Eigen::MatrixXd prior_covariance(const Grid& grid, const KernelParams& params,
                                 const BasisPrior& basis_prior);
Eigen::VectorXd prior_mean(const Grid& grid, const BasisPrior& basis_prior);

// y*^T f - n_i * logsumexp(f); invariant to shifting f by a constant.
double log_likelihood(const Eigen::VectorXd& f, const BinnedCounts& counts);

// Newton ascent of log p(y|f) + log N(f | prior_mean, prior_cov). Returns the
// mode and the Laplace covariance (C^-1 + n(diag(u) - u u^T))^-1 evaluated at
// the mode. Zero total counts short-circuit to the prior. A point where no
// ascent step survives rounding counts as the mode if its gradient max-norm
// is within 1e3*tol; otherwise throws convergence_error carrying the last
// gradient max-norm.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> newton_mode(
    const BinnedCounts& counts, const Eigen::VectorXd& prior_mean,
    const Eigen::MatrixXd& prior_cov, const NewtonSettings& settings = {});

// Laplace log marginal likelihood
//   log p(y|f_hat) + log N(f_hat | Hb, C) + (r/2) log(2*pi) + 0.5 log|Sigma|.
double log_marginal(const BinnedCounts& counts, const Grid& grid,
                    const KernelParams& params, const BasisPrior& basis_prior,
                    const NewtonSettings& settings = {});

struct MapResult {
  KernelParams params;
  double objective = 0.0;  // log marginal + hyperprior terms at params
  bool converged = true;   // false -> stopped with a large gradient remaining
};

// MAP kernel hyperparameters: maximize log_marginal plus half-Student-t(1)
// hyperpriors (squared scale 10 on sigma, 1 on the length-scale) over
// (log sigma2, log l) with BFGS and central-difference gradients. Converged
// means the gradient max-norm fell below 1e-5, or progress stopped at
// rounding resolution with the gradient already below 1e-3; otherwise the
// best evaluated point is returned with converged=false.
MapResult map_hyperparams(const BinnedCounts& counts, const Grid& grid,
                          const BasisPrior& basis_prior, const KernelParams& init,
                          const NewtonSettings& settings = {});

// build_grid -> bin_counts -> map_hyperparams -> newton_mode -> log_marginal.
RegionFit fit_region(const Eigen::VectorXd& y_region, int r, double pad_frac,
                     const BasisPrior& basis_prior, const KernelParams& hyper_init,
                     const NewtonSettings& settings = {});

// As fit_region but skips the Laplace covariance; the cheap path used inside
// the sampler where only the log marginal is needed.
struct RegionEval {
  KernelParams params;
  double log_marginal = 0.0;    // marginal of the binned counts on this grid
  double log_marginal_y = 0.0;  // log_marginal - n*log(dz): marginal density of
                                // the raw observations; unlike log_marginal it
                                // is comparable across regions with different
                                // grid spacings
  bool hyper_converged = true;
};
RegionEval eval_region(const Eigen::VectorXd& y_region, int r, double pad_frac,
                       const BasisPrior& basis_prior, const KernelParams& hyper_init,
                       const NewtonSettings& settings = {});

// Draws from N(f_hat, sigma_post) pushed through the log-density transform
// p_j = exp(g_j) / (dz * sum_k exp(g_k)); one row per draw, each integrating
// to 1 under the grid quadrature. Deterministic per (fit, seed) and
// independent of thread count.
Eigen::MatrixXd density_draws(const RegionFit& fit, int n_draws, std::uint64_t seed);

namespace ref {
Eigen::MatrixXd density_draws(const RegionFit& fit, int n_draws, std::uint64_t seed);
}

}  // namespace vcde
