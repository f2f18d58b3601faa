#include "vcde/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vcde {

namespace {

// equal-tailed quantile of a sorted column, linear interpolation at q*(n-1)
double sorted_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace

DensityEstimate summarize_density(const RegionFit& fit, double level, int n_draws,
                                  std::uint64_t seed, double y_mean, double y_sd) {
  if (!(level > 0.0) || !(level < 1.0))
    throw std::invalid_argument("summarize_density: level must lie in (0, 1)");
  if (n_draws < 1) throw std::invalid_argument("summarize_density: n_draws < 1");
  if (!(y_sd > 0.0)) throw std::invalid_argument("summarize_density: y_sd <= 0");

  const Eigen::MatrixXd draws = density_draws(fit, n_draws, seed);
  const int r = fit.grid.r();

  DensityEstimate est;
  est.mean = draws.colwise().mean();
  est.lower.resize(r);
  est.upper.resize(r);
  const double q_lo = (1.0 - level) / 2.0;
  const double q_hi = (1.0 + level) / 2.0;
  std::vector<double> col(n_draws);
  for (int j = 0; j < r; ++j) {
    for (int d = 0; d < n_draws; ++d) col[d] = draws(d, j);
    std::sort(col.begin(), col.end());
    est.lower[j] = sorted_quantile(col, q_lo);
    est.upper[j] = sorted_quantile(col, q_hi);
  }

  // back to the original response scale: y = y_sd * z + y_mean, so densities
  // pick up a 1/y_sd Jacobian
  est.grid.centers = (y_sd * fit.grid.centers.array() + y_mean).matrix();
  est.grid.lo = y_sd * fit.grid.lo + y_mean;
  est.grid.hi = y_sd * fit.grid.hi + y_mean;
  est.grid.dz = y_sd * fit.grid.dz;
  est.mean /= y_sd;
  est.lower /= y_sd;
  est.upper /= y_sd;
  est.n_draws = n_draws;
  est.level = level;
  return est;
}

std::vector<double> extract_changepoints(const Tessellation& tess,
                                         const Dataset& data) {
  if (data.p() != 1)
    throw std::domain_error("extract_changepoints: requires a single covariate");
  std::vector<double> xs;
  xs.reserve(tess.center_idx.size());
  for (int idx : tess.center_idx)
    xs.push_back(data.col_sds[0] * data.x(idx, 0) + data.col_means[0]);
  std::sort(xs.begin(), xs.end());
  std::vector<double> cps;
  for (std::size_t k = 1; k < xs.size(); ++k)
    cps.push_back(0.5 * (xs[k - 1] + xs[k]));
  return cps;
}

WeightReport weight_report(const Chain& chain) {
  if (chain.samples.empty()) throw std::logic_error("weight_report: empty chain");
  WeightReport rep;
  rep.selected_index = chain.best_by_marginal;
  rep.selected = chain.samples[rep.selected_index].tess.w;
  const Eigen::Index p = rep.selected.size();
  rep.traces.resize(static_cast<Eigen::Index>(chain.samples.size()), p);
  for (std::size_t i = 0; i < chain.samples.size(); ++i)
    rep.traces.row(static_cast<Eigen::Index>(i)) = chain.samples[i].tess.w.transpose();
  return rep;
}

PartitionSummary summarize_partition(const Tessellation& tess, const Dataset& data,
                                     const RegionAssignment& assign) {
  PartitionSummary sum;
  sum.tess = tess;
  const int m = tess.size();
  sum.centers_original.resize(m, data.p());
  for (int i = 0; i < m; ++i)
    sum.centers_original.row(i) =
        (data.x.row(tess.center_idx[i]).array() * data.col_sds.transpose().array() +
         data.col_means.transpose().array())
            .matrix();
  sum.region_sizes = assign.region_sizes;
  sum.weights = tess.w;
  if (data.p() == 1) sum.changepoints = extract_changepoints(tess, data);
  return sum;
}

}  // namespace vcde
