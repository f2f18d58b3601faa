#pragma once

#include <cstdint>
#include <vector>

#include "vcde/dataset.hpp"
#include "vcde/lgp.hpp"
#include "vcde/mcmc.hpp"

namespace vcde {

// Posterior density curve for one region, mapped back to the original y
// scale, with pointwise equal-tailed credible bands.
struct DensityEstimate {
  Grid grid;  // original-scale support
  Eigen::VectorXd mean;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  int region_id = 0;
  int n_draws = 0;
  double level = 0.9;
};

struct PartitionSummary {
  Tessellation tess;
  Eigen::MatrixXd centers_original;  // M x p, de-standardized center rows
  std::vector<int> region_sizes;
  Eigen::VectorXd weights;
  std::vector<double> changepoints;  // original scale; empty unless p = 1
};

// Monte Carlo mean and (1 +/- level)/2 quantile curves from density_draws,
// de-standardized via y = y_sd * z + y_mean (densities divide by y_sd).
DensityEstimate summarize_density(const RegionFit& fit, double level, int n_draws,
                                  std::uint64_t seed, double y_mean, double y_sd);

// Midpoints between adjacent sorted centers for a one-dimensional covariate,
// on the original scale. Throws std::domain_error when p > 1.
std::vector<double> extract_changepoints(const Tessellation& tess, const Dataset& data);

struct WeightReport {
  Eigen::VectorXd selected;       // weights of the selected tessellation
  Eigen::MatrixXd traces;         // samples x p
  std::size_t selected_index = 0;
};

// Weight vector of the best-by-marginal sample plus per-iteration traces.
WeightReport weight_report(const Chain& chain);

PartitionSummary summarize_partition(const Tessellation& tess, const Dataset& data,
                                     const RegionAssignment& assign);

}  // namespace vcde
