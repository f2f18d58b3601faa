#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "vcde/dataset.hpp"

namespace vcde {

// Weighted Voronoi tessellation state: M centers restricted to observed
// covariate rows, and a simplex weight vector over the covariates.
struct Tessellation {
  std::vector<int> center_idx;  // distinct observation indices; order breaks ties
  Eigen::VectorXd w;            // p nonnegative weights summing to 1

  int size() const { return static_cast<int>(center_idx.size()); }
};

struct RegionAssignment {
  std::vector<int> labels;        // n entries in [0, M)
  std::vector<int> region_sizes;  // M entries summing to n
};

// Squared norm sum_k w_k v_k^2. Throws std::invalid_argument on length
// mismatch.
double weighted_sq_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w);

// Throws std::invalid_argument when the tessellation is inconsistent with
// the dataset (index range, duplicates, weight simplex).
void validate(const Tessellation& tess, const Dataset& data);

// Nearest-center labels under the weighted squared norm. Distance ties go to
// the center listed first in center_idx.
RegionAssignment assign_regions(const Dataset& data, const Tessellation& tess);

// log p(M) + log p(c|M) + log p(w): discrete uniform on M, discrete uniform
// on the (n choose M) center subsets, flat Dirichlet on w. Throws
// std::logic_error if M > M_max.
double tessellation_log_prior(const Tessellation& tess, int n, int m_max);

struct SymmDiffEstimate {
  double estimate;   // Lebesgue measure of the symmetric difference
  double std_error;  // Monte Carlo standard error of the estimate
  long samples;
};

using RegionPredicate = std::function<bool(const Eigen::VectorXd&)>;

// Monte Carlo measure of (A \ B) u (B \ A) inside the axis-aligned box given
// by [box_lo, box_hi]. samples >= 1000; throws std::invalid_argument on a
// degenerate box.
SymmDiffEstimate partition_symmdiff_estimate(const RegionPredicate& region_a,
                                             const RegionPredicate& region_b,
                                             const Eigen::VectorXd& box_lo,
                                             const Eigen::VectorXd& box_hi,
                                             long samples, std::uint64_t seed);

// Straightforward single-threaded implementations of the parallel kernels,
// kept as references for the tests and the benchmark target.
namespace ref {
RegionAssignment assign_regions(const Dataset& data, const Tessellation& tess);
SymmDiffEstimate partition_symmdiff_estimate(const RegionPredicate& region_a,
                                             const RegionPredicate& region_b,
                                             const Eigen::VectorXd& box_lo,
                                             const Eigen::VectorXd& box_hi,
                                             long samples, std::uint64_t seed);
}  // namespace ref

}  // namespace vcde
