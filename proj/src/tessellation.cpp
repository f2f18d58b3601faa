#include "vcde/tessellation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "vcde/rng.hpp"

namespace vcde {

double weighted_sq_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  if (v.size() != w.size())
    throw std::invalid_argument("weighted_sq_norm: dimension mismatch");
  return (w.array() * v.array().square()).sum();
}

void validate(const Tessellation& tess, const Dataset& data) {
  const int m = tess.size();
  if (m < 1) throw std::invalid_argument("Tessellation: no centers");
  std::unordered_set<int> seen;
  for (int idx : tess.center_idx) {
    if (idx < 0 || idx >= data.n())
      throw std::invalid_argument("Tessellation: center index out of range");
    if (!seen.insert(idx).second)
      throw std::invalid_argument("Tessellation: duplicate center");
  }
  if (tess.w.size() != data.p())
    throw std::invalid_argument("Tessellation: weight dimension mismatch");
  if ((tess.w.array() < 0.0).any())
    throw std::invalid_argument("Tessellation: negative weight");
  if (std::abs(tess.w.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("Tessellation: weights do not sum to 1");
}

namespace {

// Index of the center minimizing the weighted squared distance to row i;
// ties resolve to the earliest center in menu order.
inline int nearest_center(const Eigen::MatrixXd& x, const Eigen::VectorXd& w,
                          const std::vector<int>& centers, Eigen::Index i) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < centers.size(); ++m) {
    const double d =
        (w.array() * (x.row(i) - x.row(centers[m])).transpose().array().square()).sum();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(m);
    }
  }
  return best;
}

}  // namespace

RegionAssignment assign_regions(const Dataset& data, const Tessellation& tess) {
  validate(tess, data);
  const Eigen::Index n = data.n();
  const int m = tess.size();
  RegionAssignment out;
  out.labels.resize(n);
  out.region_sizes.assign(m, 0);

#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i)
    out.labels[i] = nearest_center(data.x, tess.w, tess.center_idx, i);

  for (Eigen::Index i = 0; i < n; ++i) ++out.region_sizes[out.labels[i]];
  return out;
}

RegionAssignment ref::assign_regions(const Dataset& data, const Tessellation& tess) {
  validate(tess, data);
  RegionAssignment out;
  out.labels.resize(data.n());
  out.region_sizes.assign(tess.size(), 0);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const int lab = nearest_center(data.x, tess.w, tess.center_idx, i);
    out.labels[i] = lab;
    ++out.region_sizes[lab];
  }
  return out;
}

double tessellation_log_prior(const Tessellation& tess, int n, int m_max) {
  const int m = tess.size();
  if (m > m_max) throw std::logic_error("tessellation_log_prior: M exceeds M_max");
  if (m > n) throw std::logic_error("tessellation_log_prior: M exceeds n");
  const double log_choose =
      std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
  // flat Dirichlet(1,...,1) density on the simplex is Gamma(p)
  const double log_dirichlet = std::lgamma(static_cast<double>(tess.w.size()));
  return -std::log(static_cast<double>(m_max)) - log_choose + log_dirichlet;
}

namespace {

SymmDiffEstimate symmdiff_impl(const RegionPredicate& region_a,
                               const RegionPredicate& region_b,
                               const Eigen::VectorXd& box_lo,
                               const Eigen::VectorXd& box_hi, long samples,
                               std::uint64_t seed, bool parallel) {
  if (samples < 1000)
    throw std::invalid_argument("partition_symmdiff_estimate: samples < 1000");
  if (box_lo.size() != box_hi.size() || box_lo.size() == 0)
    throw std::invalid_argument("partition_symmdiff_estimate: bad box");
  const Eigen::Index p = box_lo.size();
  double volume = 1.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(box_hi[k] > box_lo[k]))
      throw std::invalid_argument("partition_symmdiff_estimate: degenerate box");
    volume *= box_hi[k] - box_lo[k];
  }

  long hits = 0;
  // one counter-based stream per sample: identical result serial or parallel
#pragma omp parallel for schedule(static) reduction(+ : hits) if (parallel)
  for (long s = 0; s < samples; ++s) {
    SplitMix64 gen(mix64(seed, static_cast<std::uint64_t>(s)));
    Eigen::VectorXd x(p);
    for (Eigen::Index k = 0; k < p; ++k)
      x[k] = box_lo[k] + (box_hi[k] - box_lo[k]) * gen.uniform01();
    if (region_a(x) != region_b(x)) ++hits;
  }

  const double q = static_cast<double>(hits) / static_cast<double>(samples);
  SymmDiffEstimate est;
  est.estimate = q * volume;
  est.std_error = volume * std::sqrt(q * (1.0 - q) / static_cast<double>(samples));
  est.samples = samples;
  return est;
}

}  // namespace

SymmDiffEstimate partition_symmdiff_estimate(const RegionPredicate& region_a,
                                             const RegionPredicate& region_b,
                                             const Eigen::VectorXd& box_lo,
                                             const Eigen::VectorXd& box_hi,
                                             long samples, std::uint64_t seed) {
  return symmdiff_impl(region_a, region_b, box_lo, box_hi, samples, seed, true);
}

SymmDiffEstimate ref::partition_symmdiff_estimate(const RegionPredicate& region_a,
                                                  const RegionPredicate& region_b,
                                                  const Eigen::VectorXd& box_lo,
                                                  const Eigen::VectorXd& box_hi,
                                                  long samples, std::uint64_t seed) {
  return symmdiff_impl(region_a, region_b, box_lo, box_hi, samples, seed, false);
}

}  // namespace vcde
