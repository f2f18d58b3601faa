#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vcde/dataset.hpp"
#include "vcde/lgp.hpp"
#include "vcde/rng.hpp"
#include "vcde/tessellation.hpp"

namespace vcde {

enum class MoveType { birth, death, move, weight };

const char* move_name(MoveType m);

struct McmcConfig {
  int n_iters = 10000;
  int burn_in = 1000;
  int m_max = 10;
  double d = 100.0;          // Dirichlet proposal concentration
  int min_region_size = 10;  // proposals below this are rejected unfitted
  int r = 100;               // grid resolution per region
  double pad_frac = 0.1;
  std::uint64_t seed = 0;
  std::optional<int> initial_center;   // default: uniformly random observation
  std::optional<Eigen::VectorXd> initial_w;  // default: uniform
  BasisPrior basis_prior;
  KernelParams hyper_init;
  NewtonSettings newton;
  bool cache_fits = true;
  // Test hook: replaces every per-region log marginal with this constant,
  // turning the chain into a prior-only sampler over tessellations.
  std::optional<double> likelihood_override;
};

void validate(const McmcConfig& cfg);

struct Proposal {
  Tessellation tess;
  MoveType move = MoveType::weight;
  double log_correction = 0.0;  // proposal-ratio terms of the acceptance ratio
  bool valid = true;            // false when no legal target location exists
};

struct ChainSample {
  Tessellation tess;
  double log_marginal_total = 0.0;  // sum of per-region observation-density marginals
  double log_post_unnorm = 0.0;     // adds the tessellation log prior
  MoveType move_type = MoveType::weight;
  bool accepted = false;
  int iter = 0;
};

struct Chain {
  std::vector<ChainSample> samples;  // one per post-burn-in iteration
  double acceptance_rate[4] = {0, 0, 0, 0};  // indexed by MoveType
  long proposal_count[4] = {0, 0, 0, 0};
  std::size_t best_by_marginal = 0;
  Tessellation mode_tessellation;  // most frequent up to weight rounding
  std::uint64_t seed = 0;
};

// Memoized per-region fits keyed by the (order-free) hash of the region's
// observation indices; safe for concurrent region refits.
class FitCache {
public:
  std::optional<RegionEval> lookup(std::uint64_t key) const;
  void store(std::uint64_t key, const RegionEval& eval);
  std::size_t size() const;

private:
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, RegionEval> map_;
};

// Order-independent hash of one region's member indices.
std::uint64_t region_content_hash(const std::vector<int>& labels, int region,
                                  int region_size);

// Menu probability of a move type at a given M (death drops out at M = 1,
// birth at M = m_max).
double move_menu_prob(MoveType move, int m, int m_max);

// One RJ proposal. The returned log_correction already contains the boundary
// menu factors and, for weight moves, log q(w|w') - log q(w'|w).
Proposal propose(const Tessellation& current, const Dataset& data,
                 const McmcConfig& cfg, Rng& rng);

// min(0, sum(proposal) - sum(current) + log_correction).
double log_accept_ratio(const std::vector<double>& current_logml,
                        const std::vector<double>& proposal_logml,
                        double log_correction);

// Collapsed reversible-jump chain over tessellations. Deterministic given
// cfg.seed, with or without the fit cache.
Chain run_chain(const Dataset& data, const McmcConfig& cfg);
Chain run_chain(const Dataset& data, const McmcConfig& cfg, FitCache& cache);

enum class SelectionCriterion { marginal, posterior };

struct Selection {
  Tessellation tess;
  std::vector<RegionFit> fits;  // aligned with tess.center_idx
  RegionAssignment assignment;
  std::size_t sample_index = 0;
};

// Best tessellation by total log marginal (default) or by posterior mode
// frequency, refitted in full. Throws std::logic_error on an empty chain.
Selection select_best(const Chain& chain, const Dataset& data, const McmcConfig& cfg,
                      SelectionCriterion criterion = SelectionCriterion::marginal);

// Per-region evaluations for an arbitrary tessellation (exposed for tests and
// the selection refit). Regions are fitted concurrently when OpenMP is on.
std::vector<RegionEval> evaluate_regions(const Dataset& data, const Tessellation& tess,
                                         const RegionAssignment& assign,
                                         const McmcConfig& cfg, FitCache* cache);

}  // namespace vcde
