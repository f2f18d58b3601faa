#include "vcde/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

#include "vcde/errors.hpp"

namespace vcde {

const char* move_name(MoveType m) {
  switch (m) {
    case MoveType::birth: return "birth";
    case MoveType::death: return "death";
    case MoveType::move: return "move";
    case MoveType::weight: return "weight";
  }
  return "?";
}

void validate(const McmcConfig& cfg) {
  if (cfg.n_iters < 1) throw std::invalid_argument("McmcConfig: n_iters < 1");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.n_iters)
    throw std::invalid_argument("McmcConfig: burn_in must lie in [0, n_iters)");
  if (cfg.m_max < 1) throw std::invalid_argument("McmcConfig: m_max < 1");
  if (!(cfg.d > 0.0)) throw std::invalid_argument("McmcConfig: d must be positive");
  if (cfg.min_region_size < 1)
    throw std::invalid_argument("McmcConfig: min_region_size < 1");
  if (cfg.r < 3) throw std::invalid_argument("McmcConfig: r < 3");
  if (cfg.pad_frac < 0.0) throw std::invalid_argument("McmcConfig: negative pad_frac");
  if (!(cfg.hyper_init.sigma2 > 0.0) || !(cfg.hyper_init.length_scale > 0.0))
    throw std::invalid_argument("McmcConfig: hyper_init must be positive");
  if (!(cfg.newton.tol > 0.0) || cfg.newton.max_iters < 1 ||
      cfg.newton.max_halvings < 0)
    throw std::invalid_argument("McmcConfig: bad newton settings");
}

std::optional<RegionEval> FitCache::lookup(std::uint64_t key) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void FitCache::store(std::uint64_t key, const RegionEval& eval) {
  std::lock_guard<std::mutex> lock(mu_);
  map_.emplace(key, eval);
}

std::size_t FitCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.size();
}

std::uint64_t region_content_hash(const std::vector<int>& labels, int region,
                                  int region_size) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == region) acc ^= mix64(static_cast<std::uint64_t>(i));
  return mix64(acc, static_cast<std::uint64_t>(region_size));
}

double move_menu_prob(MoveType move, int m, int m_max) {
  if (m < 1 || m > m_max) throw std::invalid_argument("move_menu_prob: bad M");
  const bool birth_ok = m < m_max;
  const bool death_ok = m > 1;
  const int n_avail = 2 + (birth_ok ? 1 : 0) + (death_ok ? 1 : 0);
  const bool available = (move == MoveType::birth && birth_ok) ||
                         (move == MoveType::death && death_ok) ||
                         move == MoveType::move || move == MoveType::weight;
  return available ? 1.0 / n_avail : 0.0;
}

namespace {

double log_dirichlet_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& alpha) {
  double out = std::lgamma(alpha.sum());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    out -= std::lgamma(alpha[k]);
    // components can underflow to zero; floor them inside the density only
    out += (alpha[k] - 1.0) * std::log(std::max(x[k], 1e-15));
  }
  return out;
}

Eigen::VectorXd clamped_alpha(double d, const Eigen::VectorXd& w) {
  return (d * w.array()).max(1e-8).matrix();
}

// index of the k-th observation that is not currently a center
int kth_free_location(const std::vector<char>& is_center, std::uint64_t k) {
  for (std::size_t i = 0; i < is_center.size(); ++i) {
    if (is_center[i]) continue;
    if (k == 0) return static_cast<int>(i);
    --k;
  }
  throw std::logic_error("kth_free_location: ran past the end");
}

MoveType draw_move(int m, int m_max, Rng& rng) {
  const MoveType order[4] = {MoveType::birth, MoveType::death, MoveType::move,
                             MoveType::weight};
  const double u = rng.uniform01();
  double cum = 0.0;
  for (MoveType mt : order) {
    cum += move_menu_prob(mt, m, m_max);
    if (u < cum) return mt;
  }
  return MoveType::weight;
}

}  // namespace

Proposal propose(const Tessellation& current, const Dataset& data,
                 const McmcConfig& cfg, Rng& rng) {
  const int n = static_cast<int>(data.n());
  const int m = current.size();
  Proposal prop;
  prop.tess = current;
  prop.move = draw_move(m, cfg.m_max, rng);

  std::vector<char> is_center(n, 0);
  for (int idx : current.center_idx) is_center[idx] = 1;
  const int n_free = n - m;

  switch (prop.move) {
    case MoveType::birth: {
      if (n_free == 0) {
        prop.valid = false;
        return prop;
      }
      const int loc = kth_free_location(is_center, rng.uniform_int(n_free));
      prop.tess.center_idx.push_back(loc);
      prop.log_correction = std::log(move_menu_prob(MoveType::death, m + 1, cfg.m_max)) -
                            std::log(move_menu_prob(MoveType::birth, m, cfg.m_max));
      break;
    }
    case MoveType::death: {
      const int pos = static_cast<int>(rng.uniform_int(m));
      prop.tess.center_idx.erase(prop.tess.center_idx.begin() + pos);
      prop.log_correction = std::log(move_menu_prob(MoveType::birth, m - 1, cfg.m_max)) -
                            std::log(move_menu_prob(MoveType::death, m, cfg.m_max));
      break;
    }
    case MoveType::move: {
      const int pos = static_cast<int>(rng.uniform_int(m));
      if (n_free == 0) {
        prop.valid = false;
        return prop;
      }
      const int loc = kth_free_location(is_center, rng.uniform_int(n_free));
      prop.tess.center_idx[pos] = loc;
      break;
    }
    case MoveType::weight: {
      const Eigen::VectorXd alpha_fwd = clamped_alpha(cfg.d, current.w);
      std::vector<double> av(alpha_fwd.data(), alpha_fwd.data() + alpha_fwd.size());
      const std::vector<double> draw = rng.dirichlet(av);
      Eigen::VectorXd w_new =
          Eigen::Map<const Eigen::VectorXd>(draw.data(), draw.size());
      const Eigen::VectorXd alpha_rev = clamped_alpha(cfg.d, w_new);
      prop.log_correction = log_dirichlet_pdf(current.w, alpha_rev) -
                            log_dirichlet_pdf(w_new, alpha_fwd);
      prop.tess.w = std::move(w_new);
      break;
    }
  }
  return prop;
}

double log_accept_ratio(const std::vector<double>& current_logml,
                        const std::vector<double>& proposal_logml,
                        double log_correction) {
  double cur = 0.0, pro = 0.0;
  for (double v : current_logml) cur += v;
  for (double v : proposal_logml) pro += v;
  return std::min(0.0, pro - cur + log_correction);
}

std::vector<RegionEval> evaluate_regions(const Dataset& data, const Tessellation& tess,
                                         const RegionAssignment& assign,
                                         const McmcConfig& cfg, FitCache* cache) {
  const int m = tess.size();
  std::vector<RegionEval> out(m);

  if (cfg.likelihood_override) {
    for (int i = 0; i < m; ++i) {
      out[i].params = cfg.hyper_init;
      out[i].log_marginal = *cfg.likelihood_override;
      out[i].log_marginal_y = *cfg.likelihood_override;
    }
    return out;
  }

  std::vector<std::exception_ptr> errs(m);
#pragma omp parallel for schedule(dynamic) if (m > 1)
  for (int i = 0; i < m; ++i) {
    try {
      const std::uint64_t key =
          region_content_hash(assign.labels, i, assign.region_sizes[i]);
      if (cache != nullptr) {
        if (auto hit = cache->lookup(key)) {
          out[i] = *hit;
          continue;
        }
      }
      Eigen::VectorXd y_region(assign.region_sizes[i]);
      Eigen::Index k = 0;
      for (Eigen::Index row = 0; row < data.n(); ++row)
        if (assign.labels[row] == i) y_region[k++] = data.y[row];
      out[i] = eval_region(y_region, cfg.r, cfg.pad_frac, cfg.basis_prior,
                           cfg.hyper_init, cfg.newton);
      if (cache != nullptr) cache->store(key, out[i]);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (const auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

// tessellations compare equal up to center order and weight rounding
std::string tess_key(const Tessellation& tess) {
  std::vector<int> centers = tess.center_idx;
  std::sort(centers.begin(), centers.end());
  std::string key;
  for (int c : centers) {
    key += std::to_string(c);
    key += ',';
  }
  key += '|';
  for (Eigen::Index k = 0; k < tess.w.size(); ++k) {
    key += std::to_string(std::llround(tess.w[k] * 1e6));
    key += ',';
  }
  return key;
}

Chain run_chain_impl(const Dataset& data, const McmcConfig& cfg, FitCache* cache) {
  validate(cfg);
  if (data.n() < 1) throw std::invalid_argument("run_chain: empty dataset");
  if (data.n() < cfg.min_region_size)
    throw std::invalid_argument("run_chain: fewer observations than min_region_size");

  Rng rng(cfg.seed);

  Tessellation current;
  current.center_idx = {cfg.initial_center
                            ? *cfg.initial_center
                            : static_cast<int>(rng.uniform_int(data.n()))};
  current.w = cfg.initial_w
                  ? *cfg.initial_w
                  : Eigen::VectorXd::Constant(data.p(), 1.0 / data.p());
  validate(current, data);

  RegionAssignment cur_assign = assign_regions(data, current);
  std::vector<RegionEval> cur_evals =
      evaluate_regions(data, current, cur_assign, cfg, cache);

  // chain totals use the observation-density marginals so that states whose
  // regions discretize y at different spacings compete on the same scale
  const auto logml_of = [](const std::vector<RegionEval>& evals) {
    std::vector<double> v(evals.size());
    for (std::size_t i = 0; i < evals.size(); ++i) v[i] = evals[i].log_marginal_y;
    return v;
  };
  std::vector<double> cur_logml = logml_of(cur_evals);

  Chain chain;
  chain.seed = cfg.seed;
  chain.samples.reserve(cfg.n_iters - cfg.burn_in);
  long accept_count[4] = {0, 0, 0, 0};

  double best_logml = -std::numeric_limits<double>::infinity();

  struct ModeEntry {
    long count = 0;
    std::size_t first_index = 0;
  };
  std::unordered_map<std::string, ModeEntry> mode_counts;

  for (int iter = 0; iter < cfg.n_iters; ++iter) {
    Proposal prop = propose(current, data, cfg, rng);
    const int mv = static_cast<int>(prop.move);
    ++chain.proposal_count[mv];

    bool accepted = false;
    if (prop.valid) {
      RegionAssignment prop_assign = assign_regions(data, prop.tess);
      const bool big_enough =
          *std::min_element(prop_assign.region_sizes.begin(),
                            prop_assign.region_sizes.end()) >= cfg.min_region_size;
      if (big_enough) {
        // a proposal whose region fit fails numerically even at maximum
        // jitter is unreachable; treat it like any other rejected state
        // instead of aborting a long run
        bool evaluable = true;
        std::vector<RegionEval> prop_evals;
        try {
          prop_evals = evaluate_regions(data, prop.tess, prop_assign, cfg, cache);
        } catch (const numerical_error&) {
          evaluable = false;
        }
        if (evaluable) {
          std::vector<double> prop_logml = logml_of(prop_evals);
          const double log_alpha =
              log_accept_ratio(cur_logml, prop_logml, prop.log_correction);
          const double u = rng.uniform01();
          if (std::log(u) < log_alpha) {
            accepted = true;
            current = std::move(prop.tess);
            cur_assign = std::move(prop_assign);
            cur_evals = std::move(prop_evals);
            cur_logml = std::move(prop_logml);
          }
        }
      }
    }
    if (accepted) ++accept_count[mv];

    if (iter >= cfg.burn_in) {
      ChainSample s;
      s.tess = current;
      s.log_marginal_total = 0.0;
      for (double v : cur_logml) s.log_marginal_total += v;
      s.log_post_unnorm =
          s.log_marginal_total +
          tessellation_log_prior(current, static_cast<int>(data.n()), cfg.m_max);
      s.move_type = prop.move;
      s.accepted = accepted;
      s.iter = iter;

      const std::size_t idx = chain.samples.size();
      if (s.log_marginal_total > best_logml) {
        best_logml = s.log_marginal_total;
        chain.best_by_marginal = idx;
      }
      auto& entry = mode_counts[tess_key(current)];
      if (entry.count == 0) entry.first_index = idx;
      ++entry.count;

      chain.samples.push_back(std::move(s));
    }
  }

  for (int k = 0; k < 4; ++k)
    chain.acceptance_rate[k] =
        chain.proposal_count[k] > 0
            ? static_cast<double>(accept_count[k]) / chain.proposal_count[k]
            : 0.0;

  long best_count = 0;
  std::size_t best_first = 0;
  for (const auto& [key, entry] : mode_counts) {
    if (entry.count > best_count ||
        (entry.count == best_count && entry.first_index < best_first)) {
      best_count = entry.count;
      best_first = entry.first_index;
    }
  }
  if (!chain.samples.empty())
    chain.mode_tessellation = chain.samples[best_first].tess;

  return chain;
}

}  // namespace

Chain run_chain(const Dataset& data, const McmcConfig& cfg) {
  if (cfg.cache_fits) {
    FitCache cache;
    return run_chain_impl(data, cfg, &cache);
  }
  return run_chain_impl(data, cfg, nullptr);
}

Chain run_chain(const Dataset& data, const McmcConfig& cfg, FitCache& cache) {
  return run_chain_impl(data, cfg, &cache);
}

Selection select_best(const Chain& chain, const Dataset& data, const McmcConfig& cfg,
                      SelectionCriterion criterion) {
  if (chain.samples.empty()) throw std::logic_error("select_best: empty chain");

  std::size_t idx = chain.best_by_marginal;
  if (criterion == SelectionCriterion::posterior) {
    const std::string want = tess_key(chain.mode_tessellation);
    for (std::size_t i = 0; i < chain.samples.size(); ++i) {
      if (tess_key(chain.samples[i].tess) == want) {
        idx = i;
        break;
      }
    }
  }

  Selection sel;
  sel.tess = chain.samples[idx].tess;
  sel.sample_index = idx;
  sel.assignment = assign_regions(data, sel.tess);

  const int m = sel.tess.size();
  sel.fits.resize(m);
  std::vector<std::exception_ptr> errs(m);
#pragma omp parallel for schedule(dynamic) if (m > 1)
  for (int i = 0; i < m; ++i) {
    try {
      Eigen::VectorXd y_region(sel.assignment.region_sizes[i]);
      Eigen::Index k = 0;
      for (Eigen::Index row = 0; row < data.n(); ++row)
        if (sel.assignment.labels[row] == i) y_region[k++] = data.y[row];
      sel.fits[i] = fit_region(y_region, cfg.r, cfg.pad_frac, cfg.basis_prior,
                               cfg.hyper_init, cfg.newton);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (const auto& e : errs)
    if (e) std::rethrow_exception(e);
  return sel;
}

}  // namespace vcde
