#include "vcde/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "vcde/csv.hpp"
#include "vcde/errors.hpp"
#include "vcde/posterior.hpp"
#include "vcde/simulate.hpp"

namespace vcde {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// shortest round-trip decimal for byte-stable CSV output
std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ChainArtifacts {
  Chain chain;
  Selection selection;
  std::map<int, long> m_counts;
};

void write_or_die(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out.good()) throw std::runtime_error("cannot write " + path.string());
}

void emit_labels(const fs::path& dir, const RegionAssignment& assign) {
  std::string body = "row,region\n";
  for (std::size_t i = 0; i < assign.labels.size(); ++i) {
    body += std::to_string(i);
    body += ',';
    body += std::to_string(assign.labels[i]);
    body += '\n';
  }
  write_or_die(dir / "labels.csv", body);
}

void emit_densities(const fs::path& dir, const Selection& sel, const Dataset& data,
                    const RunConfig& config, std::uint64_t chain_seed) {
  for (std::size_t i = 0; i < sel.fits.size(); ++i) {
    const DensityEstimate est = summarize_density(
        sel.fits[i], config.level, config.n_draws,
        mix64(chain_seed, 7000 + static_cast<std::uint64_t>(i)), data.y_mean,
        data.y_sd);
    std::string body = "y,mean,lower,upper\n";
    for (int j = 0; j < est.grid.r(); ++j) {
      body += fmt_g17(est.grid.centers[j]);
      body += ',';
      body += fmt_g17(est.mean[j]);
      body += ',';
      body += fmt_g17(est.lower[j]);
      body += ',';
      body += fmt_g17(est.upper[j]);
      body += '\n';
    }
    write_or_die(dir / ("density_region_" + std::to_string(i) + ".csv"), body);
  }
}

void emit_trace(const fs::path& dir, const Chain& chain) {
  std::string body;
  for (const ChainSample& s : chain.samples) {
    ordered_json j;
    j["iter"] = s.iter;
    j["move"] = move_name(s.move_type);
    j["accepted"] = s.accepted;
    j["M"] = s.tess.size();
    j["centers"] = s.tess.center_idx;
    j["w"] = std::vector<double>(s.tess.w.data(), s.tess.w.data() + s.tess.w.size());
    j["logml"] = s.log_marginal_total;
    body += j.dump();
    body += '\n';
  }
  write_or_die(dir / "trace.jsonl", body);
}

ordered_json config_json(const RunConfig& config) {
  ordered_json j;
  j["iters"] = config.mcmc.n_iters;
  j["burnin"] = config.mcmc.burn_in;
  j["m_max"] = config.mcmc.m_max;
  j["d"] = config.mcmc.d;
  j["min_region_size"] = config.mcmc.min_region_size;
  j["r"] = config.mcmc.r;
  j["pad_frac"] = config.mcmc.pad_frac;
  j["criterion"] =
      config.criterion == SelectionCriterion::marginal ? "marginal" : "posterior";
  j["level"] = config.level;
  j["draws"] = config.n_draws;
  j["chains"] = config.chains;
  return j;
}

void emit_summary(const fs::path& dir, const ChainArtifacts& art, const Dataset& data,
                  const RunConfig& config, std::uint64_t chain_seed) {
  const Selection& sel = art.selection;
  const PartitionSummary part = summarize_partition(sel.tess, data, sel.assignment);

  ordered_json j;
  if (!config.input_path.empty())
    j["input"] = config.input_path;
  else
    j["scenario"] = config.scenario;
  j["n"] = static_cast<long>(data.n());
  j["p"] = static_cast<long>(data.p());
  j["seed"] = config.mcmc.seed;
  j["chain_seed"] = chain_seed;
  j["config"] = config_json(config);

  ordered_json selected;
  selected["m"] = sel.tess.size();
  selected["center_rows"] = sel.tess.center_idx;
  selected["centers"] = ordered_json::array();
  for (int i = 0; i < part.centers_original.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < part.centers_original.cols(); ++k)
      row.push_back(part.centers_original(i, k));
    selected["centers"].push_back(row);
  }
  selected["weights"] =
      std::vector<double>(part.weights.data(), part.weights.data() + part.weights.size());
  selected["region_sizes"] = part.region_sizes;
  selected["log_marginal_total"] =
      art.chain.samples[sel.sample_index].log_marginal_total;
  selected["sample_index"] = sel.sample_index;
  j["selected"] = selected;

  if (data.p() == 1) j["changepoints"] = part.changepoints;

  ordered_json rates, counts;
  const MoveType moves[4] = {MoveType::birth, MoveType::death, MoveType::move,
                             MoveType::weight};
  for (MoveType m : moves) {
    rates[move_name(m)] = art.chain.acceptance_rate[static_cast<int>(m)];
    counts[move_name(m)] = art.chain.proposal_count[static_cast<int>(m)];
  }
  j["acceptance_rates"] = rates;
  j["proposal_counts"] = counts;

  ordered_json mdist;
  for (const auto& [m, c] : art.m_counts)
    mdist[std::to_string(m)] =
        static_cast<double>(c) / static_cast<double>(art.chain.samples.size());
  j["m_distribution"] = mdist;

  write_or_die(dir / "summary.json", j.dump(2) + "\n");
}

int classify(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const numerical_error*>(&e) != nullptr) return exit_numerical;
  if (dynamic_cast<const std::logic_error*>(&e) != nullptr) return exit_config;
  if (dynamic_cast<const std::runtime_error*>(&e) != nullptr) return exit_io;
  return exit_numerical;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    const bool have_input = !config.input_path.empty();
    const bool have_scenario = !config.scenario.empty();
    if (have_input == have_scenario)
      throw std::invalid_argument("run: exactly one of input or scenario required");
    if (config.chains < 1) throw std::invalid_argument("run: chains < 1");
    if (!(config.level > 0.0) || !(config.level < 1.0))
      throw std::invalid_argument("run: level must lie in (0, 1)");
    if (config.n_draws < 1) throw std::invalid_argument("run: draws < 1");
    validate(config.mcmc);

    Dataset data;
    if (have_input) {
      const IngestResult ingest =
          ingest_csv(config.input_path, config.y_col, config.x_cols);
      if (ingest.rows_dropped > 0)
        std::cerr << "dropped " << ingest.rows_dropped << " unusable rows\n";
      data = ingest.data;
    } else {
      data = simulate(scenario_from_string(config.scenario), config.n,
                      mix64(config.mcmc.seed, 0));
    }

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);

    std::map<int, long> pooled_m;
    for (int k = 0; k < config.chains; ++k) {
      McmcConfig cfg = config.mcmc;
      cfg.seed = mix64(config.mcmc.seed, 1 + static_cast<std::uint64_t>(k));

      ChainArtifacts art;
      art.chain = run_chain(data, cfg);
      art.selection = select_best(art.chain, data, cfg, config.criterion);
      for (const ChainSample& s : art.chain.samples) ++art.m_counts[s.tess.size()];
      for (const auto& [m, c] : art.m_counts) pooled_m[m] += c;

      const fs::path dir =
          config.chains == 1 ? out_dir
                             : out_dir / ("chain_" + std::to_string(k + 1));
      fs::create_directories(dir);
      if (config.emit_labels) emit_labels(dir, art.selection.assignment);
      if (config.emit_densities)
        emit_densities(dir, art.selection, data, config, cfg.seed);
      if (config.emit_trace) emit_trace(dir, art.chain);
      if (config.emit_summary) emit_summary(dir, art, data, config, cfg.seed);
    }

    if (config.chains > 1 && config.emit_summary) {
      long total = 0;
      for (const auto& [m, c] : pooled_m) total += c;
      ordered_json j;
      j["chains"] = config.chains;
      j["seed"] = config.mcmc.seed;
      ordered_json mdist;
      for (const auto& [m, c] : pooled_m)
        mdist[std::to_string(m)] = static_cast<double>(c) / static_cast<double>(total);
      j["m_distribution"] = mdist;
      ordered_json dirs = ordered_json::array();
      for (int k = 0; k < config.chains; ++k)
        dirs.push_back("chain_" + std::to_string(k + 1));
      j["chain_dirs"] = dirs;
      write_or_die(out_dir / "summary.json", j.dump(2) + "\n");
    }
    return exit_ok;
  } catch (const std::exception& e) {
    return classify(e);
  }
}

}  // namespace vcde
