#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vcde/runner.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional density estimation over weighted Voronoi partitions"};

  vcde::RunConfig config;
  std::string x_list;
  std::string criterion = "marginal";
  std::uint64_t seed = 0;

  auto* opt_input = app.add_option("--input", config.input_path,
                                   "CSV file with a header row");
  auto* opt_y = app.add_option("--y", config.y_col, "response column (name or index)");
  auto* opt_x =
      app.add_option("--x", x_list, "comma-separated covariate columns");
  auto* opt_scenario =
      app.add_option("--scenario", config.scenario,
                     "built-in generator: one_partition, piecewise, bivariate, "
                     "changing_form, changepoint_series");
  app.add_option("--n", config.n, "observations to simulate")
      ->capture_default_str();
  app.add_option("--iters", config.mcmc.n_iters, "sampler iterations")
      ->capture_default_str();
  app.add_option("--burnin", config.mcmc.burn_in, "discarded iterations")
      ->capture_default_str();
  app.add_option("--mmax", config.mcmc.m_max, "maximum number of regions")
      ->capture_default_str();
  app.add_option("--d", config.mcmc.d, "weight proposal concentration")
      ->capture_default_str();
  app.add_option("--r", config.mcmc.r, "density grid resolution")
      ->capture_default_str();
  app.add_option("--pad", config.mcmc.pad_frac, "support padding fraction")
      ->capture_default_str();
  app.add_option("--min-region", config.mcmc.min_region_size,
                 "smallest acceptable region")
      ->capture_default_str();
  auto* opt_seed = app.add_option("--seed", seed, "RNG seed (also via CDE_SEED)");
  app.add_option("--criterion", criterion, "selection rule: marginal or posterior")
      ->check(CLI::IsMember({"marginal", "posterior"}))
      ->capture_default_str();
  app.add_option("--level", config.level, "credible band level")
      ->capture_default_str();
  app.add_option("--draws", config.n_draws, "posterior density draws")
      ->capture_default_str();
  app.add_option("--out", config.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--chains", config.chains, "independent chains")
      ->capture_default_str();

  opt_input->excludes(opt_scenario);
  opt_y->needs(opt_input);
  opt_x->needs(opt_input);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return vcde::exit_config;
  }

  if (opt_seed->count() > 0) {
    config.mcmc.seed = seed;
  } else if (const char* env = std::getenv("CDE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      std::cerr << "error: CDE_SEED is not an unsigned integer\n";
      return vcde::exit_config;
    }
    config.mcmc.seed = v;
  }

  config.x_cols = split_commas(x_list);
  config.criterion = criterion == "posterior" ? vcde::SelectionCriterion::posterior
                                              : vcde::SelectionCriterion::marginal;
  return vcde::run(config);
}
