#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* env = std::getenv("VCDE_CLI");
  return env != nullptr ? env : "";
}

int run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd =
      env_prefix + " " + cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::vector<std::vector<double>> parse_csv_body(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vcde_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kSmallRun =
    "--scenario one_partition --n 120 --iters 60 --burnin 20 --mmax 4 "
    "--r 20 --min-region 10 --draws 200 --seed 7";

}  // namespace

TEST_CASE("cli end-to-end scenario run emits coherent artifacts") {
  REQUIRE_FALSE(cli_path().empty());
  const fs::path dir = fresh_dir("e2e");
  REQUIRE(run_cli(kSmallRun + " --out " + dir.string()) == 0);

  // labels: one row per observation, labels within the selected partition
  const std::string labels = slurp(dir / "labels.csv");
  CHECK(count_lines(labels) == 121);
  CHECK(labels.rfind("row,region\n", 0) == 0);

  const json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("scenario") == "one_partition");
  CHECK(summary.at("n") == 120);
  CHECK(summary.at("p") == 2);
  CHECK(summary.at("seed") == 7);
  CHECK(summary.at("config").at("iters") == 60);
  CHECK(summary.at("config").at("burnin") == 20);
  CHECK(summary.at("config").at("r") == 20);

  const int m = summary.at("selected").at("m").get<int>();
  REQUIRE(m >= 1);
  REQUIRE(m <= 4);
  const auto& sel = summary.at("selected");
  CHECK(sel.at("center_rows").size() == static_cast<std::size_t>(m));
  CHECK(sel.at("region_sizes").size() == static_cast<std::size_t>(m));
  long size_sum = 0;
  for (const auto& v : sel.at("region_sizes")) size_sum += v.get<long>();
  CHECK(size_sum == 120);
  double w_sum = 0.0;
  for (const auto& v : sel.at("weights")) w_sum += v.get<double>();
  CHECK(w_sum == doctest::Approx(1.0).epsilon(1e-9));
  double m_mass = 0.0;
  for (const auto& [key, v] : summary.at("m_distribution").items())
    m_mass += v.get<double>();
  CHECK(m_mass == doctest::Approx(1.0).epsilon(1e-9));

  // labels never name a region outside [0, m)
  {
    std::istringstream in(labels);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const int region = std::stoi(line.substr(line.find(',') + 1));
      CHECK(region >= 0);
      CHECK(region < m);
    }
  }

  // trace: one json object per kept iteration
  const std::string trace = slurp(dir / "trace.jsonl");
  CHECK(count_lines(trace) == 40);
  {
    std::istringstream in(trace);
    std::string line;
    int expect_iter = 20;
    while (std::getline(in, line)) {
      const json rec = json::parse(line);
      CHECK(rec.at("iter") == expect_iter++);
      CHECK(rec.at("M").get<int>() >= 1);
      CHECK(rec.count("move") == 1);
      CHECK(rec.count("accepted") == 1);
      CHECK(rec.count("centers") == 1);
      CHECK(rec.count("w") == 1);
      CHECK(rec.at("logml").is_number());
    }
    CHECK(expect_iter == 60);
  }

  // densities: one file per selected region, each integrating to one
  for (int i = 0; i < m; ++i) {
    const fs::path f = dir / ("density_region_" + std::to_string(i) + ".csv");
    REQUIRE(fs::exists(f));
    const auto rows = parse_csv_body(slurp(f));
    REQUIRE(rows.size() == 20);
    const double dz = rows[1][0] - rows[0][0];
    double mass = 0.0;
    for (const auto& row : rows) {
      REQUIRE(row.size() == 4);
      CHECK(row[2] <= row[3]);  // lower <= upper
      mass += row[1] * dz;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK_FALSE(fs::exists(dir / ("density_region_" + std::to_string(m) + ".csv")));
}

TEST_CASE("cli output is byte-identical across reruns and seed sources") {
  REQUIRE_FALSE(cli_path().empty());
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  REQUIRE(run_cli(kSmallRun + " --out " + a.string()) == 0);
  REQUIRE(run_cli(kSmallRun + " --out " + b.string()) == 0);
  for (const char* name : {"labels.csv", "trace.jsonl", "summary.json",
                           "density_region_0.csv"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }

  // CDE_SEED stands in for --seed, and --seed wins when both are present
  const std::string no_seed =
      "--scenario one_partition --n 120 --iters 60 --burnin 20 --mmax 4 "
      "--r 20 --min-region 10 --draws 200";
  const fs::path c = fresh_dir("det_c");
  REQUIRE(run_cli(no_seed + " --out " + c.string(), "CDE_SEED=7") == 0);
  CHECK(slurp(a / "trace.jsonl") == slurp(c / "trace.jsonl"));
  CHECK(json::parse(slurp(c / "summary.json")).at("seed") == 7);

  const fs::path d = fresh_dir("det_d");
  REQUIRE(run_cli(kSmallRun + " --out " + d.string(), "CDE_SEED=99") == 0);
  CHECK(slurp(a / "trace.jsonl") == slurp(d / "trace.jsonl"));
  CHECK(json::parse(slurp(d / "summary.json")).at("seed") == 7);
}

TEST_CASE("cli exit codes separate io, config and parse failures") {
  REQUIRE_FALSE(cli_path().empty());
  const fs::path dir = fresh_dir("codes");
  const std::string out = " --out " + dir.string();

  // unreadable input file
  CHECK(run_cli("--input /nonexistent/data.csv --y y --x a --iters 20 --burnin 0" +
                out) == 2);
  // burn-in swallows the whole run
  CHECK(run_cli("--scenario one_partition --n 120 --iters 60 --burnin 60" + out) == 3);
  // unknown scenario name
  CHECK(run_cli("--scenario bogus --n 120 --iters 20 --burnin 0" + out) == 3);
  // no data source at all
  CHECK(run_cli("--iters 20 --burnin 0" + out) == 3);
  // flat-out bad flag
  CHECK(run_cli("--no-such-flag" + out) == 3);
  // credible level outside (0, 1)
  CHECK(run_cli(kSmallRun + " --level 1.5" + out) == 3);
}

TEST_CASE("cli ingests csv files, dropping unusable rows") {
  REQUIRE_FALSE(cli_path().empty());
  const fs::path dir = fresh_dir("csv");
  const fs::path csv = dir / "input.csv";
  {
    std::ofstream out(csv);
    out << "a,b,y\n";
    // two rows are unusable: one missing cell, one non-numeric cell
    for (int i = 0; i < 130; ++i) {
      const double a = 0.01 * i;
      const double b = std::sin(0.1 * i);
      const double y = 5.0 + 0.5 * std::cos(0.3 * i);
      if (i == 40)
        out << a << ",," << y << "\n";
      else if (i == 90)
        out << a << "," << b << ",oops\n";
      else
        out << a << "," << b << "," << y << "\n";
    }
  }

  const std::string args =
      "--input " + csv.string() +
      " --y y --x a,b --iters 40 --burnin 10 --r 15 --min-region 10 --mmax 3 "
      "--draws 100 --seed 5";
  const fs::path by_name = fresh_dir("csv_by_name");
  REQUIRE(run_cli(args + " --out " + by_name.string()) == 0);

  const std::string labels = slurp(by_name / "labels.csv");
  CHECK(count_lines(labels) == 129);  // header + 128 kept rows

  const json summary = json::parse(slurp(by_name / "summary.json"));
  CHECK(summary.at("input") == csv.string());
  CHECK(summary.at("n") == 128);
  CHECK(summary.at("p") == 2);

  // columns picked by zero-based index give the same result
  const std::string by_index_args =
      "--input " + csv.string() +
      " --y 2 --x 0,1 --iters 40 --burnin 10 --r 15 --min-region 10 --mmax 3 "
      "--draws 100 --seed 5";
  const fs::path by_index = fresh_dir("csv_by_index");
  REQUIRE(run_cli(by_index_args + " --out " + by_index.string()) == 0);
  CHECK(slurp(by_index / "labels.csv") == labels);
  CHECK(slurp(by_index / "trace.jsonl") == slurp(by_name / "trace.jsonl"));

  // asking for a column that does not exist is a config error
  CHECK(run_cli("--input " + csv.string() +
                " --y zzz --x a,b --iters 20 --burnin 0 --out " + dir.string()) == 3);
}

TEST_CASE("cli writes per-chain directories and a pooled summary") {
  REQUIRE_FALSE(cli_path().empty());
  const fs::path dir = fresh_dir("chains");
  REQUIRE(run_cli(kSmallRun + " --chains 2 --out " + dir.string()) == 0);

  for (const char* sub : {"chain_1", "chain_2"}) {
    const fs::path cdir = dir / sub;
    REQUIRE(fs::exists(cdir / "labels.csv"));
    REQUIRE(fs::exists(cdir / "trace.jsonl"));
    REQUIRE(fs::exists(cdir / "summary.json"));
    const json s = json::parse(slurp(cdir / "summary.json"));
    CHECK(s.at("seed") == 7);
    CHECK(s.at("chain_seed") != 7);  // derived, not the user seed
  }
  // the two chains use different derived seeds
  const json s1 = json::parse(slurp(dir / "chain_1" / "summary.json"));
  const json s2 = json::parse(slurp(dir / "chain_2" / "summary.json"));
  CHECK(s1.at("chain_seed") != s2.at("chain_seed"));

  const json pooled = json::parse(slurp(dir / "summary.json"));
  CHECK(pooled.at("chains") == 2);
  CHECK(pooled.at("chain_dirs").size() == 2);
  double mass = 0.0;
  for (const auto& [key, v] : pooled.at("m_distribution").items())
    mass += v.get<double>();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}
