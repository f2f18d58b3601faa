#include "vcde/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "vcde/rng.hpp"

namespace vcde {

Scenario scenario_from_string(const std::string& name) {
  if (name == "one_partition") return Scenario::one_partition;
  if (name == "piecewise") return Scenario::piecewise;
  if (name == "bivariate") return Scenario::bivariate;
  if (name == "changing_form") return Scenario::changing_form;
  if (name == "changepoint_series") return Scenario::changepoint_series;
  throw std::invalid_argument("unknown scenario: " + name);
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::one_partition: return "one_partition";
    case Scenario::piecewise: return "piecewise";
    case Scenario::bivariate: return "bivariate";
    case Scenario::changing_form: return "changing_form";
    case Scenario::changepoint_series: return "changepoint_series";
  }
  return "?";
}

Dataset simulate(Scenario scenario, int n, std::uint64_t seed) {
  if (n < 100) throw std::invalid_argument("simulate: n < 100");
  Rng rng(seed);
  Eigen::MatrixXd x;
  Eigen::VectorXd y(n);

  switch (scenario) {
    case Scenario::one_partition: {
      x.resize(n, 2);
      for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = 5.0 * rng.normal();
        y[i] = 5.0 + 0.5 * rng.normal();
      }
      break;
    }
    case Scenario::piecewise: {
      x.resize(n, 2);
      for (int i = 0; i < n; ++i) {
        x(i, 0) = 5.0 * rng.uniform01();
        x(i, 1) = 3.0 + 2.0 * rng.normal();
        const double f = x(i, 0) < 2.5 ? 2.5 * 2.5 : x(i, 0) * x(i, 0);
        y[i] = f + 0.25 * rng.normal();
      }
      break;
    }
    case Scenario::bivariate: {
      x.resize(n, 2);
      for (int i = 0; i < n; ++i) {
        x(i, 0) = 5.0 * rng.uniform01();
        x(i, 1) = 5.0 * rng.uniform01();
        y[i] = x(i, 1) / (1.0 + std::exp(-x(i, 0))) + 0.25 * rng.normal();
      }
      break;
    }
    case Scenario::changing_form: {
      x.resize(n, 3);
      for (int i = 0; i < n; ++i) {
        x(i, 0) = 10.0 * rng.uniform01();
        x(i, 1) = 5.0 * rng.uniform01();
        x(i, 2) = 5.0 * rng.normal();
        const double gauss = 3.0 + 0.5 * rng.normal();
        const double z = x(i, 1) * rng.gamma(2.0);  // mean 2*x2, centered below
        y[i] = x(i, 0) < 5.0
                   ? gauss
                   : -(x(i, 0) - 0.5) * (x(i, 0) - 0.5) + z - 2.0 * x(i, 1);
      }
      break;
    }
    case Scenario::changepoint_series: {
      x.resize(n, 1);
      const int third = n / 3;
      for (int i = 0; i < n; ++i) {
        x(i, 0) = static_cast<double>(i + 1);
        const double sd = (i < third || i >= 2 * third) ? 1.0 : 2.5;
        y[i] = sd * rng.normal();
      }
      break;
    }
  }
  return standardize(x, y);
}

}  // namespace vcde
