#pragma once

#include <cstdint>
#include <string>

#include "vcde/dataset.hpp"

namespace vcde {

enum class Scenario {
  one_partition,      // y ~ N(5, .5^2), x1 ~ N(0,1), x2 ~ N(0,25)
  piecewise,          // y ~ N(f(x1), .25^2), f = 2.5^2 below 2.5 else x1^2
  bivariate,          // y ~ N((1+e^-x1)^-1 x2, .25^2)
  changing_form,      // N(3,.25) below x1=5, else -(x1-.5)^2 + centered Gamma
  changepoint_series  // y_t ~ N(0, s_k^2), s = (1, 2.5, 1) over thirds of t
};

Scenario scenario_from_string(const std::string& name);
const char* scenario_name(Scenario s);

// Draws n observations from the scenario's generative model and returns the
// standardized dataset. Throws std::invalid_argument for n < 100.
Dataset simulate(Scenario scenario, int n, std::uint64_t seed);

}  // namespace vcde
