#pragma once

#include <string>
#include <vector>

#include "stickycs/analysis.hpp"
#include "stickycs/convexity.hpp"
#include "stickycs/dynamics.hpp"
#include "stickycs/initial_data.hpp"
#include "stickycs/protocol.hpp"

namespace scs {

struct Scenario {
  std::string name;
  Protocol protocol = Protocol::zero();
  InitialData initial;
  std::vector<int> N;
  std::vector<double> snap;
  double horizon = 1.0;
  std::vector<double> sample_times;
  std::vector<double> converge_times;
  AdvanceOptions advance;
  VerifyOptions verify;
  RegionTolerances regions;
  PredictOptions predict;
};

/// Throws ConfigError("<field> (line k)", ...) on any schema problem.
Scenario parse_scenario(const std::string& yaml_text);
Scenario load_scenario(const std::string& path);

}  // namespace scs
