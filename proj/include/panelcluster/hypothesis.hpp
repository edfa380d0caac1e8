#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace panelcluster {

/// Single linear restriction r'beta = lambda.
struct LinearRestriction {
  Eigen::VectorXd r;
  double lambda = 0.0;
};

struct TestResult {
  double statistic = 0.0;
  double phi = 0.0;      // rejection probability in [0, 1]
  double p_value = 1.0;
  int critical_index = 0;       // k for randomization tests, 0 otherwise
  std::string method;
  double alpha = 0.0;
  std::int64_t orbit_size = 0;  // M or B for randomization tests, 0 otherwise
};

}  // namespace panelcluster
