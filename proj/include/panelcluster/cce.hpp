#pragma once

#include <Eigen/Core>

#include "panelcluster/clusters.hpp"
#include "panelcluster/hypothesis.hpp"
#include "panelcluster/ols.hpp"
#include "panelcluster/panel.hpp"

namespace panelcluster {

/// PaperMeat pairs the plain (1/q) average of score outer products with a
/// sqrt(q)-scaled t-statistic; Sandwich wraps the unaveraged sum in the
/// bread inverse (the conventional clustered covariance).
enum class CceVariant { PaperMeat, Sandwich };

struct CceEstimate {
  Eigen::MatrixXd meat;      // p x p, (1/q) sum_j s_j s_j'
  Eigen::MatrixXd sandwich;  // p x p, B^{-1} (sum_j s_j s_j') B^{-1}
  CceVariant variant = CceVariant::Sandwich;
};

CceEstimate clustered_covariance(const PanelData& panel, const OlsFit& fit,
                                 const ClusterAssignment& clusters,
                                 CceVariant variant = CceVariant::Sandwich);

/// Two-sided t-test of r'beta = lambda with normal critical values.
/// PaperMeat: T = sqrt(q) (r'beta - lambda) / sqrt(r' meat r);
/// Sandwich:  T = (r'beta - lambda) / sqrt(r' sandwich r).
TestResult cce_t_test(const PanelData& panel, const ClusterAssignment& clusters,
                      const LinearRestriction& restriction, double alpha,
                      CceVariant variant = CceVariant::Sandwich);

}  // namespace panelcluster
