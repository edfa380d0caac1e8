#pragma once

#include <Eigen/Core>
#include <utility>

#include "panelcluster/clusters.hpp"
#include "panelcluster/longrun.hpp"
#include "panelcluster/panel.hpp"

namespace panelcluster {

/// Which matrix the threshold is compared against. Correlation is the default
/// and is scale-invariant; RawSigma compares the unnormalized magnitudes.
enum class ThresholdTarget { Correlation, RawSigma };

struct ThresholdConfig {
  double eta_tilde = 0.0;  // in [0, 1]
  ThresholdTarget applied_to = ThresholdTarget::Correlation;
};

/// Keep a link iff the targeted entry is >= eta_tilde (ties keep the link);
/// diagonal is true by convention.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> threshold_adjacency(
    const LongRunMatrix& matrix, const ThresholdConfig& config);

/// Full recovery pipeline: pooled OLS -> scores -> long-run matrix ->
/// threshold -> connected components.
std::pair<ClusterAssignment, LongRunMatrix> discover_clusters(const PanelData& panel,
                                                              const KernelSpec& kernel,
                                                              const ThresholdConfig& config);

}  // namespace panelcluster
