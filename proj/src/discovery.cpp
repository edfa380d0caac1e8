#include "panelcluster/discovery.hpp"

#include <string>

#include "panelcluster/errors.hpp"

namespace panelcluster {

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> threshold_adjacency(
    const LongRunMatrix& matrix, const ThresholdConfig& config) {
  if (!(config.eta_tilde >= 0.0 && config.eta_tilde <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig,
                "eta_tilde must lie in [0, 1], got " + std::to_string(config.eta_tilde));
  }
  const Eigen::MatrixXd& target =
      config.applied_to == ThresholdTarget::Correlation ? matrix.corr : matrix.sigma;
  const Eigen::Index n = target.rows();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    adjacency(i, i) = true;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool keep = target(i, j) >= config.eta_tilde;
      adjacency(i, j) = keep;
      adjacency(j, i) = keep;
    }
  }
  return adjacency;
}

std::pair<ClusterAssignment, LongRunMatrix> discover_clusters(const PanelData& panel,
                                                              const KernelSpec& kernel,
                                                              const ThresholdConfig& config) {
  const OlsFit fit = pooled_ols(panel);
  const ScoreSeries scores = score_series(panel, fit);
  LongRunMatrix matrix = longrun_matrix(scores, kernel);
  const auto adjacency = threshold_adjacency(matrix, config);
  return {connected_components(adjacency), std::move(matrix)};
}

}  // namespace panelcluster
