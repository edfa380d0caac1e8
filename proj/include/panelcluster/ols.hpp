#pragma once

#include <Eigen/Core>
#include <vector>

#include "panelcluster/clusters.hpp"
#include "panelcluster/errors.hpp"
#include "panelcluster/panel.hpp"

namespace panelcluster {

/// Least-squares fit over a set of panel observations.
struct OlsFit {
  Eigen::VectorXd beta_hat;   // length p
  Eigen::MatrixXd residuals;  // N x T, rows of units outside the fitted set are zero
  Eigen::MatrixXd gram;       // p x p, (1/(NT)) sum_i sum_t x_it x_it'
  double min_singular_value = 0.0;  // smallest singular value of the stacked design
};

/// Pooled OLS over all N*T observations. Solved by SVD; fails with
/// RankDeficient when the smallest singular value of the stacked design drops
/// below 1e-10 times the largest.
OlsFit pooled_ols(const PanelData& panel);

struct ClusterOlsResult {
  std::vector<OlsFit> fits;      // indexed by cluster label - 1
  std::vector<int> unit_counts;  // n_j, same indexing
};

/// Independent OLS per cluster, using only that cluster's observations.
/// Throws ClusterRankDeficient naming the offending cluster.
ClusterOlsResult cluster_ols(const PanelData& panel, const ClusterAssignment& clusters);

/// Score series w[i](t, a) = x[i](t, a) * residual(i, t).
struct ScoreSeries {
  std::vector<Eigen::MatrixXd> w;  // per unit, T x p

  Eigen::Index n_units() const { return static_cast<Eigen::Index>(w.size()); }
  Eigen::Index n_periods() const { return w.empty() ? 0 : w.front().rows(); }
  Eigen::Index n_covariates() const { return w.empty() ? 0 : w.front().cols(); }

  /// Copy of the time slice [start, start+length) of every unit's series.
  ScoreSeries time_slice(Eigen::Index start, Eigen::Index length) const;
};

ScoreSeries score_series(const PanelData& panel, const OlsFit& fit);

}  // namespace panelcluster
