#include "panelcluster/ols.hpp"

#include <Eigen/SVD>
#include <string>

namespace panelcluster {

namespace {

// SVD solve over the listed units' stacked observations. Rank failures carry
// `label` in the message and the given error code.
OlsFit solve_units(const PanelData& panel, const std::vector<int>& units, ErrorCode rank_code,
                   const std::string& label) {
  const Eigen::Index t_len = panel.n_periods();
  const Eigen::Index p = panel.n_covariates();
  const Eigen::Index rows = static_cast<Eigen::Index>(units.size()) * t_len;

  if (rows < p) {
    throw Error(rank_code, "rank-deficient design for " + label + ": " + std::to_string(rows) +
                               " observations for " + std::to_string(p) + " covariates");
  }
  Eigen::MatrixXd design(rows, p);
  Eigen::VectorXd outcome(rows);
  Eigen::Index offset = 0;
  for (int unit : units) {
    design.middleRows(offset, t_len) = panel.covariates(unit);
    outcome.segment(offset, t_len) = panel.outcomes().row(unit).transpose();
    offset += t_len;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& singular = svd.singularValues();
  const double smallest = singular(singular.size() - 1);
  const double largest = singular(0);
  if (!(smallest > 1e-10 * largest)) {
    throw Error(rank_code, "rank-deficient design for " + label + ": min singular value " +
                               std::to_string(smallest) + " vs largest " + std::to_string(largest));
  }

  OlsFit fit;
  fit.beta_hat = svd.solve(outcome);
  fit.min_singular_value = smallest;
  fit.gram.setZero(p, p);
  fit.residuals.setZero(panel.n_units(), t_len);
  for (int unit : units) {
    const auto& xi = panel.covariates(unit);
    fit.gram.noalias() += xi.transpose() * xi;
    fit.residuals.row(unit) =
        panel.outcomes().row(unit) - (xi * fit.beta_hat).transpose();
  }
  fit.gram /= static_cast<double>(rows);
  return fit;
}

}  // namespace

OlsFit pooled_ols(const PanelData& panel) {
  std::vector<int> units(static_cast<std::size_t>(panel.n_units()));
  for (std::size_t i = 0; i < units.size(); ++i) units[i] = static_cast<int>(i);
  return solve_units(panel, units, ErrorCode::RankDeficient, "pooled panel");
}

ClusterOlsResult cluster_ols(const PanelData& panel, const ClusterAssignment& clusters) {
  if (clusters.n_units() != panel.n_units()) {
    throw Error(ErrorCode::LengthMismatch, "cluster assignment does not match panel");
  }
  const auto members = clusters.members();
  ClusterOlsResult result;
  result.fits.reserve(members.size());
  result.unit_counts.reserve(members.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    result.fits.push_back(solve_units(panel, members[j], ErrorCode::ClusterRankDeficient,
                                      "cluster " + std::to_string(j + 1)));
    result.unit_counts.push_back(static_cast<int>(members[j].size()));
  }
  return result;
}

ScoreSeries score_series(const PanelData& panel, const OlsFit& fit) {
  if (fit.residuals.rows() != panel.n_units() || fit.residuals.cols() != panel.n_periods()) {
    throw Error(ErrorCode::ShapeMismatch, "fit does not match panel dimensions");
  }
  ScoreSeries scores;
  scores.w.reserve(static_cast<std::size_t>(panel.n_units()));
  for (Eigen::Index i = 0; i < panel.n_units(); ++i) {
    scores.w.push_back(panel.covariates(i).array().colwise() *
                       fit.residuals.row(i).transpose().array());
  }
  return scores;
}

ScoreSeries ScoreSeries::time_slice(Eigen::Index start, Eigen::Index length) const {
  ScoreSeries out;
  out.w.reserve(w.size());
  for (const auto& wi : w) out.w.push_back(wi.middleRows(start, length));
  return out;
}

}  // namespace panelcluster
