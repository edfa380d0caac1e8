#include "panelcluster/cce.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "panelcluster/normal.hpp"

namespace panelcluster {

namespace {

// p x p symmetric inverse with an explicit rank check.
Eigen::MatrixXd invert_bread(const Eigen::MatrixXd& bread) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(bread);
  const auto& values = solver.eigenvalues();
  const double largest = values.cwiseAbs().maxCoeff();
  if (!(values.minCoeff() > 1e-12 * largest)) {
    throw Error(ErrorCode::RankDeficient, "bread matrix is numerically singular");
  }
  return solver.eigenvectors() * values.cwiseInverse().asDiagonal() *
         solver.eigenvectors().transpose();
}

}  // namespace

CceEstimate clustered_covariance(const PanelData& panel, const OlsFit& fit,
                                 const ClusterAssignment& clusters, CceVariant variant) {
  if (clusters.n_units() != panel.n_units()) {
    throw Error(ErrorCode::LengthMismatch, "cluster assignment does not match panel");
  }
  const Eigen::Index p = panel.n_covariates();
  const auto members = clusters.members();

  Eigen::MatrixXd score_outer = Eigen::MatrixXd::Zero(p, p);
  for (const auto& group : members) {
    Eigen::VectorXd cluster_score = Eigen::VectorXd::Zero(p);
    for (int unit : group) {
      cluster_score.noalias() +=
          panel.covariates(unit).transpose() * fit.residuals.row(unit).transpose();
    }
    score_outer.noalias() += cluster_score * cluster_score.transpose();
  }
  score_outer = 0.5 * (score_outer + score_outer.transpose()).eval();

  CceEstimate estimate;
  estimate.variant = variant;
  estimate.meat = score_outer / static_cast<double>(clusters.q_hat);

  const Eigen::MatrixXd bread =
      fit.gram * static_cast<double>(panel.n_units() * panel.n_periods());
  const Eigen::MatrixXd bread_inverse = invert_bread(bread);
  estimate.sandwich = bread_inverse * score_outer * bread_inverse;
  estimate.sandwich = 0.5 * (estimate.sandwich + estimate.sandwich.transpose()).eval();
  return estimate;
}

TestResult cce_t_test(const PanelData& panel, const ClusterAssignment& clusters,
                      const LinearRestriction& restriction, double alpha, CceVariant variant) {
  if (clusters.q_hat < 2) {
    throw Error(ErrorCode::SingleCluster, "single cluster: test undefined");
  }
  if (restriction.r.size() != panel.n_covariates() || restriction.r.isZero(0.0)) {
    throw Error(ErrorCode::InvalidConfig, "restriction does not match covariate count");
  }
  const OlsFit fit = pooled_ols(panel);
  const CceEstimate estimate = clustered_covariance(panel, fit, clusters, variant);

  const double deviation = restriction.r.dot(fit.beta_hat) - restriction.lambda;
  double statistic;
  if (variant == CceVariant::PaperMeat) {
    const double variance = restriction.r.dot(estimate.meat * restriction.r);
    if (!(variance > 0.0)) {
      throw Error(ErrorCode::NonPositiveVariance, "r' V r is not positive");
    }
    statistic = std::sqrt(static_cast<double>(clusters.q_hat)) * deviation / std::sqrt(variance);
  } else {
    const double variance = restriction.r.dot(estimate.sandwich * restriction.r);
    if (!(variance > 0.0)) {
      throw Error(ErrorCode::NonPositiveVariance, "r' V r is not positive");
    }
    statistic = deviation / std::sqrt(variance);
  }

  TestResult result;
  result.statistic = statistic;
  result.alpha = alpha;
  result.method = variant == CceVariant::PaperMeat ? "cce_paper" : "cce";
  result.p_value = 2.0 * (1.0 - normal_cdf(std::abs(statistic)));
  result.phi = std::abs(statistic) > normal_quantile(1.0 - alpha / 2.0) ? 1.0 : 0.0;
  return result;
}

}  // namespace panelcluster
