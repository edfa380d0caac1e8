#include "panelcluster/bcl.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <string>

#include "panelcluster/normal.hpp"

namespace panelcluster {

std::string BclThresholdRule::describe() const {
  std::ostringstream out;
  out << (absolute ? "|V_ij[a,b]|" : "V_ij[a,b]") << " >= " << constant
      << " * sqrt(V_ii[a,a] V_jj[b,b] log(N) / T)";
  return out.str();
}

Eigen::MatrixXd bcl_pair(const ScoreSeries& scores, Eigen::Index i, Eigen::Index j,
                         const KernelSpec& kernel) {
  const Eigen::Index t_len = scores.n_periods();
  if (kernel.bandwidth >= t_len) {
    throw Error(ErrorCode::BandwidthTooLarge, "bandwidth " + std::to_string(kernel.bandwidth) +
                                                  " >= T = " + std::to_string(t_len));
  }
  const LagMoments moments = lag_cross_moments(scores, i, j, kernel.bandwidth);
  Eigen::MatrixXd v = moments.m[0];
  for (int h = 1; h <= kernel.bandwidth; ++h) {
    v.noalias() += bartlett_weight(h, kernel.bandwidth) * moments.m[static_cast<std::size_t>(h)];
  }
  return v / static_cast<double>(t_len);
}

BclEstimate bcl_variance(const PanelData& panel, const OlsFit& fit, const KernelSpec& kernel,
                         const BclThresholdRule& rule) {
  const ScoreSeries scores = score_series(panel, fit);
  const Eigen::Index n = panel.n_units();
  const Eigen::Index p = panel.n_covariates();
  const double scale =
      std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(panel.n_periods()));

  std::vector<Eigen::MatrixXd> diagonal;
  diagonal.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) diagonal.push_back(bcl_pair(scores, i, i, kernel));

  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(p, p);
  std::int64_t kept_pairs = static_cast<std::int64_t>(n);  // diagonal pairs always survive
  for (Eigen::Index i = 0; i < n; ++i) total += diagonal[static_cast<std::size_t>(i)];

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::MatrixXd v = bcl_pair(scores, i, j, kernel);
      Eigen::MatrixXd kept = Eigen::MatrixXd::Zero(p, p);
      bool any = false;
      for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
          const double cutoff =
              rule.constant *
              std::sqrt(diagonal[static_cast<std::size_t>(i)](a, a) *
                        diagonal[static_cast<std::size_t>(j)](b, b)) *
              scale;
          const double entry = rule.absolute ? std::abs(v(a, b)) : v(a, b);
          if (entry >= cutoff) {
            kept(a, b) = v(a, b);
            any = true;
          }
        }
      }
      if (any) {
        // The (j, i) pair is the transpose and survives symmetrically.
        total += kept + kept.transpose();
        kept_pairs += 2;
      }
    }
  }

  BclEstimate estimate;
  estimate.v_hat = (total / static_cast<double>(n));
  estimate.v_hat = 0.5 * (estimate.v_hat + estimate.v_hat.transpose()).eval();
  estimate.kept_pairs = kept_pairs;
  estimate.threshold_rule = rule.describe();
  return estimate;
}

TestResult bcl_test(const PanelData& panel, const LinearRestriction& restriction, double alpha,
                    const KernelSpec& kernel, const BclThresholdRule& rule) {
  if (restriction.r.size() != panel.n_covariates() || restriction.r.isZero(0.0)) {
    throw Error(ErrorCode::InvalidConfig, "restriction does not match covariate count");
  }
  const OlsFit fit = pooled_ols(panel);
  const BclEstimate estimate = bcl_variance(panel, fit, kernel, rule);

  // Var(beta_hat) = gram^{-1} V gram^{-1} / (NT), matching the 1/sqrt(NT)
  // scaling under which V estimates the long-run score variance.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(fit.gram);
  const auto& values = solver.eigenvalues();
  if (!(values.minCoeff() > 1e-12 * values.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::RankDeficient, "gram matrix is numerically singular");
  }
  const Eigen::MatrixXd gram_inverse = solver.eigenvectors() *
                                       values.cwiseInverse().asDiagonal() *
                                       solver.eigenvectors().transpose();
  const Eigen::MatrixXd covariance =
      gram_inverse * estimate.v_hat * gram_inverse /
      static_cast<double>(panel.n_units() * panel.n_periods());

  const double variance = restriction.r.dot(covariance * restriction.r);
  if (!(variance > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance, "r' V r is not positive");
  }
  const double deviation = restriction.r.dot(fit.beta_hat) - restriction.lambda;
  const double statistic = deviation / std::sqrt(variance);

  TestResult result;
  result.statistic = statistic;
  result.alpha = alpha;
  result.method = "bcl";
  result.p_value = 2.0 * (1.0 - normal_cdf(std::abs(statistic)));
  result.phi = std::abs(statistic) > normal_quantile(1.0 - alpha / 2.0) ? 1.0 : 0.0;
  return result;
}

}  // namespace panelcluster
