#include "panelcluster/longrun.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace panelcluster {

double bartlett_weight(int lag, int bandwidth) {
  if (lag < 0 || bandwidth < 1) {
    throw Error(ErrorCode::DomainError, "bartlett_weight requires lag >= 0 and bandwidth >= 1");
  }
  if (lag > bandwidth) return 0.0;
  return static_cast<double>(bandwidth - lag) / static_cast<double>(bandwidth);
}

LagMoments lag_cross_moments(const ScoreSeries& scores, Eigen::Index i, Eigen::Index j,
                             int max_lag) {
  const auto& wi = scores.w[static_cast<std::size_t>(i)];
  const auto& wj = scores.w[static_cast<std::size_t>(j)];
  const Eigen::Index t_len = wi.rows();
  if (max_lag >= t_len) {
    throw Error(ErrorCode::BandwidthTooLarge,
                "lag " + std::to_string(max_lag) + " >= T = " + std::to_string(t_len));
  }
  LagMoments moments;
  moments.m.reserve(static_cast<std::size_t>(max_lag) + 1);
  moments.m.push_back(wi.transpose() * wj);
  for (int h = 1; h <= max_lag; ++h) {
    const Eigen::Index len = t_len - h;
    Eigen::MatrixXd mh = wi.bottomRows(len).transpose() * wj.topRows(len);
    mh.noalias() += wi.topRows(len).transpose() * wj.bottomRows(len);
    moments.m.push_back(std::move(mh));
  }
  return moments;
}

PairLongRun combine_lag_moments(const LagMoments& moments, Eigen::Index n_periods,
                                const KernelSpec& kernel) {
  const int bandwidth = kernel.bandwidth;
  if (bandwidth >= n_periods) {
    throw Error(ErrorCode::BandwidthTooLarge,
                "bandwidth " + std::to_string(bandwidth) + " >= T = " + std::to_string(n_periods));
  }
  if (bandwidth >= static_cast<int>(moments.m.size())) {
    throw Error(ErrorCode::BandwidthTooLarge, "moments hold " +
                                                  std::to_string(moments.m.size() - 1) +
                                                  " lags, bandwidth is " + std::to_string(bandwidth));
  }
  PairLongRun out;
  out.sigma_ab = moments.m[0] / static_cast<double>(n_periods);
  for (int h = 1; h <= bandwidth; ++h) {
    const double weight = bartlett_weight(h, bandwidth) / static_cast<double>(n_periods - h);
    out.sigma_ab.noalias() += weight * moments.m[static_cast<std::size_t>(h)];
  }
  out.sigma_ij = out.sigma_ab.cwiseAbs().sum();
  return out;
}

PairLongRun pair_longrun(const ScoreSeries& scores, Eigen::Index i, Eigen::Index j,
                         const KernelSpec& kernel) {
  return combine_lag_moments(lag_cross_moments(scores, i, j, kernel.bandwidth),
                             scores.n_periods(), kernel);
}

LongRunMatrix longrun_matrix(const ScoreSeries& scores, const KernelSpec& kernel) {
  const Eigen::Index n = scores.n_units();
  LongRunMatrix result;
  result.bandwidth = kernel.bandwidth;
  result.sigma.setZero(n, n);
  result.corr.setZero(n, n);
  Eigen::MatrixXd signed_sum(n, n);
  if (scores.n_covariates() == 1) {
    // Scalar scores: plain dot products, no per-pair matrix temporaries.
    const Eigen::Index t_len = scores.n_periods();
    const int bandwidth = kernel.bandwidth;
    if (bandwidth >= t_len) {
      throw Error(ErrorCode::BandwidthTooLarge, "bandwidth " + std::to_string(bandwidth) +
                                                    " >= T = " + std::to_string(t_len));
    }
    std::vector<double> weight(static_cast<std::size_t>(bandwidth) + 1);
    weight[0] = 1.0 / static_cast<double>(t_len);
    for (int h = 1; h <= bandwidth; ++h) {
      weight[static_cast<std::size_t>(h)] =
          bartlett_weight(h, bandwidth) / static_cast<double>(t_len - h);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto wi = scores.w[static_cast<std::size_t>(i)].col(0);
      for (Eigen::Index j = i; j < n; ++j) {
        const auto wj = scores.w[static_cast<std::size_t>(j)].col(0);
        double value = weight[0] * wi.dot(wj);
        for (int h = 1; h <= bandwidth; ++h) {
          const Eigen::Index len = t_len - h;
          value += weight[static_cast<std::size_t>(h)] *
                   (wi.tail(len).dot(wj.head(len)) + wi.head(len).dot(wj.tail(len)));
        }
        signed_sum(i, j) = value;
        signed_sum(j, i) = value;
        value = std::abs(value);
        result.sigma(i, j) = value;
        result.sigma(j, i) = value;
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        const PairLongRun pair = pair_longrun(scores, i, j, kernel);
        result.sigma(i, j) = pair.sigma_ij;
        result.sigma(j, i) = pair.sigma_ij;
        signed_sum(i, j) = pair.sigma_ab.sum();
        signed_sum(j, i) = signed_sum(i, j);
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(result.sigma(i, i) > 0.0)) {
      throw Error(ErrorCode::DegenerateDiagonal,
                  "sigma(" + std::to_string(i) + "," + std::to_string(i) +
                      ") is not positive; unit " + std::to_string(i) + " has a degenerate score series");
    }
  }
  result.signed_corr.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    result.corr(i, i) = 1.0;
    result.signed_corr(i, i) = signed_sum(i, i) / result.sigma(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double scale = std::sqrt(result.sigma(i, i) * result.sigma(j, j));
      result.corr(i, j) = result.sigma(i, j) / scale;
      result.corr(j, i) = result.corr(i, j);
      result.signed_corr(i, j) = signed_sum(i, j) / scale;
      result.signed_corr(j, i) = result.signed_corr(i, j);
    }
  }
  return result;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& matrix) {
  char buffer[64];
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", matrix(i, j));
      out << buffer << (j + 1 == matrix.cols() ? '\n' : ' ');
    }
  }
}

}  // namespace panelcluster
