#include "panelcluster/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace panelcluster {

TuningGrid TuningGrid::defaults_for(Eigen::Index n_periods) {
  TuningGrid grid;
  const int max_bandwidth = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_periods))));
  constexpr int kMaxBandwidthPoints = 14;
  if (max_bandwidth <= kMaxBandwidthPoints) {
    for (int l = 1; l <= max_bandwidth; ++l) grid.bandwidths.push_back(l);
  } else {
    // Log-spaced selection between 1 and the cap.
    const double log_max = std::log(static_cast<double>(max_bandwidth));
    for (int k = 0; k < kMaxBandwidthPoints; ++k) {
      const double fraction = static_cast<double>(k) / (kMaxBandwidthPoints - 1);
      const int candidate = static_cast<int>(std::lround(std::exp(fraction * log_max)));
      if (grid.bandwidths.empty() || candidate > grid.bandwidths.back()) {
        grid.bandwidths.push_back(candidate);
      }
    }
  }
  constexpr int kThresholdPoints = 21;
  for (int k = 0; k < kThresholdPoints; ++k) {
    grid.thresholds.push_back(static_cast<double>(k) / (kThresholdPoints - 1));
  }
  return grid;
}

std::vector<BlockRange> partition_blocks(Eigen::Index n_periods) {
  const long p = std::lround(std::log(static_cast<double>(n_periods)));
  if (p < 2) {
    throw Error(ErrorCode::TooFewPeriods,
                "T = " + std::to_string(n_periods) + " yields fewer than 2 blocks");
  }
  const Eigen::Index blocks = static_cast<Eigen::Index>(p);
  const Eigen::Index base = n_periods / blocks;
  const Eigen::Index remainder = n_periods % blocks;
  std::vector<BlockRange> out;
  out.reserve(static_cast<std::size_t>(blocks));
  Eigen::Index start = 0;
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index length = base + (b < remainder ? 1 : 0);
    out.push_back({start, length});
    start += length;
  }
  return out;
}

std::vector<LongRunMatrix> block_estimates(const PanelData& panel, const OlsFit& fit,
                                           int bandwidth) {
  const auto blocks = partition_blocks(panel.n_periods());
  const ScoreSeries scores = score_series(panel, fit);
  std::vector<LongRunMatrix> out;
  out.reserve(blocks.size());
  for (const auto& block : blocks) {
    if (bandwidth >= block.length) {
      throw Error(ErrorCode::BandwidthTooLargeForBlock,
                  "bandwidth " + std::to_string(bandwidth) + " >= block length " +
                      std::to_string(block.length));
    }
    out.push_back(longrun_matrix(scores.time_slice(block.start, block.length),
                                 KernelSpec{KernelKind::Bartlett, bandwidth}));
  }
  return out;
}

double cv_objective(const std::vector<LongRunMatrix>& block_matrices, int bandwidth,
                    double eta_tilde) {
  if (block_matrices.size() < 2) {
    throw Error(ErrorCode::TooFewPeriods, "cv_objective requires at least 2 blocks");
  }
  for (const auto& mat : block_matrices) {
    if (mat.bandwidth != bandwidth) {
      throw Error(ErrorCode::InvalidConfig, "block matrix bandwidth does not match argument");
    }
  }
  // Scores the signed correlations: absolute-aggregated entries carry a
  // positive noise mean, which would pin the argmin at eta = 0.
  const Eigen::Index n = block_matrices.front().signed_corr.rows();
  double score = 0.0;
  for (std::size_t p = 0; p < block_matrices.size(); ++p) {
    const auto& thresholded_source = block_matrices[p].signed_corr;
    for (std::size_t pp = 0; pp < block_matrices.size(); ++pp) {
      if (pp == p) continue;
      const auto& reference = block_matrices[pp].signed_corr;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          double entry = thresholded_source(i, j);
          if (i != j && std::abs(entry) < eta_tilde) entry = 0.0;
          const double diff = entry - reference(i, j);
          score += diff * diff;
        }
      }
    }
  }
  return score;
}

namespace {

void validate_grid(const TuningGrid& grid, Eigen::Index n_periods) {
  if (grid.bandwidths.empty() || grid.thresholds.empty()) {
    throw Error(ErrorCode::InvalidConfig, "tuning grid is empty");
  }
  const int cap = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_periods))));
  int previous = 0;
  for (int l : grid.bandwidths) {
    if (l < 1 || l > cap) {
      throw Error(ErrorCode::InvalidConfig, "bandwidth " + std::to_string(l) +
                                                " outside [1, " + std::to_string(cap) + "]");
    }
    if (l <= previous) throw Error(ErrorCode::InvalidConfig, "bandwidths must be ascending");
    previous = l;
  }
  double previous_threshold = -1.0;
  for (double eta : grid.thresholds) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "threshold outside [0, 1]");
    }
    if (eta <= previous_threshold) {
      throw Error(ErrorCode::InvalidConfig, "thresholds must be ascending");
    }
    previous_threshold = eta;
  }
}

}  // namespace

CvResult cross_validate(const PanelData& panel, const TuningGrid& grid) {
  validate_grid(grid, panel.n_periods());
  const auto blocks = partition_blocks(panel.n_periods());
  const int max_bandwidth = grid.bandwidths.back();
  for (const auto& block : blocks) {
    if (max_bandwidth >= block.length) {
      throw Error(ErrorCode::BandwidthTooLargeForBlock,
                  "bandwidth " + std::to_string(max_bandwidth) + " >= block length " +
                      std::to_string(block.length));
    }
  }

  const OlsFit fit = pooled_ols(panel);
  const ScoreSeries scores = score_series(panel, fit);
  const Eigen::Index n = panel.n_units();
  const std::size_t n_pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
  const std::size_t n_lags = static_cast<std::size_t>(max_bandwidth) + 1;

  // Lag moments per (block, unordered pair), shared across candidate
  // bandwidths; recombining them per L is what makes the grid cheap. For
  // scalar scores they live in one flat buffer per block.
  const bool scalar = panel.n_covariates() == 1;
  std::vector<std::vector<double>> flat_moments(blocks.size());
  std::vector<std::vector<LagMoments>> block_moments(blocks.size());
  std::vector<ScoreSeries> block_scores;
  block_scores.reserve(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    block_scores.push_back(scores.time_slice(blocks[b].start, blocks[b].length));
    const Eigen::Index t_len = blocks[b].length;
    if (scalar) {
      flat_moments[b].resize(n_pairs * n_lags);
      std::size_t pair_index = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto wi = block_scores[b].w[static_cast<std::size_t>(i)].col(0);
        for (Eigen::Index j = i; j < n; ++j) {
          const auto wj = block_scores[b].w[static_cast<std::size_t>(j)].col(0);
          double* m = flat_moments[b].data() + pair_index * n_lags;
          m[0] = wi.dot(wj);
          for (int h = 1; h <= max_bandwidth; ++h) {
            const Eigen::Index len = t_len - h;
            m[h] = wi.tail(len).dot(wj.head(len)) + wi.head(len).dot(wj.tail(len));
          }
          ++pair_index;
        }
      }
    } else {
      block_moments[b].reserve(n_pairs);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
          block_moments[b].push_back(lag_cross_moments(block_scores[b], i, j, max_bandwidth));
        }
      }
    }
  }

  const std::size_t n_thresholds = grid.thresholds.size();
  CvResult result;
  result.objective_surface.reserve(grid.bandwidths.size() * n_thresholds);
  double best_score = std::numeric_limits<double>::infinity();

  std::vector<Eigen::MatrixXd> corr(blocks.size());  // signed correlations
  Eigen::MatrixXd signed_sum(n, n);
  Eigen::VectorXd abs_diagonal(n);
  for (int bandwidth : grid.bandwidths) {
    const KernelSpec kernel{KernelKind::Bartlett, bandwidth};
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const Eigen::Index t_len = blocks[b].length;
      std::size_t pair_index = 0;
      if (scalar) {
        std::vector<double> weight(static_cast<std::size_t>(bandwidth) + 1);
        weight[0] = 1.0 / static_cast<double>(t_len);
        for (int h = 1; h <= bandwidth; ++h) {
          weight[static_cast<std::size_t>(h)] =
              bartlett_weight(h, bandwidth) / static_cast<double>(t_len - h);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = i; j < n; ++j) {
            const double* m = flat_moments[b].data() + pair_index * n_lags;
            double value = weight[0] * m[0];
            for (int h = 1; h <= bandwidth; ++h) value += weight[static_cast<std::size_t>(h)] * m[h];
            signed_sum(i, j) = value;
            signed_sum(j, i) = value;
            ++pair_index;
          }
        }
      } else {
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = i; j < n; ++j) {
            const PairLongRun pair =
                combine_lag_moments(block_moments[b][pair_index++], t_len, kernel);
            signed_sum(i, j) = pair.sigma_ab.sum();
            signed_sum(j, i) = signed_sum(i, j);
            if (i == j) abs_diagonal(i) = pair.sigma_ij;
          }
        }
      }
      if (scalar) abs_diagonal = signed_sum.diagonal().cwiseAbs();
      corr[b].resize(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!(abs_diagonal(i) > 0.0)) {
          throw Error(ErrorCode::DegenerateDiagonal,
                      "degenerate block diagonal for unit " + std::to_string(i));
        }
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        corr[b](i, i) = signed_sum(i, i) / abs_diagonal(i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
          const double value = signed_sum(i, j) / std::sqrt(abs_diagonal(i) * abs_diagonal(j));
          corr[b](i, j) = value;
          corr[b](j, i) = value;
        }
      }
    }

    // CV(L, eta_k) for all k in one sweep. Each entry's contribution to an
    // ordered block pair switches from (s_p - s_p')^2 to s_p'^2 once eta
    // exceeds |s_p|, so it touches a contiguous prefix of the ascending
    // threshold list; a difference array accumulates all of them.
    std::vector<double> delta(n_thresholds + 1, 0.0);
    double base_dropped = 0.0;
    for (std::size_t p = 0; p < blocks.size(); ++p) {
      for (std::size_t pp = 0; pp < blocks.size(); ++pp) {
        if (pp == p) continue;
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) {
            const double sp = corr[p](i, j);
            const double ref = corr[pp](i, j);
            const double kept = (sp - ref) * (sp - ref);
            const double dropped = (i == j) ? kept : ref * ref;
            const std::size_t cut =
                (i == j) ? n_thresholds
                         : static_cast<std::size_t>(
                               std::upper_bound(grid.thresholds.begin(), grid.thresholds.end(),
                                                std::abs(sp)) -
                               grid.thresholds.begin());
            base_dropped += dropped;
            delta[0] += kept - dropped;
            delta[cut] -= kept - dropped;
          }
        }
      }
    }
    double running = 0.0;
    for (std::size_t k = 0; k < n_thresholds; ++k) {
      running += delta[k];
      const double score = base_dropped + running;
      result.objective_surface.push_back({bandwidth, grid.thresholds[k], score});
      if (score < best_score) {
        best_score = score;
        result.best_bandwidth = bandwidth;
        result.best_threshold = grid.thresholds[k];
      }
    }
  }
  return result;
}

}  // namespace panelcluster
