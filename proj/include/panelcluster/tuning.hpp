#pragma once

#include <Eigen/Core>
#include <vector>

#include "panelcluster/discovery.hpp"
#include "panelcluster/longrun.hpp"
#include "panelcluster/ols.hpp"
#include "panelcluster/panel.hpp"

namespace panelcluster {

struct TuningGrid {
  std::vector<int> bandwidths;     // ascending, within [1, floor(sqrt(T))]
  std::vector<double> thresholds;  // ascending, within [0, 1]

  /// Default search grid: every integer bandwidth in [1, floor(sqrt(T))]
  /// thinned to at most 14 log-spaced values, and 21 evenly spaced
  /// thresholds on [0, 1].
  static TuningGrid defaults_for(Eigen::Index n_periods);
};

struct CvPoint {
  int bandwidth = 0;
  double eta_tilde = 0.0;
  double score = 0.0;
};

struct CvResult {
  int best_bandwidth = 0;
  double best_threshold = 0.0;
  std::vector<CvPoint> objective_surface;  // grid order: bandwidth asc, threshold asc
};

/// Contiguous, disjoint blocks covering 0..T-1; P = round(ln T) blocks whose
/// sizes differ by at most one (larger blocks first).
struct BlockRange {
  Eigen::Index start = 0;
  Eigen::Index length = 0;
};
std::vector<BlockRange> partition_blocks(Eigen::Index n_periods);

/// Per-block long-run matrices from the full-sample fit's score series.
std::vector<LongRunMatrix> block_estimates(const PanelData& panel, const OlsFit& fit,
                                           int bandwidth);

/// CV(L, eta) = sum_p sum_{p' != p} || thresholded corr_p - corr_{p'} ||_F^2.
/// Only the first argument of each ordered pair is thresholded.
double cv_objective(const std::vector<LongRunMatrix>& block_matrices, int bandwidth,
                    double eta_tilde);

/// Evaluate the objective over the whole grid and return the minimizing pair;
/// ties broken by smaller bandwidth, then smaller threshold.
CvResult cross_validate(const PanelData& panel, const TuningGrid& grid);

}  // namespace panelcluster
