#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "panelcluster/errors.hpp"
#include "panelcluster/ols.hpp"

namespace panelcluster {

enum class KernelKind { Bartlett };

struct KernelSpec {
  KernelKind kind = KernelKind::Bartlett;
  int bandwidth = 0;  // L, number of lags; must satisfy L < T at use sites
};

/// Triangular lag weight (L - h) / L for h <= L, zero beyond.
double bartlett_weight(int lag, int bandwidth);

/// Aggregated pairwise long-run magnitudes and their correlation
/// normalization. `signed_corr` keeps the signed entry sum (no absolute
/// values) under the same normalization; for p = 1 it is the plain long-run
/// correlation and |signed_corr| == corr. Cross-validation scores the signed
/// matrix, cluster recovery thresholds `corr`.
struct LongRunMatrix {
  Eigen::MatrixXd sigma;        // N x N, entries sum_ab |sigma_ab|
  Eigen::MatrixXd corr;         // N x N, sigma_ij / sqrt(sigma_ii sigma_jj)
  Eigen::MatrixXd signed_corr;  // N x N, (sum_ab sigma_ab) / sqrt(sigma_ii sigma_jj)
  int bandwidth = 0;
};

/// Kernel-weighted cross products between two units' scores, one matrix per
/// lag, reusable across bandwidths:
///   m[0]    = sum_t     w_i(t,:)' w_j(t,:)
///   m[h>=1] = sum_{t>h} w_i(t,:)' w_j(t-h,:) + w_i(t-h,:)' w_j(t,:)
struct LagMoments {
  std::vector<Eigen::MatrixXd> m;  // index 0..max_lag, each p x p
};

LagMoments lag_cross_moments(const ScoreSeries& scores, Eigen::Index i, Eigen::Index j,
                             int max_lag);

struct PairLongRun {
  Eigen::MatrixXd sigma_ab;  // p x p
  double sigma_ij = 0.0;     // sum of absolute entries
};

/// Pairwise long-run estimate
///   sigma_ab = (1/T) m[0] + sum_{h=1..L} omega(h,L)/(T-h) m[h]
/// with m the lag moments above, and sigma_ij the absolute-entry sum.
PairLongRun pair_longrun(const ScoreSeries& scores, Eigen::Index i, Eigen::Index j,
                         const KernelSpec& kernel);

/// Same combination applied to precomputed moments (n_periods is the T of the
/// series the moments came from). pair_longrun is this on fresh moments.
PairLongRun combine_lag_moments(const LagMoments& moments, Eigen::Index n_periods,
                                const KernelSpec& kernel);

/// All-pairs long-run matrix; each unordered pair computed once and mirrored.
/// Throws DegenerateDiagonal when some sigma_ii <= 0.
LongRunMatrix longrun_matrix(const ScoreSeries& scores, const KernelSpec& kernel);

/// Row-major text dump of the correlation matrix, 17 significant digits.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& matrix);

}  // namespace panelcluster
