#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "panelcluster/hypothesis.hpp"
#include "panelcluster/longrun.hpp"
#include "panelcluster/ols.hpp"
#include "panelcluster/panel.hpp"

namespace panelcluster {

/// Entrywise keep rule for the pairwise matrices: entry (a,b) of V_ij
/// survives when it is >= constant * sqrt(V_ii[a,a] V_jj[b,b] log(N) / T).
/// The comparison is one-sided on the signed entry by default; `absolute`
/// thresholds |entry| instead. Diagonal pairs are always kept whole.
struct BclThresholdRule {
  double constant = 2.0;
  bool absolute = false;

  std::string describe() const;
};

struct BclEstimate {
  Eigen::MatrixXd v_hat;  // p x p, symmetrized (V + V') / 2
  std::int64_t kept_pairs = 0;  // ordered (i,j) pairs with a surviving entry
  std::string threshold_rule;
};

/// Newey-West pairwise matrix, every term normalized by 1/T:
///   V_ij = (1/T) [ m[0] + sum_{h=1..L} omega(h,L) m[h] ].
Eigen::MatrixXd bcl_pair(const ScoreSeries& scores, Eigen::Index i, Eigen::Index j,
                         const KernelSpec& kernel);

BclEstimate bcl_variance(const PanelData& panel, const OlsFit& fit, const KernelSpec& kernel,
                         const BclThresholdRule& rule = {});

/// Two-sided normal test of r'beta = lambda with variance
/// gram^{-1} v_hat gram^{-1} / (NT).
TestResult bcl_test(const PanelData& panel, const LinearRestriction& restriction, double alpha,
                    const KernelSpec& kernel, const BclThresholdRule& rule = {});

}  // namespace panelcluster
