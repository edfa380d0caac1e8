#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "panelcluster/clusters.hpp"
#include "panelcluster/hypothesis.hpp"
#include "panelcluster/ols.hpp"
#include "panelcluster/panel.hpp"

namespace panelcluster {

/// Scaling of the per-cluster statistic entries s_j = c_j (r'beta_j - lambda).
enum class Scaling { Unscaled, SqrtN };

struct StatisticVector {
  Eigen::VectorXd s;  // length q_hat
  Scaling scaling = Scaling::SqrtN;
};

StatisticVector statistic_vector(const std::vector<OlsFit>& fits,
                                 const std::vector<int>& unit_counts,
                                 const LinearRestriction& restriction, Scaling scaling);

/// Test statistic applied to the (possibly scaled) vector s.
/// SumDeviations: sqrt(q) |sum s_j| / sum (s_j - mean)^2;
/// Studentized: sqrt(q) |mean| / sqrt(sum (s_j - mean)^2 / (q - 1)).
/// A zero denominator maps to +inf when the numerator is positive, else 0.
enum class RStatVariant { SumDeviations, Studentized };

double r_statistic(const StatisticVector& s, RStatVariant variant = RStatVariant::SumDeviations);

/// Orbit of R over the sign-change group. Full mode enumerates all 2^q sign
/// vectors (q <= 20, else OrbitTooLarge); Sampled takes the identity plus
/// draws-1 uniform sign vectors (with replacement). Result is sorted.
enum class OrbitMode { Full, Sampled };

struct OrbitOptions {
  OrbitMode mode = OrbitMode::Full;
  int draws = 9999;            // B, sampled mode only (identity included)
  std::uint64_t seed = 0;      // sampled mode only
  RStatVariant variant = RStatVariant::SumDeviations;
};

std::vector<double> orbit_statistics(const StatisticVector& s, const OrbitOptions& options);

/// Randomization decision against a sorted orbit:
///   k = ceil((1-alpha) M), phi = 1 above R(k), a(S) at R(k), 0 below,
///   a(S) = (M alpha - M+)/M0, p = #{R(j) >= observed}/M.
TestResult art_decision(double observed, const std::vector<double>& orbit, double alpha);

struct ArtOptions {
  Scaling scaling = Scaling::SqrtN;
  enum class Mode { Auto, Full, Sampled } mode = Mode::Auto;  // Auto: full up to q=20
  int draws = 9999;
  bool deterministic = false;  // replace the randomized phi = a(S) by phi = 0
  std::uint64_t seed = 0;
  RStatVariant variant = RStatVariant::SumDeviations;
};

/// Full approximate randomization test: per-cluster OLS, statistic vector,
/// orbit, decision. Requires q_hat >= 2 (SingleCluster otherwise).
TestResult art_test(const PanelData& panel, const ClusterAssignment& clusters,
                    const LinearRestriction& restriction, double alpha,
                    const ArtOptions& options = {});

}  // namespace panelcluster
