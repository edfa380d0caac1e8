#include "panelcluster/art.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "panelcluster/rng.hpp"

namespace panelcluster {

StatisticVector statistic_vector(const std::vector<OlsFit>& fits,
                                 const std::vector<int>& unit_counts,
                                 const LinearRestriction& restriction, Scaling scaling) {
  if (fits.size() != unit_counts.size()) {
    throw Error(ErrorCode::LengthMismatch, "fits and unit counts differ in length");
  }
  if (restriction.r.size() == 0 || restriction.r.isZero(0.0)) {
    throw Error(ErrorCode::InvalidConfig, "restriction vector r must be nonzero");
  }
  StatisticVector out;
  out.scaling = scaling;
  out.s.resize(static_cast<Eigen::Index>(fits.size()));
  for (std::size_t j = 0; j < fits.size(); ++j) {
    if (fits[j].beta_hat.size() != restriction.r.size()) {
      throw Error(ErrorCode::LengthMismatch, "restriction length does not match coefficients");
    }
    const double deviation = restriction.r.dot(fits[j].beta_hat) - restriction.lambda;
    const double scale =
        scaling == Scaling::SqrtN ? std::sqrt(static_cast<double>(unit_counts[j])) : 1.0;
    out.s(static_cast<Eigen::Index>(j)) = scale * deviation;
  }
  return out;
}

double r_statistic(const StatisticVector& statistic, RStatVariant variant) {
  const Eigen::VectorXd& s = statistic.s;
  const Eigen::Index q = s.size();
  if (q < 2) {
    throw Error(ErrorCode::SingleCluster, "statistic vector needs at least 2 clusters");
  }
  const double total = s.sum();
  const double mean = total / static_cast<double>(q);
  double deviations = 0.0;
  for (Eigen::Index j = 0; j < q; ++j) {
    const double d = s(j) - mean;
    deviations += d * d;
  }
  const double root_q = std::sqrt(static_cast<double>(q));
  double numerator, denominator;
  if (variant == RStatVariant::SumDeviations) {
    numerator = root_q * std::abs(total);
    denominator = deviations;
  } else {
    numerator = root_q * std::abs(mean);
    denominator = std::sqrt(deviations / static_cast<double>(q - 1));
  }
  if (denominator == 0.0) {
    return numerator > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return numerator / denominator;
}

namespace {

std::vector<double> orbit_full(const StatisticVector& statistic, RStatVariant variant) {
  const Eigen::Index q = statistic.s.size();
  if (q > 20) {
    throw Error(ErrorCode::OrbitTooLarge,
                "full enumeration of 2^" + std::to_string(q) + " sign vectors exceeds the cap");
  }
  const std::uint64_t m = 1ULL << q;
  std::vector<double> orbit;
  orbit.reserve(m);
  StatisticVector flipped = statistic;
  for (std::uint64_t mask = 0; mask < m; ++mask) {
    for (Eigen::Index j = 0; j < q; ++j) {
      flipped.s(j) = (mask >> j) & 1ULL ? -statistic.s(j) : statistic.s(j);
    }
    orbit.push_back(r_statistic(flipped, variant));
  }
  return orbit;
}

std::vector<double> orbit_sampled(const StatisticVector& statistic, int draws, std::uint64_t seed,
                                  RStatVariant variant) {
  if (draws < 2) {
    throw Error(ErrorCode::InvalidConfig, "sampled orbit needs at least 2 draws");
  }
  const Eigen::Index q = statistic.s.size();
  std::vector<double> orbit;
  orbit.reserve(static_cast<std::size_t>(draws));
  orbit.push_back(r_statistic(statistic, variant));  // g^1 is the identity
  Rng rng(seed);
  StatisticVector flipped = statistic;
  for (int b = 1; b < draws; ++b) {
    for (Eigen::Index j = 0; j < q; ++j) {
      flipped.s(j) = rng.sign() * statistic.s(j);
    }
    orbit.push_back(r_statistic(flipped, variant));
  }
  return orbit;
}

}  // namespace

std::vector<double> orbit_statistics(const StatisticVector& statistic,
                                     const OrbitOptions& options) {
  if (statistic.s.size() < 2) {
    throw Error(ErrorCode::SingleCluster, "orbit requires at least 2 clusters");
  }
  std::vector<double> orbit = options.mode == OrbitMode::Full
                                  ? orbit_full(statistic, options.variant)
                                  : orbit_sampled(statistic, options.draws, options.seed,
                                                  options.variant);
  std::sort(orbit.begin(), orbit.end());
  return orbit;
}

TestResult art_decision(double observed, const std::vector<double>& orbit, double alpha) {
  if (orbit.empty()) throw Error(ErrorCode::InvalidConfig, "empty orbit");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::DomainError, "alpha must lie in (0, 1)");
  }
  const std::size_t m = orbit.size();
  const auto k = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(m)));
  const double critical = orbit[k - 1];

  std::size_t above = 0, equal = 0, at_least_observed = 0;
  for (double value : orbit) {
    if (value > critical) ++above;
    if (value == critical) ++equal;
    if (value >= observed) ++at_least_observed;
  }
  const double a =
      (static_cast<double>(m) * alpha - static_cast<double>(above)) / static_cast<double>(equal);

  TestResult result;
  result.statistic = observed;
  result.alpha = alpha;
  result.orbit_size = static_cast<std::int64_t>(m);
  result.critical_index = static_cast<int>(k);
  result.p_value = static_cast<double>(at_least_observed) / static_cast<double>(m);
  if (observed > critical) {
    result.phi = 1.0;
  } else if (observed == critical) {
    result.phi = a;
  } else {
    result.phi = 0.0;
  }
  result.method = "art";
  return result;
}

TestResult art_test(const PanelData& panel, const ClusterAssignment& clusters,
                    const LinearRestriction& restriction, double alpha,
                    const ArtOptions& options) {
  if (clusters.q_hat < 2) {
    throw Error(ErrorCode::SingleCluster, "single cluster: test undefined");
  }
  const ClusterOlsResult per_cluster = cluster_ols(panel, clusters);
  const StatisticVector s =
      statistic_vector(per_cluster.fits, per_cluster.unit_counts, restriction, options.scaling);

  OrbitOptions orbit_options;
  orbit_options.variant = options.variant;
  orbit_options.draws = options.draws;
  orbit_options.seed = options.seed;
  switch (options.mode) {
    case ArtOptions::Mode::Full:
      orbit_options.mode = OrbitMode::Full;
      break;
    case ArtOptions::Mode::Sampled:
      orbit_options.mode = OrbitMode::Sampled;
      break;
    case ArtOptions::Mode::Auto:
      orbit_options.mode = clusters.q_hat <= 20 ? OrbitMode::Full : OrbitMode::Sampled;
      break;
  }

  const double observed = r_statistic(s, options.variant);
  const std::vector<double> orbit = orbit_statistics(s, orbit_options);
  TestResult result = art_decision(observed, orbit, alpha);
  if (options.deterministic) {
    // Conservative variant: reject iff R is strictly above the critical
    // value, never randomize at the boundary.
    const double critical = orbit[static_cast<std::size_t>(result.critical_index) - 1];
    result.phi = observed > critical ? 1.0 : 0.0;
  }
  return result;
}

}  // namespace panelcluster
