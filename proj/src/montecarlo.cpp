#include "panelcluster/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "panelcluster/art.hpp"
#include "panelcluster/bcl.hpp"
#include "panelcluster/cce.hpp"
#include "panelcluster/discovery.hpp"
#include "panelcluster/errors.hpp"
#include "panelcluster/rng.hpp"
#include "panelcluster/tuning.hpp"

namespace panelcluster {

const char* method_name(Method method) {
  switch (method) {
    case Method::ArtOracle: return "art_oracle";
    case Method::ArtDiscovered: return "art_discovered";
    case Method::CceOracle: return "cce_oracle";
    case Method::CceDiscovered: return "cce_discovered";
    case Method::Bcl: return "bcl";
  }
  return "unknown";
}

std::pair<PanelData, ClusterAssignment> generate(const DgpConfig& config) {
  if (config.q < 1 || config.n_units < 1 || config.n_units % config.q != 0) {
    throw Error(ErrorCode::InvalidConfig, "n_units must be a positive multiple of q");
  }
  if (config.n_periods < 2) {
    throw Error(ErrorCode::InvalidConfig, "n_periods must be at least 2");
  }
  if (!(std::abs(config.rho) < 1.0 && std::abs(config.phi) < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "AR coefficients must lie in (-1, 1)");
  }
  const int n = config.n_units;
  const int t_len = config.n_periods;
  const int block = n / config.q;
  Rng rng(config.seed);

  // Draw order is fixed: cluster-level series first, then unit-level.
  Eigen::MatrixXd v(config.q, t_len);
  for (int j = 0; j < config.q; ++j) {
    v(j, 0) = rng.normal() / std::sqrt(1.0 - config.phi * config.phi);
    for (int t = 1; t < t_len; ++t) v(j, t) = config.phi * v(j, t - 1) + rng.normal();
  }
  Eigen::MatrixXd u(n, t_len);
  for (int i = 0; i < n; ++i) {
    u(i, 0) = rng.normal() / std::sqrt(1.0 - config.rho * config.rho);
    for (int t = 1; t < t_len; ++t) u(i, t) = config.rho * u(i, t - 1) + rng.normal();
  }

  Eigen::MatrixXd y(n, t_len);
  std::vector<int> truth_labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int cluster = i / block;
    truth_labels[static_cast<std::size_t>(i)] = cluster + 1;
    y.row(i) = config.beta + 0.5 * v.row(cluster).array() + 0.5 * u.row(i).array();
  }

  std::vector<Eigen::MatrixXd> x(static_cast<std::size_t>(n), Eigen::MatrixXd::Ones(t_len, 1));
  std::vector<std::string> ids(static_cast<std::size_t>(n));
  std::size_t width = std::to_string(n - 1).size();
  for (int i = 0; i < n; ++i) {
    std::string digits = std::to_string(i);
    ids[static_cast<std::size_t>(i)] = "u" + std::string(width - digits.size(), '0') + digits;
  }

  return {PanelData::from_arrays(std::move(y), std::move(x), std::move(ids)),
          ClusterAssignment::from_labels(truth_labels)};
}

namespace {

struct RepOutcome {
  double min_purity = 0.0;
  double avg_purity = 0.0;
  double q_hat = 0.0;
  bool has_recovery = false;
  std::vector<int> rejected;  // parallel to config.methods, 0/1
};

bool needs_discovery(const ExperimentConfig& config) {
  if (config.track_recovery) return true;
  for (Method m : config.methods) {
    if (m == Method::ArtDiscovered || m == Method::CceDiscovered) return true;
  }
  return false;
}

bool is_randomization_method(Method m) {
  return m == Method::ArtOracle || m == Method::ArtDiscovered;
}

RepOutcome run_replication(const ExperimentConfig& config, int rep, bool run_tests) {
  const std::uint64_t master = config.dgp.seed;
  DgpConfig dgp = config.dgp;
  dgp.seed = derive_seed(master, 3 * static_cast<std::uint64_t>(rep));
  const std::uint64_t orbit_seed = derive_seed(master, 3 * static_cast<std::uint64_t>(rep) + 1);
  Rng phi_rng(derive_seed(master, 3 * static_cast<std::uint64_t>(rep) + 2));

  auto [panel, truth] = generate(dgp);
  const Eigen::Index t_len = panel.n_periods();

  int bandwidth = config.tuning.bandwidth;
  double eta_tilde = config.tuning.eta_tilde;
  const bool discover = needs_discovery(config);
  if (config.tuning.mode == TuningChoice::Mode::Cv && discover) {
    const CvResult cv = cross_validate(panel, TuningGrid::defaults_for(t_len));
    bandwidth = cv.best_bandwidth;
    eta_tilde = cv.best_threshold;
  }

  RepOutcome outcome;
  ClusterAssignment discovered;
  if (discover) {
    const auto [assignment, matrix] = discover_clusters(
        panel, KernelSpec{KernelKind::Bartlett, bandwidth},
        ThresholdConfig{eta_tilde, ThresholdTarget::Correlation});
    discovered = assignment;
    const auto [min_p, avg_p] = purity(discovered, truth);
    outcome.min_purity = min_p;
    outcome.avg_purity = avg_p;
    outcome.q_hat = static_cast<double>(discovered.q_hat);
    outcome.has_recovery = true;
  }
  if (!run_tests) return outcome;

  LinearRestriction restriction;
  restriction.r = Eigen::VectorXd::Ones(panel.n_covariates());
  restriction.lambda = config.beta_null;

  const int bcl_bandwidth =
      config.bcl_bandwidth > 0 ? config.bcl_bandwidth
                               : std::max(1, static_cast<int>(t_len / 4));

  outcome.rejected.reserve(config.methods.size());
  for (Method method : config.methods) {
    double phi = 0.0;
    try {
      switch (method) {
        case Method::ArtOracle:
        case Method::ArtDiscovered: {
          ArtOptions options;
          options.deterministic = !config.randomized_phi;
          options.draws = config.orbit_draws;
          options.seed = orbit_seed;
          phi = art_test(panel, method == Method::ArtOracle ? truth : discovered, restriction,
                         config.alpha, options)
                    .phi;
          break;
        }
        case Method::CceOracle:
        case Method::CceDiscovered:
          phi = cce_t_test(panel, method == Method::CceOracle ? truth : discovered, restriction,
                           config.alpha, CceVariant::Sandwich)
                    .phi;
          break;
        case Method::Bcl: {
          BclThresholdRule rule;
          rule.constant = config.bcl_constant;
          phi = bcl_test(panel, restriction, config.alpha,
                         KernelSpec{KernelKind::Bartlett, bcl_bandwidth}, rule)
                    .phi;
          break;
        }
      }
    } catch (const Error&) {
      // Degenerate replication for this method (single cluster, rank
      // failure): count as a non-rejection.
      phi = 0.0;
    }
    bool reject;
    if (config.randomized_phi && is_randomization_method(method)) {
      reject = phi_rng.uniform() < phi;  // one auxiliary draw per test
    } else {
      reject = phi >= 1.0;
    }
    outcome.rejected.push_back(reject ? 1 : 0);
  }
  return outcome;
}

std::vector<RepOutcome> run_all(const ExperimentConfig& config, bool run_tests) {
  if (config.replications < 1) {
    throw Error(ErrorCode::InvalidConfig, "replications must be at least 1");
  }
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.replications));
  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    for (int rep = 0; rep < config.replications; ++rep) {
      outcomes[static_cast<std::size_t>(rep)] = run_replication(config, rep, run_tests);
    }
    return outcomes;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int rep = next.fetch_add(1);
        if (rep >= config.replications || failed.load()) break;
        try {
          outcomes[static_cast<std::size_t>(rep)] = run_replication(config, rep, run_tests);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          break;
        }
      }
    });
  }
  for (auto& thread : pool) thread.join();
  if (first_error) std::rethrow_exception(first_error);
  return outcomes;
}

RateEstimate mean_with_se(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  RateEstimate out;
  out.estimate = mean;
  out.mc_se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

RateEstimate rate_with_se(long successes, long trials) {
  RateEstimate out;
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  out.estimate = p;
  out.mc_se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return out;
}

SimulationSummary summarize(const ExperimentConfig& config,
                            const std::vector<RepOutcome>& outcomes, bool run_tests) {
  SimulationSummary summary;
  summary.replications = config.replications;
  if (!outcomes.empty() && outcomes.front().has_recovery) {
    std::vector<double> min_p, avg_p, q_hat;
    min_p.reserve(outcomes.size());
    avg_p.reserve(outcomes.size());
    q_hat.reserve(outcomes.size());
    for (const auto& o : outcomes) {
      min_p.push_back(o.min_purity);
      avg_p.push_back(o.avg_purity);
      q_hat.push_back(o.q_hat);
    }
    summary.min_purity = mean_with_se(min_p);
    summary.avg_purity = mean_with_se(avg_p);
    summary.q_hat = mean_with_se(q_hat);
    summary.has_recovery = true;
  }
  if (run_tests) {
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      long rejections = 0;
      for (const auto& o : outcomes) rejections += o.rejected[m];
      summary.rejection_rates.emplace_back(config.methods[m],
                                           rate_with_se(rejections, config.replications));
    }
  }
  return summary;
}

}  // namespace

SimulationSummary run_recovery(const ExperimentConfig& config) {
  ExperimentConfig with_recovery = config;
  with_recovery.track_recovery = true;
  return summarize(with_recovery, run_all(with_recovery, false), false);
}

SimulationSummary run_size_power(const ExperimentConfig& config) {
  if (config.methods.empty()) {
    throw Error(ErrorCode::InvalidConfig, "no methods requested");
  }
  return summarize(config, run_all(config, true), true);
}

std::string format_table(const ExperimentConfig& config, const SimulationSummary& summary,
                         char delimiter) {
  std::ostringstream out;
  char buffer[64];
  auto emit = [&](const char* metric, const char* method, const RateEstimate& value) {
    out << config.dgp.q << delimiter << config.dgp.n_units << delimiter << config.dgp.n_periods
        << delimiter << summary.replications << delimiter;
    std::snprintf(buffer, sizeof(buffer), "%g", config.alpha);
    out << buffer << delimiter;
    std::snprintf(buffer, sizeof(buffer), "%g", config.beta_null);
    out << buffer << delimiter << metric << delimiter << method << delimiter;
    std::snprintf(buffer, sizeof(buffer), "%.6f", value.estimate);
    out << buffer << delimiter;
    std::snprintf(buffer, sizeof(buffer), "%.6f", value.mc_se);
    out << buffer << '\n';
  };
  out << "q" << delimiter << "n" << delimiter << "t" << delimiter << "reps" << delimiter
      << "alpha" << delimiter << "beta0" << delimiter << "metric" << delimiter << "method"
      << delimiter << "estimate" << delimiter << "mc_se" << '\n';
  for (const auto& [method, rate] : summary.rejection_rates) {
    emit("rejection_rate", method_name(method), rate);
  }
  if (summary.has_recovery) {
    emit("min_purity", "discovered", summary.min_purity);
    emit("avg_purity", "discovered", summary.avg_purity);
    emit("q_hat", "discovered", summary.q_hat);
  }
  return out.str();
}

}  // namespace panelcluster
