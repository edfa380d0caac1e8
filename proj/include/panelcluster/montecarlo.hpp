#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "panelcluster/clusters.hpp"
#include "panelcluster/panel.hpp"

namespace panelcluster {

/// Panel simulator: y_it = beta + 0.5 v_{g(i),t} + 0.5 u_it with unit-level
/// AR(1) u (coefficient rho) and cluster-level AR(1) v (coefficient phi),
/// standard normal innovations, stationary initialization, intercept-only
/// covariate. Clusters are contiguous blocks of n_units / q units.
struct DgpConfig {
  int q = 5;
  int n_units = 50;
  int n_periods = 100;
  double rho = 0.2;
  double phi = 0.2;
  double beta = 1.0;
  std::uint64_t seed = 0;
};

std::pair<PanelData, ClusterAssignment> generate(const DgpConfig& config);

enum class Method { ArtOracle, ArtDiscovered, CceOracle, CceDiscovered, Bcl };

const char* method_name(Method method);

struct TuningChoice {
  enum class Mode { Cv, Fixed } mode = Mode::Cv;
  int bandwidth = 0;       // Fixed mode
  double eta_tilde = 0.0;  // Fixed mode
};

struct ExperimentConfig {
  DgpConfig dgp;
  int replications = 1;
  double alpha = 0.10;
  double beta_null = 1.0;
  std::vector<Method> methods;
  TuningChoice tuning;
  int workers = 1;
  bool randomized_phi = false;  // realize randomized ART phi with a uniform draw
  int orbit_draws = 9999;       // sampled-orbit size when 2^q_hat is too large
  bool track_recovery = false;  // force purity/q_hat tracking even without discovered methods
  int bcl_bandwidth = 0;        // 0: floor(T/4); otherwise the kernel lag count for BCL
  double bcl_constant = 1.0;    // BCL threshold constant, calibrated for conservative size
};

struct RateEstimate {
  double estimate = 0.0;
  double mc_se = 0.0;
};

struct SimulationSummary {
  // Recovery statistics (populated by run_recovery, and by run_size_power
  // when a discovered-cluster method is requested).
  RateEstimate min_purity;
  RateEstimate avg_purity;
  RateEstimate q_hat;
  bool has_recovery = false;

  // Rejection rates in the order methods were requested.
  std::vector<std::pair<Method, RateEstimate>> rejection_rates;

  int replications = 0;
};

/// Cluster-recovery experiment: generate, tune, discover, score purity.
SimulationSummary run_recovery(const ExperimentConfig& config);

/// Size/power experiment for the requested methods against
/// H0: beta = beta_null. Replications run across `workers` threads with
/// per-replication child streams; results are identical for any worker count.
SimulationSummary run_size_power(const ExperimentConfig& config);

/// Delimited table (one row per config/method with estimate and mc_se) as
/// written by the CLI `simulate` command.
std::string format_table(const ExperimentConfig& config, const SimulationSummary& summary,
                         char delimiter = ',');

}  // namespace panelcluster
