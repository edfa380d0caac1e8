#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "panelcluster/montecarlo.hpp"

using namespace panelcluster;

TEST_CASE("white-noise limit has outcome variance one half") {
  DgpConfig config;
  config.q = 2;
  config.n_units = 2;
  config.n_periods = 50000;
  config.rho = 0.0;
  config.phi = 0.0;
  config.seed = 7;
  const auto [panel, truth] = generate(config);
  const Eigen::ArrayXXd centered = panel.outcomes().array() - config.beta;
  const double variance = centered.square().mean();
  CHECK(std::abs(variance - 0.5) < 0.02);
}

TEST_CASE("same-cluster units correlate at one half") {
  DgpConfig config;
  config.q = 1;
  config.n_units = 2;
  config.n_periods = 100000;
  config.seed = 11;
  const auto [panel, truth] = generate(config);
  const Eigen::ArrayXd a = panel.outcomes().row(0).array() - panel.outcomes().row(0).mean();
  const Eigen::ArrayXd b = panel.outcomes().row(1).array() - panel.outcomes().row(1).mean();
  const double correlation =
      (a * b).sum() / std::sqrt(a.square().sum() * b.square().sum());
  CHECK(std::abs(correlation - 0.5) < 0.01);
}

TEST_CASE("generation is bitwise reproducible") {
  DgpConfig config;
  config.q = 5;
  config.n_units = 10;
  config.n_periods = 30;
  config.seed = 99;
  const auto [p1, t1] = generate(config);
  const auto [p2, t2] = generate(config);
  CHECK(p1.outcomes() == p2.outcomes());
  CHECK(t1.labels == t2.labels);
  config.seed = 100;
  const auto [p3, t3] = generate(config);
  CHECK(p1.outcomes() != p3.outcomes());
}

TEST_CASE("clusters are contiguous equal blocks") {
  DgpConfig config;
  config.q = 3;
  config.n_units = 9;
  config.n_periods = 10;
  config.seed = 1;
  const auto [panel, truth] = generate(config);
  CHECK(truth.labels == std::vector<int>{1, 1, 1, 2, 2, 2, 3, 3, 3});
  CHECK(truth.q_hat == 3);
}

TEST_CASE("bad configurations are rejected") {
  DgpConfig config;
  config.q = 3;
  config.n_units = 10;  // not a multiple
  try {
    generate(config);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
  }
  config.n_units = 9;
  config.rho = 1.0;
  CHECK_THROWS_AS(generate(config), Error);
}

TEST_CASE("summary is identical across worker counts") {
  ExperimentConfig config;
  config.dgp.q = 2;
  config.dgp.n_units = 8;
  config.dgp.n_periods = 60;
  config.dgp.seed = 42;
  config.replications = 8;
  config.methods = {Method::ArtOracle, Method::CceOracle, Method::ArtDiscovered, Method::Bcl};
  config.tuning.mode = TuningChoice::Mode::Fixed;
  config.tuning.bandwidth = 2;
  config.tuning.eta_tilde = 0.4;

  config.workers = 1;
  const std::string serial = format_table(config, run_size_power(config));
  config.workers = 3;
  const std::string threaded = format_table(config, run_size_power(config));
  config.workers = 8;
  const std::string oversubscribed = format_table(config, run_size_power(config));
  CHECK(serial == threaded);
  CHECK(serial == oversubscribed);
}

TEST_CASE("recovery run with a threshold of one yields singletons") {
  ExperimentConfig config;
  config.dgp.q = 2;
  config.dgp.n_units = 6;
  config.dgp.n_periods = 40;
  config.dgp.seed = 5;
  config.replications = 4;
  config.tuning.mode = TuningChoice::Mode::Fixed;
  config.tuning.bandwidth = 2;
  config.tuning.eta_tilde = 1.0;
  const SimulationSummary summary = run_recovery(config);
  CHECK(summary.has_recovery);
  CHECK(summary.q_hat.estimate == 6.0);       // every unit alone
  CHECK(summary.min_purity.estimate == 1.0);  // singletons are pure
  CHECK(summary.q_hat.mc_se == 0.0);
}

TEST_CASE("rate standard errors follow the binomial formula") {
  ExperimentConfig config;
  config.dgp.q = 2;
  config.dgp.n_units = 8;
  config.dgp.n_periods = 50;
  config.dgp.seed = 31;
  config.replications = 10;
  config.methods = {Method::CceOracle};
  config.tuning.mode = TuningChoice::Mode::Fixed;
  config.tuning.bandwidth = 2;
  config.tuning.eta_tilde = 0.4;
  const SimulationSummary summary = run_size_power(config);
  REQUIRE(summary.rejection_rates.size() == 1);
  const auto [method, rate] = summary.rejection_rates[0];
  CHECK(rate.mc_se ==
        doctest::Approx(std::sqrt(rate.estimate * (1.0 - rate.estimate) / 10.0)).epsilon(1e-12));
}

TEST_CASE("format_table emits one row per metric") {
  ExperimentConfig config;
  config.dgp.q = 2;
  config.dgp.n_units = 6;
  config.dgp.n_periods = 40;
  config.dgp.seed = 3;
  config.replications = 2;
  config.methods = {Method::ArtOracle, Method::ArtDiscovered};
  config.tuning.mode = TuningChoice::Mode::Fixed;
  config.tuning.bandwidth = 2;
  config.tuning.eta_tilde = 0.5;
  const std::string table = format_table(config, run_size_power(config));
  CHECK(table.find("rejection_rate,art_oracle") != std::string::npos);
  CHECK(table.find("rejection_rate,art_discovered") != std::string::npos);
  CHECK(table.find("avg_purity,discovered") != std::string::npos);
  const auto rows = std::count(table.begin(), table.end(), '\n');
  CHECK(rows == 1 + 2 + 3);  // header, two rates, three recovery rows
}

TEST_CASE("randomized decisions stay reproducible") {
  ExperimentConfig config;
  config.dgp.q = 2;
  config.dgp.n_units = 6;
  config.dgp.n_periods = 40;
  config.dgp.seed = 77;
  config.replications = 6;
  config.methods = {Method::ArtOracle};
  config.randomized_phi = true;
  config.tuning.mode = TuningChoice::Mode::Fixed;
  config.tuning.bandwidth = 2;
  config.tuning.eta_tilde = 0.5;
  const SimulationSummary a = run_size_power(config);
  config.workers = 4;
  const SimulationSummary b = run_size_power(config);
  CHECK(a.rejection_rates[0].second.estimate == b.rejection_rates[0].second.estimate);
}
