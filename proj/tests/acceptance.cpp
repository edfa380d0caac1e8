// Acceptance suite: runs every criterion end to end and prints one
// PASS/FAIL line each. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "oracle_helpers.hpp"
#include "panelcluster/art.hpp"
#include "panelcluster/discovery.hpp"
#include "panelcluster/montecarlo.hpp"
#include "panelcluster/rng.hpp"
#include "panelcluster/tuning.hpp"

using namespace panelcluster;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

int workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 2 : static_cast<int>(hw);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ExperimentConfig base_config(int q, int n, int t, int reps, std::uint64_t seed) {
  ExperimentConfig config;
  config.dgp.q = q;
  config.dgp.n_units = n;
  config.dgp.n_periods = t;
  config.dgp.seed = seed;
  config.replications = reps;
  config.workers = workers();
  return config;
}

double rate_of(const SimulationSummary& summary, Method method) {
  for (const auto& [m, rate] : summary.rejection_rates) {
    if (m == method) return rate.estimate;
  }
  return -1.0;
}

double se_of(const SimulationSummary& summary, Method method) {
  for (const auto& [m, rate] : summary.rejection_rates) {
    if (m == method) return rate.mc_se;
  }
  return -1.0;
}

// ---- C1 + C2: cluster recovery anchors -----------------------------------

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config = base_config(5, 50, 200, 300, 20250811);
  const SimulationSummary summary = run_recovery(config);
  const double elapsed = seconds_since(start);
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "avg purity %.3f (>= 0.97), min purity %.3f (>= 0.94), avg q_hat %.3f "
                "(in [4.5, 5.4]), %.1fs (<= 600s)",
                summary.avg_purity.estimate, summary.min_purity.estimate,
                summary.q_hat.estimate, elapsed);
  const bool pass = summary.avg_purity.estimate >= 0.97 &&
                    summary.min_purity.estimate >= 0.94 && summary.q_hat.estimate >= 4.5 &&
                    summary.q_hat.estimate <= 5.4 && elapsed <= 600.0;
  report("C1 recovery anchor q=5 N=50 T=200", pass, detail);
}

void criterion_2() {
  ExperimentConfig short_t = base_config(25, 200, 100, 300, 20250812);
  ExperimentConfig long_t = base_config(25, 200, 200, 300, 20250813);
  const SimulationSummary a = run_recovery(short_t);
  const SimulationSummary b = run_recovery(long_t);
  const double inflation_short = a.q_hat.estimate / 25.0;
  const double inflation_long = b.q_hat.estimate / 25.0;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "q_hat/q at T=100 is %.3f, at T=200 is %.3f (strict decrease required)",
                inflation_short, inflation_long);
  report("C2 recovery hardness ordering q=25 N=200", inflation_short > inflation_long, detail);
}

// ---- C3..C7: size and power anchors --------------------------------------

struct PowerRuns {
  SimulationSummary at_null;    // beta0 = 1.00
  SimulationSummary at_95;      // beta0 = 0.95
  SimulationSummary at_90;      // beta0 = 0.90
};

PowerRuns run_q10_bundle() {
  PowerRuns runs;
  ExperimentConfig config = base_config(10, 50, 200, 500, 20250814);
  config.methods = {Method::ArtOracle, Method::ArtDiscovered, Method::Bcl};
  config.beta_null = 1.0;
  runs.at_null = run_size_power(config);
  config.beta_null = 0.95;
  runs.at_95 = run_size_power(config);
  config.beta_null = 0.90;
  runs.at_90 = run_size_power(config);
  return runs;
}

void criterion_3(const PowerRuns& runs) {
  const double rate = rate_of(runs.at_null, Method::ArtOracle);
  char detail[128];
  std::snprintf(detail, sizeof(detail), "oracle ART size %.3f (in [0.07, 0.15], reference 0.110)",
                rate);
  report("C3 ART size q=10 N=50 T=200", rate >= 0.07 && rate <= 0.15, detail);
}

void criterion_4() {
  ExperimentConfig config = base_config(25, 50, 200, 500, 20250815);
  config.methods = {Method::CceOracle};
  const SimulationSummary summary = run_size_power(config);
  const double rate = rate_of(summary, Method::CceOracle);
  char detail[128];
  std::snprintf(detail, sizeof(detail), "oracle CCE size %.3f (in [0.08, 0.16], reference 0.116)",
                rate);
  report("C4 CCE size q=25 N=50 T=200", rate >= 0.08 && rate <= 0.16, detail);
}

void criterion_5() {
  ExperimentConfig config = base_config(5, 50, 100, 500, 20250816);
  config.methods = {Method::CceOracle};
  const SimulationSummary summary = run_size_power(config);
  const double rate = rate_of(summary, Method::CceOracle);
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "oracle CCE size %.3f (>= 0.14 over-rejection, reference 0.181)", rate);
  report("C5 small-q CCE over-rejection q=5 N=50 T=100", rate >= 0.14, detail);
}

void criterion_6(const PowerRuns& runs) {
  const double p90 = rate_of(runs.at_90, Method::ArtOracle);
  const double p95 = rate_of(runs.at_95, Method::ArtOracle);
  const double p100 = rate_of(runs.at_null, Method::ArtOracle);
  const double se90 = se_of(runs.at_90, Method::ArtOracle);
  const double se95 = se_of(runs.at_95, Method::ArtOracle);
  const double se100 = se_of(runs.at_null, Method::ArtOracle);
  const double gap_hi = p90 - p95;
  const double gap_lo = p95 - p100;
  const double need_hi = 3.0 * std::sqrt(se90 * se90 + se95 * se95);
  const double need_lo = 3.0 * std::sqrt(se95 * se95 + se100 * se100);
  char detail[192];
  std::snprintf(detail, sizeof(detail),
                "oracle ART power %.3f > %.3f > %.3f, gaps %.3f > %.3f and %.3f > %.3f",
                p90, p95, p100, gap_hi, need_hi, gap_lo, need_lo);
  report("C6 power ordering q=10 N=50 T=200", gap_hi > need_hi && gap_lo > need_lo, detail);
}

void criterion_7(const PowerRuns& runs) {
  const double bcl_size = rate_of(runs.at_null, Method::Bcl);
  const double bcl_power = rate_of(runs.at_95, Method::Bcl);
  const double art_power = rate_of(runs.at_95, Method::ArtDiscovered);
  char detail[192];
  std::snprintf(detail, sizeof(detail),
                "BCL size %.3f (<= 0.03, reference 0.006); BCL power %.3f vs discovered ART %.3f "
                "(gap >= 0.10, reference 0.238 vs 0.668)",
                bcl_size, bcl_power, art_power);
  report("C7 BCL conservativeness q=10 N=50 T=200",
         bcl_size <= 0.03 && bcl_power <= art_power - 0.10, detail);
}

// ---- C8: HAC oracle equivalence -------------------------------------------

void criterion_8() {
  Rng rng(881);
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const int n = 2 + static_cast<int>(rng.bits() % 5);       // <= 6
    const int t = 6 + static_cast<int>(rng.bits() % 15);      // <= 20
    const int p = 1 + static_cast<int>(rng.bits() % 2);       // <= 2
    const int l = static_cast<int>(rng.bits() % 5);           // <= 4
    const PanelData panel = oracle::random_panel(rng, n, t, p);
    const ScoreSeries scores = score_series(panel, pooled_ols(panel));
    const KernelSpec kernel{KernelKind::Bartlett, l};
    const LongRunMatrix matrix = longrun_matrix(scores, kernel);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const PairLongRun pair = pair_longrun(scores, i, j, kernel);
        worst = std::max(worst, oracle::rel_diff(pair.sigma_ab,
                                                 oracle::naive_pair_sigma_ab(scores, i, j, l)));
        worst = std::max(worst, oracle::rel_diff(matrix.sigma(i, j),
                                                 oracle::naive_pair_sigma(scores, i, j, l)));
      }
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "worst relative error %.2e (<= 1e-12) over 100 instances",
                worst);
  report("C8 HAC oracle equivalence", worst <= 1e-12, detail);
}

// ---- C9: randomization exactness ------------------------------------------

void criterion_9() {
  Rng rng(991);
  bool exact = true;
  bool conservative = true;
  for (int q = 2; q <= 4 && exact; ++q) {
    for (int round = 0; round < 50 && exact; ++round) {
      StatisticVector s;
      s.s = Eigen::VectorXd::NullaryExpr(q, [&](Eigen::Index) { return rng.normal(); });
      const std::vector<double> orbit = orbit_statistics(s, {});
      const std::int64_t m = static_cast<std::int64_t>(orbit.size());
      std::int64_t ones = 0, boundary = 0, det_rejections = 0;
      StatisticVector gs = s;
      for (std::int64_t mask = 0; mask < m; ++mask) {
        for (int j = 0; j < q; ++j) gs.s(j) = (mask >> j) & 1 ? -s.s(j) : s.s(j);
        const TestResult r = art_decision(r_statistic(gs), orbit, 0.1);
        if (r.phi == 1.0) {
          ++ones;
          ++det_rejections;
        } else if (r.phi > 0.0) {
          ++boundary;
        }
      }
      const oracle::Rational alpha = oracle::Rational::of(1, 10);
      const oracle::Rational m_rat = oracle::Rational::of(m, 1);
      oracle::Rational mean = oracle::Rational::of(ones, m);
      if (boundary > 0) {
        const oracle::Rational a = (m_rat * alpha - oracle::Rational::of(ones, 1)) /
                                   oracle::Rational::of(boundary, 1);
        mean = (oracle::Rational::of(ones, 1) + oracle::Rational::of(boundary, 1) * a) / m_rat;
      }
      if (!(mean == alpha)) exact = false;
      if (!(oracle::Rational::of(det_rejections, m) <= alpha)) conservative = false;
    }
  }
  report("C9 randomization exactness identity", exact && conservative,
         exact ? "orbit mean of phi equals alpha exactly; deterministic mean <= alpha"
               : "identity violated");
}

// ---- C10: refinement monotonicity + equivalence relation ------------------

void criterion_10() {
  Rng rng(1013);
  bool monotone = true;
  for (int round = 0; round < 100 && monotone; ++round) {
    const int n = 10;
    LongRunMatrix matrix;
    matrix.corr = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        matrix.corr(i, j) = matrix.corr(j, i) = rng.uniform();
      }
    }
    matrix.sigma = matrix.corr;
    ClusterAssignment previous;
    for (int k = 0; k <= 20; ++k) {
      const double eta = static_cast<double>(k) / 20.0;
      const ClusterAssignment current = connected_components(
          threshold_adjacency(matrix, {eta, ThresholdTarget::Correlation}));
      if (k > 0) {
        for (int i = 0; i < n && monotone; ++i) {
          for (int j = i + 1; j < n; ++j) {
            if (current.labels[i] == current.labels[j] &&
                previous.labels[i] != previous.labels[j]) {
              monotone = false;
              break;
            }
          }
        }
      }
      previous = current;
    }
  }

  bool relation = true;
  for (int round = 0; round < 200 && relation; ++round) {
    auto draw = [&] {
      std::vector<int> labels(6);
      for (auto& label : labels) label = 1 + static_cast<int>(rng.bits() % 3);
      return ClusterAssignment::from_labels(labels);
    };
    const auto a = draw(), b = draw(), c = draw();
    if (!clusters_equivalent(a, a)) relation = false;
    if (clusters_equivalent(a, b) != clusters_equivalent(b, a)) relation = false;
    if (clusters_equivalent(a, b) && clusters_equivalent(b, c) && !clusters_equivalent(a, c)) {
      relation = false;
    }
  }
  report("C10 refinement monotonicity and equivalence relation", monotone && relation,
         monotone && relation ? "100 matrices x 21 thresholds refine; relation laws hold"
                              : (monotone ? "equivalence relation violated"
                                          : "refinement violated"));
}

// ---- C11: determinism across worker counts --------------------------------

void criterion_11() {
  ExperimentConfig config = base_config(2, 8, 60, 16, 20250817);
  config.methods = {Method::ArtOracle, Method::ArtDiscovered, Method::CceOracle,
                    Method::CceDiscovered, Method::Bcl};
  config.randomized_phi = true;
  std::vector<std::string> tables;
  for (int count : {1, 4, 8}) {
    config.workers = count;
    tables.push_back(format_table(config, run_size_power(config)));
  }
  const bool identical = tables[0] == tables[1] && tables[0] == tables[2];
  report("C11 determinism across worker counts", identical,
         identical ? "byte-identical tables at workers 1, 4, 8" : "tables differ");
}

// ---- C12: CV sanity --------------------------------------------------------

void criterion_12() {
  const int reps = 50;
  std::atomic<int> perfect{0};
  std::atomic<int> next{0};
  const int pool_size = workers();
  std::vector<std::thread> pool;
  for (int w = 0; w < pool_size; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int rep = next.fetch_add(1);
        if (rep >= reps) break;
        DgpConfig dgp;
        dgp.q = 2;
        dgp.n_units = 20;
        dgp.n_periods = 200;
        dgp.seed = derive_seed(20250818, static_cast<std::uint64_t>(rep));
        const auto [panel, truth] = generate(dgp);
        const CvResult cv = cross_validate(panel, TuningGrid::defaults_for(200));
        const auto [clusters, matrix] =
            discover_clusters(panel, {KernelKind::Bartlett, cv.best_bandwidth},
                              {cv.best_threshold, ThresholdTarget::Correlation});
        if (clusters_equivalent(clusters, truth)) ++perfect;
      }
    });
  }
  for (auto& thread : pool) thread.join();
  const double share = static_cast<double>(perfect.load()) / reps;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "perfect recovery in %.0f%% of %d reps (>= 80%%)",
                100.0 * share, reps);
  report("C12 CV sanity q=2 N=20 T=200", share >= 0.80, detail);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();

  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();

  const PowerRuns runs = run_q10_bundle();
  criterion_3(runs);
  criterion_6(runs);
  criterion_7(runs);
  criterion_4();
  criterion_5();

  criterion_1();
  criterion_2();

  std::printf("acceptance total: %.1fs, %d failure(s)\n", seconds_since(start), failures);
  return failures == 0 ? 0 : 1;
}
