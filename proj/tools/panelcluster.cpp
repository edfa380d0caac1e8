// Command-line front end: discover clusters, tune (L, eta) by
// cross-validation, run a single inference, or drive the simulation harness.
// Exit codes: 0 success, 1 runtime or data error, 2 flag misuse.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "panelcluster/art.hpp"
#include "panelcluster/bcl.hpp"
#include "panelcluster/cce.hpp"
#include "panelcluster/discovery.hpp"
#include "panelcluster/errors.hpp"
#include "panelcluster/montecarlo.hpp"
#include "panelcluster/tuning.hpp"

namespace pc = panelcluster;

namespace {

struct InputFlags {
  std::string path;
  std::string schema;  // "unit,time,y,x1,..."; empty: first three header columns
  bool intercept = false;
  std::string delimiter = ",";
};

void add_input_flags(CLI::App* cmd, InputFlags& flags) {
  cmd->add_option("--input", flags.path, "panel file (delimited text with header)")->required();
  cmd->add_option("--schema", flags.schema,
                  "column names as unit,time,y,x1[,x2...]; default: first header columns");
  cmd->add_flag("--intercept", flags.intercept, "prepend a constant-1 covariate");
  cmd->add_option("--delimiter", flags.delimiter, "field delimiter (',' or 'tab')")
      ->check(CLI::IsMember({",", "tab"}));
}

char delimiter_of(const InputFlags& flags) { return flags.delimiter == "tab" ? '\t' : ','; }

pc::DataSchema schema_of(const InputFlags& flags) {
  pc::DataSchema schema;
  schema.intercept = flags.intercept;
  if (flags.schema.empty()) {
    std::ifstream file(flags.path);
    if (!file) throw pc::Error(pc::ErrorCode::IoError, "cannot open '" + flags.path + "'");
    std::string header;
    std::getline(file, header);
    std::vector<std::string> names;
    std::string field;
    std::istringstream stream(header);
    while (std::getline(stream, field, delimiter_of(flags))) names.push_back(field);
    if (names.size() < 3 + (flags.intercept ? 0u : 1u)) {
      throw pc::Error(pc::ErrorCode::SchemaMismatch,
                      "header needs unit, time, outcome and at least one covariate column");
    }
    schema.unit_column = names[0];
    schema.time_column = names[1];
    schema.outcome_column = names[2];
    schema.covariate_columns.assign(names.begin() + 3, names.end());
  } else {
    std::vector<std::string> names;
    std::string field;
    std::istringstream stream(flags.schema);
    while (std::getline(stream, field, ',')) names.push_back(field);
    if (names.size() < 3 + (flags.intercept ? 0u : 1u)) {
      throw pc::Error(pc::ErrorCode::SchemaMismatch,
                      "--schema needs unit,time,y and at least one covariate unless --intercept");
    }
    schema.unit_column = names[0];
    schema.time_column = names[1];
    schema.outcome_column = names[2];
    schema.covariate_columns.assign(names.begin() + 3, names.end());
  }
  return schema;
}

// Resolve (L, eta): explicit values or cross-validation for "auto".
struct Resolved {
  int bandwidth;
  double eta_tilde;
  bool tuned;
};

Resolved resolve_tuning(const pc::PanelData& panel, const std::string& bandwidth,
                        const std::string& eta) {
  Resolved out{0, 0.0, false};
  const bool auto_bandwidth = bandwidth == "auto";
  const bool auto_eta = eta == "auto";
  if (auto_bandwidth || auto_eta) {
    const pc::CvResult cv =
        pc::cross_validate(panel, pc::TuningGrid::defaults_for(panel.n_periods()));
    out.bandwidth = cv.best_bandwidth;
    out.eta_tilde = cv.best_threshold;
    out.tuned = true;
  }
  if (!auto_bandwidth) out.bandwidth = std::stoi(bandwidth);
  if (!auto_eta) out.eta_tilde = std::stod(eta);
  return out;
}

void log_config(const std::string& line) { std::cerr << "config: " << line << '\n'; }

std::string eta_check(const std::string& value) {
  if (value == "auto") return {};
  try {
    const double v = std::stod(value);
    if (v < 0.0 || v > 1.0) return "eta must lie in [0, 1] or be 'auto'";
  } catch (...) {
    return "eta must be a number in [0, 1] or 'auto'";
  }
  return {};
}

std::string bandwidth_check(const std::string& value) {
  if (value == "auto") return {};
  try {
    if (std::stoi(value) < 0) return "bandwidth must be a nonnegative integer or 'auto'";
  } catch (...) {
    return "bandwidth must be a nonnegative integer or 'auto'";
  }
  return {};
}

std::vector<pc::Method> parse_methods(const std::vector<std::string>& tokens, bool& recovery) {
  std::vector<pc::Method> methods;
  auto push = [&](pc::Method m) {
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
  };
  for (const auto& token : tokens) {
    if (token == "art") {
      push(pc::Method::ArtOracle);
      push(pc::Method::ArtDiscovered);
    } else if (token == "cce") {
      push(pc::Method::CceOracle);
      push(pc::Method::CceDiscovered);
    } else if (token == "art_oracle") {
      push(pc::Method::ArtOracle);
    } else if (token == "art_discovered") {
      push(pc::Method::ArtDiscovered);
    } else if (token == "cce_oracle") {
      push(pc::Method::CceOracle);
    } else if (token == "cce_discovered") {
      push(pc::Method::CceDiscovered);
    } else if (token == "bcl") {
      push(pc::Method::Bcl);
    } else if (token == "recovery") {
      recovery = true;
    } else {
      throw CLI::ValidationError("--methods", "unknown method '" + token + "'");
    }
  }
  return methods;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream file(path);
  if (!file) throw pc::Error(pc::ErrorCode::IoError, "cannot write '" + path + "'");
  file << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster discovery and inference for balanced panels"};
  app.require_subcommand(1);

  // ---- discover ----
  InputFlags discover_input;
  std::string discover_bandwidth = "auto", discover_eta = "auto", discover_out, discover_dump;
  bool discover_raw = false;
  auto* discover = app.add_subcommand("discover", "estimate clusters by thresholding");
  add_input_flags(discover, discover_input);
  discover->add_option("--bandwidth", discover_bandwidth, "kernel lags L or 'auto'")
      ->check(CLI::Validator(bandwidth_check, "BANDWIDTH"));
  discover->add_option("--eta", discover_eta, "threshold in [0,1] or 'auto'")
      ->check(CLI::Validator(eta_check, "ETA"));
  discover->add_option("--out", discover_out, "cluster assignment file (default stdout)");
  discover->add_option("--dump-matrix", discover_dump, "write the correlation matrix here");
  discover->add_flag("--raw-sigma", discover_raw, "threshold raw magnitudes, not correlations");

  // ---- tune ----
  InputFlags tune_input;
  std::string tune_out;
  auto* tune = app.add_subcommand("tune", "cross-validate (L, eta)");
  add_input_flags(tune, tune_input);
  tune->add_option("--out", tune_out, "objective surface file (default stdout)");

  // ---- infer ----
  InputFlags infer_input;
  std::string infer_method, infer_bandwidth = "auto", infer_eta = "auto", infer_clusters;
  std::vector<double> infer_r;
  double infer_lambda = 0.0, infer_alpha = 0.10, infer_bcl_const = 2.0;
  bool infer_deterministic = false, infer_unscaled = false;
  int infer_orbit = 9999;
  std::uint64_t infer_seed = 0;
  std::string infer_variant = "sandwich";
  auto* infer = app.add_subcommand("infer", "test a linear restriction r'beta = lambda");
  add_input_flags(infer, infer_input);
  infer->add_option("--method", infer_method, "art, cce or bcl")
      ->required()
      ->check(CLI::IsMember({"art", "cce", "bcl"}));
  infer->add_option("--r", infer_r, "restriction coefficients, comma separated")
      ->required()
      ->delimiter(',');
  infer->add_option("--lambda", infer_lambda, "restriction value");
  infer->add_option("--alpha", infer_alpha, "nominal level")->check(CLI::Range(1e-6, 1.0 - 1e-6));
  infer->add_option("--bandwidth", infer_bandwidth, "kernel lags L or 'auto'")
      ->check(CLI::Validator(bandwidth_check, "BANDWIDTH"));
  infer->add_option("--eta", infer_eta, "threshold in [0,1] or 'auto'")
      ->check(CLI::Validator(eta_check, "ETA"));
  infer->add_option("--clusters", infer_clusters,
                    "two-column unit_id,cluster file; skips discovery");
  infer->add_flag("--deterministic", infer_deterministic, "conservative ART variant");
  infer->add_flag("--unscaled", infer_unscaled, "drop the sqrt(n_j) statistic scaling");
  infer->add_option("--orbit", infer_orbit, "sampled-orbit size B")->check(CLI::Range(2, 1 << 24));
  infer->add_option("--seed", infer_seed, "seed for the sampled orbit");
  infer->add_option("--variant", infer_variant, "cce variant")
      ->check(CLI::IsMember({"sandwich", "paper"}));
  infer->add_option("--bcl-const", infer_bcl_const, "bcl threshold constant");

  // ---- simulate ----
  int sim_q = 5, sim_n = 50, sim_t = 100, sim_reps = 1000, sim_workers = 1, sim_orbit = 9999;
  int sim_bcl_bandwidth = 0;
  double sim_alpha = 0.10, sim_beta0 = 1.0, sim_rho = 0.2, sim_phi = 0.2, sim_beta = 1.0;
  double sim_bcl_const = 1.0;
  std::uint64_t sim_seed = 0;
  std::vector<std::string> sim_methods{"art", "cce", "bcl"};
  std::string sim_tuning = "cv", sim_bandwidth = "1", sim_eta = "0.5", sim_out;
  bool sim_randomized = false;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo harness");
  simulate->add_option("--q", sim_q, "true cluster count")->check(CLI::PositiveNumber);
  simulate->add_option("--n", sim_n, "units")->check(CLI::PositiveNumber);
  simulate->add_option("--t", sim_t, "periods")->check(CLI::Range(2, 1 << 20));
  simulate->add_option("--reps", sim_reps, "replications")->check(CLI::PositiveNumber);
  simulate->add_option("--alpha", sim_alpha, "nominal level")->check(CLI::Range(1e-6, 1.0 - 1e-6));
  simulate->add_option("--beta0", sim_beta0, "null value of beta");
  simulate->add_option("--rho", sim_rho, "unit AR coefficient")->check(CLI::Range(-0.999, 0.999));
  simulate->add_option("--phi", sim_phi, "cluster AR coefficient")
      ->check(CLI::Range(-0.999, 0.999));
  simulate->add_option("--beta", sim_beta, "true beta");
  simulate->add_option("--methods", sim_methods,
                       "any of art, cce, art_oracle, art_discovered, cce_oracle, "
                       "cce_discovered, bcl, recovery")
      ->delimiter(',');
  simulate->add_option("--tuning", sim_tuning, "cv or fixed")
      ->check(CLI::IsMember({"cv", "fixed"}));
  simulate->add_option("--bandwidth", sim_bandwidth, "L for --tuning fixed")
      ->check(CLI::Validator(bandwidth_check, "BANDWIDTH"));
  simulate->add_option("--eta", sim_eta, "eta for --tuning fixed")
      ->check(CLI::Validator(eta_check, "ETA"));
  simulate->add_option("--seed", sim_seed, "master seed");
  simulate->add_option("--workers", sim_workers, "worker threads")->check(CLI::Range(1, 256));
  simulate->add_option("--orbit", sim_orbit, "sampled-orbit size")->check(CLI::Range(2, 1 << 24));
  simulate->add_option("--bcl-const", sim_bcl_const, "bcl threshold constant");
  simulate->add_option("--bcl-bandwidth", sim_bcl_bandwidth,
                       "bcl kernel lags (0: floor(T/4))");
  simulate->add_flag("--randomized", sim_randomized, "realize randomized ART decisions");
  simulate->add_option("--out", sim_out, "output table (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (*discover) {
      const auto schema = schema_of(discover_input);
      const auto panel =
          pc::load_panel(discover_input.path, schema, delimiter_of(discover_input));
      const auto resolved = resolve_tuning(panel, discover_bandwidth, discover_eta);
      std::ostringstream cfg;
      cfg << "subcommand=discover input=" << discover_input.path
          << " bandwidth=" << resolved.bandwidth << " eta=" << resolved.eta_tilde
          << " tuned=" << (resolved.tuned ? 1 : 0) << " raw_sigma=" << (discover_raw ? 1 : 0);
      log_config(cfg.str());

      const auto [clusters, matrix] = pc::discover_clusters(
          panel, pc::KernelSpec{pc::KernelKind::Bartlett, resolved.bandwidth},
          pc::ThresholdConfig{resolved.eta_tilde, discover_raw
                                                      ? pc::ThresholdTarget::RawSigma
                                                      : pc::ThresholdTarget::Correlation});
      std::ostringstream body;
      pc::write_clusters(body, clusters, panel.unit_ids());
      write_output(discover_out, body.str());
      if (!discover_dump.empty()) {
        std::ofstream dump(discover_dump);
        if (!dump) throw pc::Error(pc::ErrorCode::IoError, "cannot write '" + discover_dump + "'");
        pc::write_matrix(dump, matrix.corr);
      }
      std::cout << pc::cluster_summary(clusters) << '\n';
      return 0;
    }

    if (*tune) {
      const auto schema = schema_of(tune_input);
      const auto panel = pc::load_panel(tune_input.path, schema, delimiter_of(tune_input));
      const auto grid = pc::TuningGrid::defaults_for(panel.n_periods());
      std::ostringstream cfg;
      cfg << "subcommand=tune input=" << tune_input.path
          << " bandwidths=" << grid.bandwidths.size() << " thresholds=" << grid.thresholds.size();
      log_config(cfg.str());
      const auto cv = pc::cross_validate(panel, grid);
      std::ostringstream body;
      body << "bandwidth,eta_tilde,score\n";
      char buffer[64];
      for (const auto& point : cv.objective_surface) {
        std::snprintf(buffer, sizeof(buffer), "%d,%.6g,%.17g\n", point.bandwidth,
                      point.eta_tilde, point.score);
        body << buffer;
      }
      write_output(tune_out, body.str());
      std::cout << "best_bandwidth=" << cv.best_bandwidth
                << " best_eta=" << cv.best_threshold << '\n';
      return 0;
    }

    if (*infer) {
      const auto schema = schema_of(infer_input);
      const auto panel = pc::load_panel(infer_input.path, schema, delimiter_of(infer_input));
      pc::LinearRestriction restriction;
      restriction.r = Eigen::Map<Eigen::VectorXd>(infer_r.data(),
                                                  static_cast<Eigen::Index>(infer_r.size()));
      restriction.lambda = infer_lambda;

      pc::ClusterAssignment clusters;
      int used_bandwidth = 0;
      double used_eta = 0.0;
      if (infer_method != "bcl") {
        if (!infer_clusters.empty()) {
          // Supplied clusters: unit_id,label with header, matching panel ids.
          std::ifstream file(infer_clusters);
          if (!file) {
            throw pc::Error(pc::ErrorCode::IoError, "cannot open '" + infer_clusters + "'");
          }
          std::string line;
          std::getline(file, line);  // header
          std::vector<int> labels(static_cast<std::size_t>(panel.n_units()), 0);
          std::size_t assigned = 0;
          while (std::getline(file, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) {
              throw pc::Error(pc::ErrorCode::SchemaMismatch, "bad cluster file line: " + line);
            }
            const std::string id = line.substr(0, comma);
            const int label = std::stoi(line.substr(comma + 1));
            const auto& ids = panel.unit_ids();
            const auto it = std::find(ids.begin(), ids.end(), id);
            if (it == ids.end()) {
              throw pc::Error(pc::ErrorCode::SchemaMismatch, "unknown unit id '" + id + "'");
            }
            labels[static_cast<std::size_t>(it - ids.begin())] = label;
            ++assigned;
          }
          if (assigned != labels.size()) {
            throw pc::Error(pc::ErrorCode::LengthMismatch,
                            "cluster file does not cover every unit");
          }
          clusters = pc::ClusterAssignment::from_labels(labels);
        } else {
          const auto resolved = resolve_tuning(panel, infer_bandwidth, infer_eta);
          used_bandwidth = resolved.bandwidth;
          used_eta = resolved.eta_tilde;
          clusters = pc::discover_clusters(
                         panel, pc::KernelSpec{pc::KernelKind::Bartlett, resolved.bandwidth},
                         pc::ThresholdConfig{resolved.eta_tilde})
                         .first;
        }
      } else if (infer_bandwidth == "auto") {
        const auto resolved = resolve_tuning(panel, infer_bandwidth, "0");
        used_bandwidth = resolved.bandwidth;
      } else {
        used_bandwidth = std::stoi(infer_bandwidth);
      }

      std::ostringstream cfg;
      cfg << "subcommand=infer method=" << infer_method << " input=" << infer_input.path
          << " lambda=" << infer_lambda << " alpha=" << infer_alpha
          << " bandwidth=" << used_bandwidth << " eta=" << used_eta << " seed=" << infer_seed
          << " deterministic=" << (infer_deterministic ? 1 : 0);
      log_config(cfg.str());

      pc::TestResult result;
      if (infer_method == "art") {
        pc::ArtOptions options;
        options.deterministic = infer_deterministic;
        options.draws = infer_orbit;
        options.seed = infer_seed;
        options.scaling = infer_unscaled ? pc::Scaling::Unscaled : pc::Scaling::SqrtN;
        result = pc::art_test(panel, clusters, restriction, infer_alpha, options);
      } else if (infer_method == "cce") {
        result = pc::cce_t_test(panel, clusters, restriction, infer_alpha,
                                infer_variant == "paper" ? pc::CceVariant::PaperMeat
                                                         : pc::CceVariant::Sandwich);
      } else {
        pc::BclThresholdRule rule;
        rule.constant = infer_bcl_const;
        result = pc::bcl_test(panel, restriction, infer_alpha,
                              pc::KernelSpec{pc::KernelKind::Bartlett, used_bandwidth}, rule);
      }
      std::cout << "method=" << result.method << " statistic=" << result.statistic
                << " p_value=" << result.p_value << " phi=" << result.phi
                << " q_hat=" << (infer_method == "bcl" ? 0 : clusters.q_hat)
                << " orbit_size=" << result.orbit_size << '\n';
      return 0;
    }

    if (*simulate) {
      bool recovery_only_token = false;
      const auto methods = parse_methods(sim_methods, recovery_only_token);
      pc::ExperimentConfig config;
      config.dgp.q = sim_q;
      config.dgp.n_units = sim_n;
      config.dgp.n_periods = sim_t;
      config.dgp.rho = sim_rho;
      config.dgp.phi = sim_phi;
      config.dgp.beta = sim_beta;
      config.dgp.seed = sim_seed;
      config.replications = sim_reps;
      config.alpha = sim_alpha;
      config.beta_null = sim_beta0;
      config.methods = methods;
      config.workers = sim_workers;
      config.randomized_phi = sim_randomized;
      config.orbit_draws = sim_orbit;
      config.track_recovery = recovery_only_token;
      config.bcl_constant = sim_bcl_const;
      config.bcl_bandwidth = sim_bcl_bandwidth;
      if (sim_tuning == "fixed") {
        config.tuning.mode = pc::TuningChoice::Mode::Fixed;
        config.tuning.bandwidth = std::stoi(sim_bandwidth);
        config.tuning.eta_tilde = std::stod(sim_eta);
      }

      std::ostringstream cfg;
      cfg << "subcommand=simulate q=" << sim_q << " n=" << sim_n << " t=" << sim_t
          << " reps=" << sim_reps << " alpha=" << sim_alpha << " beta0=" << sim_beta0
          << " tuning=" << sim_tuning << " bandwidth=" << sim_bandwidth << " eta=" << sim_eta
          << " seed=" << sim_seed << " workers=" << sim_workers
          << " randomized=" << (sim_randomized ? 1 : 0) << " orbit=" << sim_orbit
          << " bcl_const=" << sim_bcl_const << " bcl_bandwidth=" << sim_bcl_bandwidth;
      log_config(cfg.str());

      pc::SimulationSummary summary;
      if (methods.empty()) {
        if (!recovery_only_token) {
          throw CLI::ValidationError("--methods", "no methods requested");
        }
        summary = pc::run_recovery(config);
      } else {
        summary = pc::run_size_power(config);
      }
      write_output(sim_out, pc::format_table(config, summary));
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const pc::Error& e) {
    std::cerr << "error [" << pc::error_code_name(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
