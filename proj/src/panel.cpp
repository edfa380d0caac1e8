#include "panelcluster/panel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace panelcluster {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DuplicateObservation: return "DuplicateObservation";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ClusterRankDeficient: return "ClusterRankDeficient";
    case ErrorCode::BandwidthTooLarge: return "BandwidthTooLarge";
    case ErrorCode::DegenerateDiagonal: return "DegenerateDiagonal";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewPeriods: return "TooFewPeriods";
    case ErrorCode::BandwidthTooLargeForBlock: return "BandwidthTooLargeForBlock";
    case ErrorCode::OrbitTooLarge: return "OrbitTooLarge";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delimiter)) fields.push_back(field);
  if (!line.empty() && line.back() == delimiter) fields.emplace_back();
  return fields;
}

std::string strip(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = strip(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Labels sort numerically when every label parses as a number, otherwise
// lexically. Either way the order is canonical: it depends only on the set
// of labels, not on row order.
std::vector<std::string> sorted_labels(const std::vector<std::string>& labels) {
  std::vector<std::string> out = labels;
  bool all_numeric = true;
  std::vector<double> values(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!parse_double(out[i], values[i])) {
      all_numeric = false;
      break;
    }
  }
  if (all_numeric) {
    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[a] != values[b]) return values[a] < values[b];
      return out[a] < out[b];
    });
    std::vector<std::string> sorted;
    sorted.reserve(out.size());
    for (auto idx : order) sorted.push_back(out[idx]);
    return sorted;
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_finite(double value, const std::string& what) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteValue, "non-finite value in " + what);
  }
}

std::string format_value(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

PanelData PanelData::from_arrays(Eigen::MatrixXd y, std::vector<Eigen::MatrixXd> x,
                                 std::vector<std::string> unit_ids) {
  const Eigen::Index n = y.rows();
  const Eigen::Index t = y.cols();
  if (n < 1 || t < 2) {
    throw Error(ErrorCode::ShapeMismatch,
                "panel requires N >= 1 and T >= 2, got N=" + std::to_string(n) +
                    " T=" + std::to_string(t));
  }
  if (static_cast<Eigen::Index>(x.size()) != n) {
    throw Error(ErrorCode::ShapeMismatch, "covariate array has " + std::to_string(x.size()) +
                                              " units, outcomes have " + std::to_string(n));
  }
  const Eigen::Index p = x.front().cols();
  if (p < 1) throw Error(ErrorCode::ShapeMismatch, "panel requires p >= 1");
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& xi = x[static_cast<std::size_t>(i)];
    if (xi.rows() != t || xi.cols() != p) {
      throw Error(ErrorCode::ShapeMismatch,
                  "covariates of unit " + std::to_string(i) + " are " + std::to_string(xi.rows()) +
                      "x" + std::to_string(xi.cols()) + ", expected " + std::to_string(t) + "x" +
                      std::to_string(p));
    }
    if (!xi.allFinite()) {
      throw Error(ErrorCode::NonFiniteValue, "non-finite covariate for unit " + std::to_string(i));
    }
  }
  if (!y.allFinite()) throw Error(ErrorCode::NonFiniteValue, "non-finite outcome value");
  if (static_cast<Eigen::Index>(unit_ids.size()) != n) {
    throw Error(ErrorCode::ShapeMismatch, "unit_ids length mismatch");
  }
  {
    std::vector<std::string> ids = unit_ids;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw Error(ErrorCode::DuplicateObservation, "duplicate unit id");
    }
  }
  return PanelData(std::move(y), std::move(x), std::move(unit_ids));
}

PanelData load_panel(std::istream& in, const DataSchema& schema, char delimiter) {
  if (schema.covariate_columns.empty() && !schema.intercept) {
    throw Error(ErrorCode::SchemaMismatch, "schema has no covariates and no intercept");
  }

  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw Error(ErrorCode::SchemaMismatch, "empty input: missing header row");
  }
  const auto header = split_line(header_line, delimiter);
  std::unordered_map<std::string, std::size_t> column_index;
  for (std::size_t c = 0; c < header.size(); ++c) column_index[strip(header[c])] = c;

  auto require_column = [&](const std::string& name) -> std::size_t {
    auto it = column_index.find(name);
    if (it == column_index.end()) {
      throw Error(ErrorCode::SchemaMismatch, "column '" + name + "' not found in header");
    }
    return it->second;
  };

  const std::size_t unit_col = require_column(schema.unit_column);
  const std::size_t time_col = require_column(schema.time_column);
  const std::size_t outcome_col = require_column(schema.outcome_column);
  std::vector<std::size_t> covariate_cols;
  covariate_cols.reserve(schema.covariate_columns.size());
  for (const auto& name : schema.covariate_columns) covariate_cols.push_back(require_column(name));

  struct Row {
    std::string unit, time;
    double y;
    std::vector<double> x;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (strip(line).empty()) continue;
    const auto fields = split_line(line, delimiter);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::SchemaMismatch,
                  "line " + std::to_string(line_number) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    Row row;
    row.unit = strip(fields[unit_col]);
    row.time = strip(fields[time_col]);
    if (!parse_double(fields[outcome_col], row.y)) {
      throw Error(ErrorCode::NonFiniteValue,
                  "unparsable outcome at line " + std::to_string(line_number));
    }
    check_finite(row.y, "outcome at line " + std::to_string(line_number));
    row.x.reserve(covariate_cols.size());
    for (auto c : covariate_cols) {
      double v;
      if (!parse_double(fields[c], v)) {
        throw Error(ErrorCode::NonFiniteValue,
                    "unparsable covariate at line " + std::to_string(line_number));
      }
      check_finite(v, "covariate at line " + std::to_string(line_number));
      row.x.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::SchemaMismatch, "no observations in input");

  // Canonical unit and time orders.
  std::vector<std::string> unit_labels, time_labels;
  {
    std::vector<std::string> units, times;
    for (const auto& row : rows) {
      units.push_back(row.unit);
      times.push_back(row.time);
    }
    std::sort(units.begin(), units.end());
    units.erase(std::unique(units.begin(), units.end()), units.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    unit_labels = sorted_labels(units);
    time_labels = sorted_labels(times);
  }
  std::unordered_map<std::string, Eigen::Index> unit_of, time_of;
  for (std::size_t i = 0; i < unit_labels.size(); ++i) unit_of[unit_labels[i]] = static_cast<Eigen::Index>(i);
  for (std::size_t t = 0; t < time_labels.size(); ++t) time_of[time_labels[t]] = static_cast<Eigen::Index>(t);

  const Eigen::Index n = static_cast<Eigen::Index>(unit_labels.size());
  const Eigen::Index t_len = static_cast<Eigen::Index>(time_labels.size());
  const Eigen::Index p_file = static_cast<Eigen::Index>(covariate_cols.size());
  const Eigen::Index p = p_file + (schema.intercept ? 1 : 0);

  Eigen::MatrixXd y(n, t_len);
  std::vector<Eigen::MatrixXd> x(static_cast<std::size_t>(n), Eigen::MatrixXd(t_len, p));
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen(n, t_len);
  seen.setConstant(false);

  for (const auto& row : rows) {
    const Eigen::Index i = unit_of.at(row.unit);
    const Eigen::Index t = time_of.at(row.time);
    if (seen(i, t)) {
      throw Error(ErrorCode::DuplicateObservation,
                  "duplicate observation for unit '" + row.unit + "' at time '" + row.time + "'");
    }
    seen(i, t) = true;
    y(i, t) = row.y;
    auto& xi = x[static_cast<std::size_t>(i)];
    Eigen::Index col = 0;
    if (schema.intercept) xi(t, col++) = 1.0;
    for (Eigen::Index a = 0; a < p_file; ++a) xi(t, col++) = row.x[static_cast<std::size_t>(a)];
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < t_len; ++t) {
      if (!seen(i, t)) {
        throw Error(ErrorCode::MissingCell, "unit '" + unit_labels[static_cast<std::size_t>(i)] +
                                                "' is missing time '" +
                                                time_labels[static_cast<std::size_t>(t)] +
                                                "': panel must be balanced");
      }
    }
  }

  return PanelData::from_arrays(std::move(y), std::move(x), std::move(unit_labels));
}

PanelData load_panel(const std::string& path, const DataSchema& schema, char delimiter) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return load_panel(file, schema, delimiter);
}

void write_panel(std::ostream& out, const PanelData& panel, const DataSchema& schema,
                 char delimiter) {
  // An intercept synthesized at load time is not written back out.
  const Eigen::Index skip = schema.intercept ? 1 : 0;
  const Eigen::Index p_file = panel.n_covariates() - skip;
  if (static_cast<Eigen::Index>(schema.covariate_columns.size()) != p_file) {
    throw Error(ErrorCode::SchemaMismatch, "schema covariate count does not match panel");
  }
  out << schema.unit_column << delimiter << schema.time_column << delimiter
      << schema.outcome_column;
  for (const auto& name : schema.covariate_columns) out << delimiter << name;
  out << '\n';
  for (Eigen::Index i = 0; i < panel.n_units(); ++i) {
    for (Eigen::Index t = 0; t < panel.n_periods(); ++t) {
      out << panel.unit_ids()[static_cast<std::size_t>(i)] << delimiter << t << delimiter
          << format_value(panel.outcomes()(i, t));
      for (Eigen::Index a = skip; a < panel.n_covariates(); ++a) {
        out << delimiter << format_value(panel.covariates(i)(t, a));
      }
      out << '\n';
    }
  }
}

}  // namespace panelcluster
