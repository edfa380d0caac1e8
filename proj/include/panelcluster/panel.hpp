#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "panelcluster/errors.hpp"

namespace panelcluster {

/// Column layout of a delimited panel file. The first covariate listed is
/// covariate 0; when `intercept` is set a constant-1 covariate is prepended.
struct DataSchema {
  std::string unit_column = "unit";
  std::string time_column = "time";
  std::string outcome_column = "y";
  std::vector<std::string> covariate_columns;
  bool intercept = false;
};

/// Balanced N x T panel with p covariates. Immutable once constructed; cheap
/// to share across threads.
class PanelData {
 public:
  /// Validating constructor from in-memory arrays. `y` is N x T and `x`
  /// holds one T x p covariate matrix per unit.
  static PanelData from_arrays(Eigen::MatrixXd y,
                               std::vector<Eigen::MatrixXd> x,
                               std::vector<std::string> unit_ids);

  Eigen::Index n_units() const { return y_.rows(); }
  Eigen::Index n_periods() const { return y_.cols(); }
  Eigen::Index n_covariates() const { return x_.empty() ? 0 : x_.front().cols(); }

  const Eigen::MatrixXd& outcomes() const { return y_; }
  const Eigen::MatrixXd& covariates(Eigen::Index unit) const { return x_[static_cast<std::size_t>(unit)]; }
  const std::vector<std::string>& unit_ids() const { return unit_ids_; }

 private:
  PanelData(Eigen::MatrixXd y, std::vector<Eigen::MatrixXd> x, std::vector<std::string> ids)
      : y_(std::move(y)), x_(std::move(x)), unit_ids_(std::move(ids)) {}

  Eigen::MatrixXd y_;                  // N x T
  std::vector<Eigen::MatrixXd> x_;     // per unit, T x p
  std::vector<std::string> unit_ids_;  // length N
};

/// Parse a delimited text panel (header row required). Rows are sorted into
/// the canonical (unit, time) order; time labels are densified to ranks
/// 0..T-1. Numeric-looking labels sort numerically, otherwise lexically.
PanelData load_panel(std::istream& in, const DataSchema& schema, char delimiter = ',');
PanelData load_panel(const std::string& path, const DataSchema& schema, char delimiter = ',');

/// Serialize in the same format load_panel reads (17 significant digits),
/// one observation per row. Round-trips through load_panel.
void write_panel(std::ostream& out, const PanelData& panel, const DataSchema& schema,
                 char delimiter = ',');

}  // namespace panelcluster
