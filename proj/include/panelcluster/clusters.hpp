#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace panelcluster {

class PanelData;

/// Surjective map unit -> cluster label in 1..q_hat, stored in canonical form:
/// labels are numbered by order of first appearance.
struct ClusterAssignment {
  std::vector<int> labels;  // length N, values in 1..q_hat
  int q_hat = 0;

  Eigen::Index n_units() const { return static_cast<Eigen::Index>(labels.size()); }

  /// Canonicalize an arbitrary labeling (any label values) into the
  /// first-appearance numbering.
  static ClusterAssignment from_labels(const std::vector<int>& raw);

  /// Unit indices per cluster, indexed by label-1.
  std::vector<std::vector<int>> members() const;

  /// Cluster sizes (unit counts), indexed by label-1.
  std::vector<int> sizes() const;
};

/// Components of an undirected graph given as a symmetric boolean adjacency
/// matrix; two units share a label iff a path connects them.
ClusterAssignment connected_components(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& adjacency);

/// Partition equality up to relabeling.
bool clusters_equivalent(const ClusterAssignment& a, const ClusterAssignment& b);

/// (min purity, average purity) of `estimated` against `truth`: per estimated
/// cluster, the largest fraction of members drawn from one true cluster.
std::pair<double, double> purity(const ClusterAssignment& estimated, const ClusterAssignment& truth);

/// Two-column text serialization (unit_id, cluster_label).
void write_clusters(std::ostream& out, const ClusterAssignment& clusters,
                    const std::vector<std::string>& unit_ids, char delimiter = ',');

/// One-line summary "q_hat=. sizes=a,b,c" for CLI output.
std::string cluster_summary(const ClusterAssignment& clusters);

}  // namespace panelcluster
