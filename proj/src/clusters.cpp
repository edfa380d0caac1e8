#include "panelcluster/clusters.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include "panelcluster/errors.hpp"

namespace panelcluster {

ClusterAssignment ClusterAssignment::from_labels(const std::vector<int>& raw) {
  ClusterAssignment out;
  out.labels.resize(raw.size());
  std::vector<std::pair<int, int>> renumber;  // (raw label, canonical label)
  for (std::size_t i = 0; i < raw.size(); ++i) {
    int canonical = 0;
    for (const auto& [from, to] : renumber) {
      if (from == raw[i]) {
        canonical = to;
        break;
      }
    }
    if (canonical == 0) {
      canonical = static_cast<int>(renumber.size()) + 1;
      renumber.emplace_back(raw[i], canonical);
    }
    out.labels[i] = canonical;
  }
  out.q_hat = static_cast<int>(renumber.size());
  return out;
}

std::vector<std::vector<int>> ClusterAssignment::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(q_hat));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[static_cast<std::size_t>(labels[i] - 1)].push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> ClusterAssignment::sizes() const {
  std::vector<int> out(static_cast<std::size_t>(q_hat), 0);
  for (int label : labels) ++out[static_cast<std::size_t>(label - 1)];
  return out;
}

namespace {

// Union-find with path compression; union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void merge(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

ClusterAssignment connected_components(
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (adjacency.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch, "adjacency matrix must be square");
  }
  DisjointSets sets(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (adjacency(i, j) || adjacency(j, i)) sets.merge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  std::vector<int> roots(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    roots[static_cast<std::size_t>(i)] = static_cast<int>(sets.find(static_cast<std::size_t>(i)));
  }
  return ClusterAssignment::from_labels(roots);
}

bool clusters_equivalent(const ClusterAssignment& a, const ClusterAssignment& b) {
  if (a.labels.size() != b.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "cluster assignments cover different unit counts");
  }
  // Canonical first-appearance numbering is a complete invariant of the
  // partition, so equivalence is equality of canonical labels.
  const auto ca = ClusterAssignment::from_labels(a.labels);
  const auto cb = ClusterAssignment::from_labels(b.labels);
  return ca.labels == cb.labels;
}

std::pair<double, double> purity(const ClusterAssignment& estimated,
                                 const ClusterAssignment& truth) {
  if (estimated.labels.size() != truth.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "cluster assignments cover different unit counts");
  }
  const auto groups = estimated.members();
  double min_purity = 1.0;
  double sum_purity = 0.0;
  for (const auto& group : groups) {
    std::vector<int> overlap(static_cast<std::size_t>(truth.q_hat), 0);
    for (int unit : group) ++overlap[static_cast<std::size_t>(truth.labels[static_cast<std::size_t>(unit)] - 1)];
    const int best = *std::max_element(overlap.begin(), overlap.end());
    const double value = static_cast<double>(best) / static_cast<double>(group.size());
    min_purity = std::min(min_purity, value);
    sum_purity += value;
  }
  return {min_purity, sum_purity / static_cast<double>(groups.size())};
}

void write_clusters(std::ostream& out, const ClusterAssignment& clusters,
                    const std::vector<std::string>& unit_ids, char delimiter) {
  if (unit_ids.size() != clusters.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "unit id list does not match assignment");
  }
  out << "unit_id" << delimiter << "cluster" << '\n';
  for (std::size_t i = 0; i < unit_ids.size(); ++i) {
    out << unit_ids[i] << delimiter << clusters.labels[i] << '\n';
  }
}

std::string cluster_summary(const ClusterAssignment& clusters) {
  std::ostringstream out;
  out << "q_hat=" << clusters.q_hat << " sizes=";
  const auto sizes = clusters.sizes();
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (j) out << ',';
    out << sizes[j];
  }
  return out.str();
}

}  // namespace panelcluster
