#pragma once

#include "lapeig/kernels.hpp"
#include "lapeig/manifolds.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <vector>

namespace lapeig {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class MetricKind { Ambient, Intrinsic };

struct GraphEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Weighted eps-neighbourhood graph: K_ij = eta(dist(x_i, x_j) / eps) with the
/// diagonal K_ii = eta(0) kept, D = diag(row sums of K), L = D - K.
class NeighborhoodGraph {
 public:
  NeighborhoodGraph(SparseMatrix kernel_matrix, double eps, KernelProfile kernel, int intrinsic_dim,
                    MetricKind metric = MetricKind::Ambient);

  std::size_t size() const noexcept { return static_cast<std::size_t>(k_.rows()); }
  double eps() const noexcept { return eps_; }
  const KernelProfile& kernel() const noexcept { return kernel_; }
  int intrinsic_dim() const noexcept { return m_; }
  MetricKind metric() const noexcept { return metric_; }

  const SparseMatrix& kernel_matrix() const noexcept { return k_; }
  const Eigen::VectorXd& degrees() const noexcept { return degrees_; }
  SparseMatrix laplacian() const;
  /// Nonzero entries sorted by (row, col).
  std::vector<GraphEntry> entries() const;

 private:
  SparseMatrix k_;
  Eigen::VectorXd degrees_;
  double eps_;
  KernelProfile kernel_;
  int m_;
  MetricKind metric_;
};

/// Neighbour search on a uniform grid of cell size eps in the ambient space;
/// all pairs are compared directly when n <= 512. With the intrinsic metric the
/// ambient candidates are filtered by d_M, which is never below the chord.
NeighborhoodGraph build_graph(const PointCloud& cloud, const KernelProfile& kernel, double eps,
                              MetricKind metric = MetricKind::Ambient);

/// Same construction from raw ambient points (rows), ambient metric only.
NeighborhoodGraph build_graph(const RowMatrix& points, const KernelProfile& kernel, double eps, int intrinsic_dim);

/// Dense all-pairs reference construction.
NeighborhoodGraph build_graph_bruteforce(const RowMatrix& points, const KernelProfile& kernel, double eps,
                                         int intrinsic_dim);

/// (1/2) sum_ij K_ij (u_i - u_j)^2.
double quadratic_form(const NeighborhoodGraph& graph, const Eigen::VectorXd& u);

/// c (log n / n)^{1/(m+2)}; n >= 3.
double epsilon_schedule(double n, int m, double scale_c = 1.0);

struct ConnectivityReport {
  std::size_t components = 0;
  double min_degree = 0.0;  // smallest off-diagonal degree sum_{j != i} K_ij
};

ConnectivityReport connectivity_report(const NeighborhoodGraph& graph);

}  // namespace lapeig
