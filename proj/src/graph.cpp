#include "lapeig/graph.hpp"

#include "lapeig/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace lapeig {

namespace {

constexpr std::size_t kAllPairsLimit = 512;
constexpr int kMaxGridDim = 4;

using CellKey = std::array<std::int64_t, kMaxGridDim>;

struct PairWeight {
  std::size_t i;
  std::size_t j;
  double value;
};

double ambient_distance(const RowMatrix& points, std::size_t i, std::size_t j) {
  return (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j))).norm();
}

template <class Visit>
void all_pairs(const RowMatrix& points, double eps, Visit&& visit) {
  const std::size_t n = static_cast<std::size_t>(points.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = ambient_distance(points, i, j);
      if (d <= eps) visit(i, j, d);
    }
  }
}

template <class Visit>
void grid_pairs(const RowMatrix& points, double eps, Visit&& visit) {
  const std::size_t n = static_cast<std::size_t>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (d > kMaxGridDim) {
    all_pairs(points, eps, visit);
    return;
  }
  std::vector<std::pair<CellKey, std::size_t>> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    CellKey key{};
    for (int c = 0; c < d; ++c) key[c] = static_cast<std::int64_t>(std::floor(points(static_cast<Eigen::Index>(i), c) / eps));
    cells[i] = {key, i};
  }
  std::vector<CellKey> own(n);
  for (const auto& [key, i] : cells) own[i] = key;
  std::sort(cells.begin(), cells.end());

  int offsets = 1;
  for (int c = 0; c < d; ++c) offsets *= 3;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    for (int o = 0; o < offsets; ++o) {
      CellKey key = own[i];
      int code = o;
      for (int c = 0; c < d; ++c) {
        key[c] += code % 3 - 1;
        code /= 3;
      }
      auto lo = std::lower_bound(cells.begin(), cells.end(), std::make_pair(key, std::size_t{0}));
      for (auto it = lo; it != cells.end() && it->first == key; ++it) {
        if (it->second > i) candidates.push_back(it->second);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t j : candidates) {
      const double dist = ambient_distance(points, i, j);
      if (dist <= eps) visit(i, j, dist);
    }
  }
}

NeighborhoodGraph assemble(std::size_t n, const std::vector<PairWeight>& pairs, double eps, const KernelProfile& kernel,
                           int m, MetricKind metric) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * pairs.size() + n);
  const double diag = kernel.eval(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
  }
  for (const auto& p : pairs) {
    triplets.emplace_back(static_cast<int>(p.i), static_cast<int>(p.j), p.value);
    triplets.emplace_back(static_cast<int>(p.j), static_cast<int>(p.i), p.value);
  }
  SparseMatrix k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  k.setFromTriplets(triplets.begin(), triplets.end());
  k.makeCompressed();
  return NeighborhoodGraph(std::move(k), eps, kernel, m, metric);
}

void check_inputs(std::size_t n, double eps) {
  if (n == 0) throw Error(ErrorCode::EmptyCloud, "cannot build a graph on an empty cloud");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
}

}  // namespace

NeighborhoodGraph::NeighborhoodGraph(SparseMatrix kernel_matrix, double eps, KernelProfile kernel, int intrinsic_dim,
                                     MetricKind metric)
    : k_(std::move(kernel_matrix)), eps_(eps), kernel_(std::move(kernel)), m_(intrinsic_dim), metric_(metric) {
  if (k_.rows() != k_.cols()) throw Error(ErrorCode::DimensionMismatch, "kernel matrix must be square");
  degrees_ = Eigen::VectorXd::Zero(k_.rows());
  for (Eigen::Index c = 0; c < k_.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k_, c); it; ++it) degrees_[it.row()] += it.value();
  }
}

SparseMatrix NeighborhoodGraph::laplacian() const {
  SparseMatrix l = -k_;
  for (Eigen::Index i = 0; i < l.rows(); ++i) l.coeffRef(i, i) += degrees_[i];
  l.prune(0.0);
  l.makeCompressed();
  return l;
}

std::vector<GraphEntry> NeighborhoodGraph::entries() const {
  // K is symmetric, so walking column c yields row c of K in column order.
  std::vector<GraphEntry> out;
  out.reserve(static_cast<std::size_t>(k_.nonZeros()));
  for (Eigen::Index c = 0; c < k_.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k_, c); it; ++it) {
      out.push_back({static_cast<std::size_t>(c), static_cast<std::size_t>(it.row()), it.value()});
    }
  }
  return out;
}

NeighborhoodGraph build_graph(const PointCloud& cloud, const KernelProfile& kernel, double eps, MetricKind metric) {
  const std::size_t n = cloud.size();
  check_inputs(n, eps);
  std::vector<PairWeight> pairs;
  auto visit = [&](std::size_t i, std::size_t j, double chord) {
    const double dist = metric == MetricKind::Ambient ? chord : cloud.model.intrinsic_distance(cloud.param(i), cloud.param(j));
    const double v = kernel.eval(dist / eps);
    if (v != 0.0) pairs.push_back({i, j, v});
  };
  if (n <= kAllPairsLimit) {
    all_pairs(cloud.ambient, eps, visit);
  } else {
    grid_pairs(cloud.ambient, eps, visit);
  }
  return assemble(n, pairs, eps, kernel, cloud.model.intrinsic_dim(), metric);
}

NeighborhoodGraph build_graph(const RowMatrix& points, const KernelProfile& kernel, double eps, int intrinsic_dim) {
  const std::size_t n = static_cast<std::size_t>(points.rows());
  check_inputs(n, eps);
  std::vector<PairWeight> pairs;
  auto visit = [&](std::size_t i, std::size_t j, double dist) {
    const double v = kernel.eval(dist / eps);
    if (v != 0.0) pairs.push_back({i, j, v});
  };
  if (n <= kAllPairsLimit) {
    all_pairs(points, eps, visit);
  } else {
    grid_pairs(points, eps, visit);
  }
  return assemble(n, pairs, eps, kernel, intrinsic_dim, MetricKind::Ambient);
}

NeighborhoodGraph build_graph_bruteforce(const RowMatrix& points, const KernelProfile& kernel, double eps,
                                         int intrinsic_dim) {
  const std::size_t n = static_cast<std::size_t>(points.rows());
  check_inputs(n, eps);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel.eval(ambient_distance(points, i, j) / eps);
    }
  }
  SparseMatrix k = dense.sparseView(1.0, 0.0);
  k.makeCompressed();
  return NeighborhoodGraph(std::move(k), eps, kernel, intrinsic_dim, MetricKind::Ambient);
}

double quadratic_form(const NeighborhoodGraph& graph, const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != graph.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vector length differs from the vertex count");
  }
  const SparseMatrix& k = graph.kernel_matrix();
  double acc = 0.0;
  for (Eigen::Index c = 0; c < k.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) {
      const double diff = u[it.row()] - u[c];
      acc += it.value() * diff * diff;
    }
  }
  return 0.5 * acc;
}

double epsilon_schedule(double n, int m, double scale_c) {
  if (!(n >= 2.0)) throw Error(ErrorCode::InvalidArgument, "schedule needs n >= 2");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (!(scale_c > 0.0)) throw Error(ErrorCode::InvalidArgument, "schedule constant must be positive");
  return scale_c * std::pow(std::log(n) / n, 1.0 / (m + 2));
}

ConnectivityReport connectivity_report(const NeighborhoodGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  const SparseMatrix& k = graph.kernel_matrix();
  std::vector<double> off(n, 0.0);
  std::size_t components = n;
  for (Eigen::Index c = 0; c < k.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) {
      if (it.row() == c || it.value() <= 0.0) continue;
      off[static_cast<std::size_t>(c)] += it.value();
      const std::size_t a = find(static_cast<std::size_t>(it.row()));
      const std::size_t b = find(static_cast<std::size_t>(c));
      if (a != b) {
        parent[std::max(a, b)] = std::min(a, b);
        --components;
      }
    }
  }
  ConnectivityReport r;
  r.components = components;
  r.min_degree = n == 0 ? 0.0 : *std::min_element(off.begin(), off.end());
  return r;
}

}  // namespace lapeig
