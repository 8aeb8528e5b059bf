#include "lapeig/interp.hpp"

#include "lapeig/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace lapeig {

namespace {

struct ChartGrid {
  RowMatrix nodes;
  std::vector<double> weights;
};

ChartGrid chart_grid(const ManifoldModel& model, std::size_t quad_points) {
  const auto box = model.chart_box();
  ChartGrid g;
  if (box.size() == 1) {
    const std::size_t q = quad_points;
    const double h = (box[0].second - box[0].first) / static_cast<double>(q);
    g.nodes.resize(static_cast<Eigen::Index>(q), 1);
    g.weights.resize(q);
    for (std::size_t i = 0; i < q; ++i) {
      const double t = box[0].first + (static_cast<double>(i) + 0.5) * h;
      g.nodes(static_cast<Eigen::Index>(i), 0) = t;
      std::span<const double> p(&t, 1);
      g.weights[i] = model.density_at(p) * model.volume_element(p) * h;
    }
  } else {
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(quad_points))));
    const double h0 = (box[0].second - box[0].first) / static_cast<double>(side);
    const double h1 = (box[1].second - box[1].first) / static_cast<double>(side);
    g.nodes.resize(static_cast<Eigen::Index>(side * side), 2);
    g.weights.resize(side * side);
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) {
        const std::size_t r = i * side + j;
        const double p[2] = {box[0].first + (static_cast<double>(i) + 0.5) * h0,
                             box[1].first + (static_cast<double>(j) + 0.5) * h1};
        g.nodes(static_cast<Eigen::Index>(r), 0) = p[0];
        g.nodes(static_cast<Eigen::Index>(r), 1) = p[1];
        std::span<const double> sp(p, 2);
        g.weights[r] = model.density_at(sp) * model.volume_element(sp) * h0 * h1;
      }
    }
  }
  // Normalize so the discrete measure has total mass exactly 1.
  const double total = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
  for (double& w : g.weights) w /= total;
  return g;
}

std::span<const double> row_span(const RowMatrix& m, std::size_t i) {
  return {m.data() + i * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

}  // namespace

Eigen::VectorXd restrict_function(const ChartFn& f, const PointCloud& cloud) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(cloud.size()));
  for (std::size_t i = 0; i < cloud.size(); ++i) out[static_cast<Eigen::Index>(i)] = f(cloud.param(i));
  return out;
}

InterpolationContext::InterpolationContext(const PointCloud& c, KernelProfile k, double e)
    : cloud(&c), kernel(std::move(k)), eps(e) {
  if (c.size() == 0) throw Error(ErrorCode::EmptyCloud, "interpolation needs a nonempty cloud");
  if (!(e > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
}

double theta_eps(const InterpolationContext& ctx, std::span<const double> x) {
  const PointCloud& cloud = *ctx.cloud;
  double acc = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    acc += ctx.kernel.psi(cloud.model.intrinsic_distance(x, cloud.param(i)) / ctx.eps);
  }
  return acc / static_cast<double>(cloud.size());
}

double lambda_eps_eval(const InterpolationContext& ctx, const Eigen::VectorXd& u, std::span<const double> x) {
  const PointCloud& cloud = *ctx.cloud;
  if (static_cast<std::size_t>(u.size()) != cloud.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vector length differs from the cloud size");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double w = ctx.kernel.psi(cloud.model.intrinsic_distance(x, cloud.param(i)) / ctx.eps);
    num += w * u[static_cast<Eigen::Index>(i)];
    den += w;
  }
  if (!(den > 0.0)) throw Error(ErrorCode::UndefinedAtPoint, "theta_eps vanishes at the query point");
  return num / den;
}

TransportReport transport_map(const ManifoldModel& model, const PointCloud& cloud, double eps_tilde,
                              std::size_t quad_points, TransportRule rule) {
  const std::size_t n = cloud.size();
  if (n == 0) throw Error(ErrorCode::EmptyCloud, "transport needs a nonempty cloud");
  if (quad_points < 1) throw Error(ErrorCode::GridTooSmall, "quadrature needs at least one node");
  if (rule == TransportRule::QuantileCoupling && model.intrinsic_dim() != 1) {
    throw Error(ErrorCode::UnsupportedDimension, "quantile coupling is defined for 1-D charts only");
  }
  const ChartGrid grid = chart_grid(model, quad_points);
  const std::size_t q = grid.weights.size();

  TransportReport r;
  r.nodes = q;
  r.assignment.assign(q, 0);
  r.masses.assign(n, 0.0);

  // Nearest sample per node, used for the coverage test under both rules.
  std::vector<double> nearest(q, std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < q; ++a) {
    const auto node = row_span(grid.nodes, a);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = model.intrinsic_distance(node, cloud.param(i));
      if (d < nearest[a]) {
        nearest[a] = d;
        r.assignment[a] = i;
      }
    }
    if (nearest[a] > eps_tilde) throw Error(ErrorCode::CoverageGap, "a quadrature node has no sample within eps_tilde");
  }

  if (rule == TransportRule::QuantileCoupling) {
    // Nodes are already in increasing chart order; the k-th mass quantile goes
    // to the k-th sample in chart order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cloud.params(static_cast<Eigen::Index>(a), 0) < cloud.params(static_cast<Eigen::Index>(b), 0); });
    double cumulative = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
      const double mid = cumulative + 0.5 * grid.weights[a];
      cumulative += grid.weights[a];
      const auto slot = std::min(n - 1, static_cast<std::size_t>(mid * static_cast<double>(n)));
      r.assignment[a] = order[slot];
    }
  }

  for (std::size_t a = 0; a < q; ++a) {
    const std::size_t i = r.assignment[a];
    r.masses[i] += grid.weights[a];
    r.max_distance = std::max(r.max_distance, model.intrinsic_distance(row_span(grid.nodes, a), cloud.param(i)));
  }
  const double target = 1.0 / static_cast<double>(n);
  for (double m : r.masses) {
    const double dev = m > 0.0 ? std::abs(target - m) / m : std::numeric_limits<double>::infinity();
    r.max_relative_deviation = std::max(r.max_relative_deviation, dev);
  }
  return r;
}

EnergyIntegrals dirichlet_energy_1d(const ManifoldModel& model, const ScalarFn& f, std::size_t quad_points) {
  if (model.intrinsic_dim() != 1) throw Error(ErrorCode::UnsupportedDimension, "energy quadrature is one-dimensional");
  if (quad_points < 16) throw Error(ErrorCode::GridTooSmall, "energy quadrature needs at least 16 nodes");
  const double per_radian = model.arc_length_per_radian();
  const double length = 2.0 * std::numbers::pi * per_radian;
  const std::size_t q = quad_points;
  const double h = length / static_cast<double>(q);
  std::vector<double> vals(q);
  std::vector<double> rho(q);
  for (std::size_t j = 0; j < q; ++j) {
    const double theta = static_cast<double>(j) * h / per_radian;
    vals[j] = f(theta);
    rho[j] = model.density_at(std::span<const double>(&theta, 1));
  }
  EnergyIntegrals out;
  for (std::size_t j = 0; j < q; ++j) {
    const double df = (vals[(j + 1) % q] - vals[(j + q - 1) % q]) / (2.0 * h);
    out.energy += df * df * rho[j] * rho[j] * h;
    out.mass_rho += vals[j] * vals[j] * rho[j] * h;
    out.mass_rho2 += vals[j] * vals[j] * rho[j] * rho[j] * h;
  }
  return out;
}

}  // namespace lapeig
