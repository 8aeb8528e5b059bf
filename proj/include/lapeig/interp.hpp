#pragma once

#include "lapeig/kernels.hpp"
#include "lapeig/manifolds.hpp"
#include "lapeig/quadrature.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

namespace lapeig {

using ChartFn = std::function<double(std::span<const double>)>;

/// (f(x_1), ..., f(x_n)) evaluated on the chart coordinates of the cloud.
Eigen::VectorXd restrict_function(const ChartFn& f, const PointCloud& cloud);

/// Cloud, kernel and scale for the interpolation operator; distances are
/// intrinsic.
struct InterpolationContext {
  const PointCloud* cloud = nullptr;
  KernelProfile kernel = KernelProfile::indicator();
  double eps = 0.0;

  InterpolationContext(const PointCloud& c, KernelProfile k, double e);
};

/// theta_eps(x) = (1/n) sum_i psi(d(x, x_i) / eps).
double theta_eps(const InterpolationContext& ctx, std::span<const double> x);

/// (Lambda_eps u)(x) = sum_i psi(d(x, x_i)/eps) u_i / (n theta_eps(x)).
/// Throws UndefinedAtPoint where theta_eps(x) = 0.
double lambda_eps_eval(const InterpolationContext& ctx, const Eigen::VectorXd& u, std::span<const double> x);

enum class TransportRule {
  NearestSample,     // every node goes to its nearest sample (ties: lowest index)
  QuantileCoupling,  // 1-D only: monotone rearrangement of nodes onto sorted samples
};

struct TransportReport {
  std::vector<std::size_t> assignment;  // node -> sample index
  std::vector<double> masses;           // per-sample transported mass
  double max_distance = 0.0;            // largest node-to-sample distance
  double max_relative_deviation = 0.0;  // max_i |1/n - m_i| / m_i
  std::size_t nodes = 0;
};

/// Discretizes rho dVol_g on a uniform chart grid with `quad_points` nodes
/// (per axis sqrt(quad_points) for 2-D charts) and moves each node's mass onto
/// a sample. CoverageGap when a node has no sample within eps_tilde.
TransportReport transport_map(const ManifoldModel& model, const PointCloud& cloud, double eps_tilde,
                              std::size_t quad_points, TransportRule rule = TransportRule::NearestSample);

struct EnergyIntegrals {
  double energy = 0.0;     // int |f'|^2 rho^2 ds
  double mass_rho = 0.0;   // int f^2 rho ds
  double mass_rho2 = 0.0;  // int f^2 rho^2 ds
};

/// One-dimensional Dirichlet energy by central differences along arc length
/// on a uniform periodic grid; f takes the model's chart angle. Circle and
/// square boundary only (UnsupportedDimension otherwise).
EnergyIntegrals dirichlet_energy_1d(const ManifoldModel& model, const ScalarFn& f, std::size_t quad_points);

}  // namespace lapeig
