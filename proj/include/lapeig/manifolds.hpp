#pragma once

#include "lapeig/dyadic.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lapeig {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ManifoldKind { UnitCircle, CliffordTorus, Sphere2, SquareBoundary, SingularSurface };

enum class DensityForm { Constant, CircleCosine };

/// Sampling density relative to the Riemannian volume. `CircleCosine` is
/// rho(theta) = (1 + beta cos theta) / (2 pi) and exists only on the unit circle.
struct DensitySpec {
  DensityForm form = DensityForm::Constant;
  double beta = 0.0;

  static DensitySpec constant() { return {}; }
  static DensitySpec circle_cosine(double beta);
  /// `const` or `cos:<beta>`.
  static DensitySpec parse(std::string_view spec);
  std::string name() const;
};

/// A closed reference manifold with its chart, embedding, intrinsic metric
/// and density. Charts are angle based:
///   circle   theta in [0, 2pi)
///   torus    (a, b) in [0, 2pi)^2, Clifford embedding in R^4
///   sphere   (polar in [0, pi], azimuth in [0, 2pi))
///   square   theta in [0, 2pi), arc length s = 2 theta / pi on the unit square's boundary
///   singular (x in [0, 1), y in [0, 2pi)), profile curve times a circle of radius r
class ManifoldModel {
 public:
  static ManifoldModel unit_circle(DensitySpec density = {});
  static ManifoldModel clifford_torus();
  static ManifoldModel sphere2();
  static ManifoldModel square_boundary();
  static ManifoldModel singular_surface(const DyadicProfile& profile, double m2_radius);
  /// Manifold names: circle, torus, sphere, square, singular (default dyadic
  /// profile: ratio 1/2, level 12, r = 1). Throws UnsupportedDensity for a
  /// non-constant density off the circle.
  static ManifoldModel parse(std::string_view manifold, std::string_view density = "const");

  ManifoldKind kind() const noexcept { return kind_; }
  std::string name() const;
  int intrinsic_dim() const noexcept;
  int ambient_dim() const noexcept;
  const DensitySpec& density() const noexcept { return density_; }

  double volume() const noexcept { return volume_; }
  double density_at(std::span<const double> p) const;
  /// 1/alpha <= rho <= alpha.
  double alpha_bound() const;
  /// Lipschitz constant of rho with respect to intrinsic distance.
  double density_lipschitz() const;
  /// L with d_M(p, q) <= L |iota(p) - iota(q)|; computed, not asserted.
  double bilipschitz_constant() const noexcept { return bilipschitz_; }

  bool in_chart(std::span<const double> p) const;
  void embed_into(std::span<const double> p, std::span<double> out) const;
  Eigen::VectorXd embed(std::span<const double> p) const;
  double intrinsic_distance(std::span<const double> p, std::span<const double> q) const;
  /// dVol_g per unit chart volume at p.
  double volume_element(std::span<const double> p) const;
  /// Chart box [lo, hi] per coordinate.
  std::vector<std::pair<double, double>> chart_box() const;
  /// Intrinsic length of the one-dimensional factor (circle, square); 0 otherwise.
  double arc_length_per_radian() const;

  const ProfileCurve* profile_curve() const noexcept { return curve_.get(); }
  double m2_radius() const noexcept { return m2_radius_; }
  int dyadic_level() const noexcept { return dyadic_level_; }

 private:
  ManifoldModel() = default;
  void finalize();

  ManifoldKind kind_ = ManifoldKind::UnitCircle;
  DensitySpec density_;
  double volume_ = 0.0;
  double bilipschitz_ = 0.0;
  double m2_radius_ = 0.0;
  int dyadic_level_ = 0;
  std::shared_ptr<const ProfileCurve> curve_;
};

/// An i.i.d. sample with its chart coordinates and embedded points.
struct PointCloud {
  ManifoldModel model;
  std::uint64_t seed = 0;
  RowMatrix params;   // n x m
  RowMatrix ambient;  // n x d

  std::size_t size() const noexcept { return static_cast<std::size_t>(params.rows()); }
  std::span<const double> param(std::size_t i) const {
    return {params.data() + i * params.cols(), static_cast<std::size_t>(params.cols())};
  }
  std::span<const double> point(std::size_t i) const {
    return {ambient.data() + i * ambient.cols(), static_cast<std::size_t>(ambient.cols())};
  }
};

/// Builds a cloud from chart coordinates, embedding each row.
PointCloud make_cloud(const ManifoldModel& model, RowMatrix params, std::uint64_t seed = 0);

/// n independent draws from rho dVol_g, deterministic in (model, n, seed).
PointCloud sample_iid(const ManifoldModel& model, std::size_t n, std::uint64_t seed);

enum class SpectrumKind { Unweighted, WeightedRho, NormalizedRho };

/// First k + 1 eigenvalues (lambda_0 = 0 included) of Delta, Delta_rho or
/// Delta_rho^N, with multiplicities. Requires constant density unless Unweighted.
std::vector<double> analytic_spectrum(const ManifoldModel& model, SpectrumKind which, std::size_t k);

/// Finite-difference oracle for the weighted circle: stiffness weights rho^2,
/// mass weights rho (WeightedRho) or rho^2 (NormalizedRho), on a uniform
/// periodic grid. Eigenvalues are isolated by bisection on the inertia of
/// (A - sigma M).
std::vector<double> oracle_spectrum_circle_weighted(const DensitySpec& density, std::size_t grid_size, std::size_t k,
                                                    SpectrumKind which = SpectrumKind::WeightedRho);

/// Angular distance on the circle, in [0, pi].
double circle_distance(double a, double b) noexcept;

}  // namespace lapeig
