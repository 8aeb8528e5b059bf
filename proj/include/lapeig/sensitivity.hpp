#pragma once

// The unit-square boundary M1 = boundary of [0,1]^2 times a circle M2 of
// radius r, and the integral Laplacian approximation
//   L_eps h(z0) = eps^{-(m+2)} * int_{B(z0, eps) ∩ M} (h(z0) - h(z)) dz
// whose L1 deviation from (sigma/2) Delta h stays bounded away from zero
// because of the corners.
//
// Points of M1 are addressed by arc length s in [0, 4) starting at (0,0) and
// running counter-clockwise; the angle chart is theta = pi s / 2.

#include "lapeig/quadrature.hpp"

#include <array>
#include <functional>
#include <vector>

namespace lapeig {

/// Four-branch map S^1 -> M1: (2t/pi, 0), (1, 2t/pi - 1), (3 - 2t/pi, 1), (0, 4 - 2t/pi).
std::array<double, 2> square_boundary_param(double theta);
/// Inverse of square_boundary_param, in [0, 2pi). Throws OutOfChart off M1 (tolerance 1e-9).
double square_boundary_angle(const std::array<double, 2>& x);

/// sin(phi^{-1}(x) - alpha); independent of the M2 coordinate y.
double eigenfunction_F_alpha(double alpha, const std::array<double, 2>& x, double y);

struct SensitivityConfig {
  double alpha = 0.0;
  double m2_radius = 1.0;
  std::vector<double> eps_grid{0.2, 0.1, 0.05, 0.025};
  int quad_resolution = 256;

  /// Throws InvalidArgument unless eps_grid is strictly decreasing inside (0, 1) and r > 0.
  void validate() const;
};

struct SurfacePoint {
  double s = 0.0;  // arc length on M1
  double y = 0.0;  // angle on M2
};

using SurfaceFn = std::function<double(double s, double y)>;

/// sigma = Vol(S^{m-1}) / (m (m+2)) for the indicator kernel; m = 2 here.
double sensitivity_sigma();

/// L_eps h(z0) on M1 x M2 (m = 2). Each face of M1 is clipped to the ambient
/// ball exactly and the chord angle on M2 is integrated per node; the result
/// is compared against a half-resolution evaluation and QuadratureNotConverged
/// is thrown when they differ by more than 1e-3 relative.
double sensitivity_operator(const SensitivityConfig& config, const SurfaceFn& h, SurfacePoint z0, double eps);

/// Fast path for h(s, y) = g(s): the M2 integral is the closed-form arc length
/// 4 r asin(sqrt(eps^2 - a^2) / (2r)) of the circle inside the ball.
double sensitivity_operator_invariant(const SensitivityConfig& config, const ScalarFn& g, double s0, double eps);

/// L_eps F_alpha(s0) - (sigma/2) Delta F_alpha(s0), with Delta F_alpha = (pi/2)^2 F_alpha.
double sensitivity_deviation(const SensitivityConfig& config, double s0, double eps);

/// int_M |L_eps F_alpha - (sigma/2) Delta F_alpha| dVol, integrated per face
/// with the eps-layers next to each corner treated as separate panels.
double sensitivity_l1_deviation(const SensitivityConfig& config, double eps);

/// h_m(t) by quadrature (tanh-sinh on the second integral).
double h_m_eval(int m, double t);
/// Closed forms: h_1(t) = -t sqrt(1 - t^2), h_2(t) = -(pi/4) t (1 - t^2).
double h_m_closed_form(int m, double t);

/// 2 pi (|sin a| + |cos a|) (2 pi r) Vol(B^{m-1}) int_0^1 |h_m|.
double sensitivity_l1_limit(const SensitivityConfig& config, int m);

struct SensitivityRow {
  double eps = 0.0;
  double l1_deviation = 0.0;
  double limit_rhs = 0.0;
  double midpoint_deviation = 0.0;  // pointwise deviation at the face midpoint s = 1/2
};

std::vector<SensitivityRow> sensitivity_sweep(const SensitivityConfig& config);

}  // namespace lapeig
