#include "lapeig/sensitivity.hpp"

#include "lapeig/errors.hpp"
#include "lapeig/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lapeig {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kOnBoundary = 1e-9;

struct Face {
  std::array<double, 2> origin;
  std::array<double, 2> dir;
};

constexpr std::array<Face, 4> kFaces{{
    {{0.0, 0.0}, {1.0, 0.0}},
    {{1.0, 0.0}, {0.0, 1.0}},
    {{1.0, 1.0}, {-1.0, 0.0}},
    {{0.0, 1.0}, {0.0, -1.0}},
}};

std::array<double, 2> point_at_arc(double s) {
  double w = std::fmod(s, 4.0);
  if (w < 0.0) w += 4.0;
  const int f = std::min(3, static_cast<int>(w));
  const double t = w - f;
  const Face& face = kFaces[static_cast<std::size_t>(f)];
  return {face.origin[0] + t * face.dir[0], face.origin[1] + t * face.dir[1]};
}

double F_alpha_arc(double alpha, double s) { return std::sin(kPi * s / 2.0 - alpha); }

// Portion of face f inside the disc of radius eps around x0, in the
// substitution t = t_foot + R sin(phi) that removes the square-root edge.
struct FaceClip {
  bool hit = false;
  double t_foot = 0.0;
  double radius = 0.0;
  double phi_lo = 0.0;
  double phi_hi = 0.0;
};

FaceClip clip_face(const Face& face, const std::array<double, 2>& x0, double eps) {
  FaceClip c;
  const double dx = x0[0] - face.origin[0];
  const double dy = x0[1] - face.origin[1];
  c.t_foot = dx * face.dir[0] + dy * face.dir[1];
  const double px = dx - c.t_foot * face.dir[0];
  const double py = dy - c.t_foot * face.dir[1];
  const double d2 = px * px + py * py;
  if (d2 >= eps * eps) return c;
  c.radius = std::sqrt(eps * eps - d2);
  const double lo = std::max(0.0, c.t_foot - c.radius);
  const double hi = std::min(1.0, c.t_foot + c.radius);
  if (hi <= lo) return c;
  c.hit = true;
  c.phi_lo = std::asin(std::clamp((lo - c.t_foot) / c.radius, -1.0, 1.0));
  c.phi_hi = std::asin(std::clamp((hi - c.t_foot) / c.radius, -1.0, 1.0));
  return c;
}

// Half-angle of the arc of the radius-r circle within chord distance rho.
double half_arc(double rho, double r) { return 2.0 * std::asin(std::min(1.0, rho / (2.0 * r))); }

double invariant_with_rule(const ScalarFn& g, double s0, double eps, double r, const GaussRule& rule) {
  const auto x0 = point_at_arc(s0);
  const double g0 = g(s0);
  double acc = 0.0;
  for (std::size_t f = 0; f < kFaces.size(); ++f) {
    const FaceClip c = clip_face(kFaces[f], x0, eps);
    if (!c.hit) continue;
    const double mid = 0.5 * (c.phi_lo + c.phi_hi);
    const double half = 0.5 * (c.phi_hi - c.phi_lo);
    double face_acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double phi = mid + half * rule.nodes[i];
      const double t = c.t_foot + c.radius * std::sin(phi);
      const double rho = c.radius * std::cos(phi);  // sqrt(eps^2 - a^2)
      const double arc = 2.0 * r * half_arc(rho, r);
      face_acc += rule.weights[i] * (g0 - g(static_cast<double>(f) + t)) * arc * rho;
    }
    acc += face_acc * half;
  }
  return acc / std::pow(eps, 4);
}

double general_with_rule(const SurfaceFn& h, SurfacePoint z0, double eps, double r, const GaussRule& rule) {
  const auto x0 = point_at_arc(z0.s);
  const double h0 = h(z0.s, z0.y);
  double acc = 0.0;
  for (std::size_t f = 0; f < kFaces.size(); ++f) {
    const FaceClip c = clip_face(kFaces[f], x0, eps);
    if (!c.hit) continue;
    const double mid = 0.5 * (c.phi_lo + c.phi_hi);
    const double half = 0.5 * (c.phi_hi - c.phi_lo);
    double face_acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double phi = mid + half * rule.nodes[i];
      const double s = static_cast<double>(f) + c.t_foot + c.radius * std::sin(phi);
      const double rho = c.radius * std::cos(phi);
      const double ymax = half_arc(rho, r);
      double inner = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double y = z0.y + ymax * rule.nodes[j];
        inner += rule.weights[j] * (h0 - h(s, y));
      }
      face_acc += rule.weights[i] * inner * ymax * r * rho;
    }
    acc += face_acc * half;
  }
  return acc / std::pow(eps, 4);
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
}

void check_resolution(int q) {
  if (q < 64) throw Error(ErrorCode::InvalidArgument, "quadrature resolution must be at least 64");
}

double converged(double fine, double coarse) {
  if (std::abs(fine - coarse) > 1e-3 * std::abs(fine) + 1e-9) {
    throw Error(ErrorCode::QuadratureNotConverged, "L_eps quadrature differs between resolutions");
  }
  return fine;
}

}  // namespace

std::array<double, 2> square_boundary_param(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return point_at_arc(2.0 * w / kPi);
}

double square_boundary_angle(const std::array<double, 2>& x) {
  const double a = x[0];
  const double b = x[1];
  const bool in_box = a >= -kOnBoundary && a <= 1.0 + kOnBoundary && b >= -kOnBoundary && b <= 1.0 + kOnBoundary;
  double s = -1.0;
  if (in_box) {
    if (std::abs(b) <= kOnBoundary) {
      s = std::clamp(a, 0.0, 1.0);
    } else if (std::abs(a - 1.0) <= kOnBoundary) {
      s = 1.0 + std::clamp(b, 0.0, 1.0);
    } else if (std::abs(b - 1.0) <= kOnBoundary) {
      s = 3.0 - std::clamp(a, 0.0, 1.0);
    } else if (std::abs(a) <= kOnBoundary) {
      s = 4.0 - std::clamp(b, 0.0, 1.0);
    }
  }
  if (s < 0.0) throw Error(ErrorCode::OutOfChart, "point is not on the boundary of the unit square");
  double theta = kPi * s / 2.0;
  if (theta >= kTwoPi) theta -= kTwoPi;
  return theta;
}

double eigenfunction_F_alpha(double alpha, const std::array<double, 2>& x, double /*y*/) {
  return std::sin(square_boundary_angle(x) - alpha);
}

void SensitivityConfig::validate() const {
  if (!(m2_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "M2 radius must be positive");
  if (eps_grid.empty()) throw Error(ErrorCode::InvalidArgument, "eps grid is empty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    check_eps(eps_grid[i]);
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "eps grid must be strictly decreasing");
    }
  }
  check_resolution(quad_resolution);
}

double sensitivity_sigma() { return sphere_volume(2) / (2.0 * 4.0); }

double sensitivity_operator(const SensitivityConfig& config, const SurfaceFn& h, SurfacePoint z0, double eps) {
  check_eps(eps);
  check_resolution(config.quad_resolution);
  const auto q = static_cast<std::size_t>(config.quad_resolution);
  const double fine = general_with_rule(h, z0, eps, config.m2_radius, gauss_legendre(q));
  const double coarse = general_with_rule(h, z0, eps, config.m2_radius, gauss_legendre(q / 2));
  return converged(fine, coarse);
}

double sensitivity_operator_invariant(const SensitivityConfig& config, const ScalarFn& g, double s0, double eps) {
  check_eps(eps);
  check_resolution(config.quad_resolution);
  const auto q = static_cast<std::size_t>(config.quad_resolution);
  const double fine = invariant_with_rule(g, s0, eps, config.m2_radius, gauss_legendre(q));
  const double coarse = invariant_with_rule(g, s0, eps, config.m2_radius, gauss_legendre(q / 2));
  return converged(fine, coarse);
}

double sensitivity_deviation(const SensitivityConfig& config, double s0, double eps) {
  const double alpha = config.alpha;
  auto g = [alpha](double s) { return F_alpha_arc(alpha, s); };
  const double lap = (kPi / 2.0) * (kPi / 2.0) * g(s0);
  return sensitivity_operator_invariant(config, g, s0, eps) - 0.5 * sensitivity_sigma() * lap;
}

double sensitivity_l1_deviation(const SensitivityConfig& config, double eps) {
  check_eps(eps);
  check_resolution(config.quad_resolution);
  const double alpha = config.alpha;
  const double r = config.m2_radius;
  const GaussRule& rule = gauss_legendre(static_cast<std::size_t>(config.quad_resolution));
  auto g = [alpha](double s) { return F_alpha_arc(alpha, s); };
  const double half_sigma_lap = 0.5 * sensitivity_sigma() * (kPi / 2.0) * (kPi / 2.0);
  auto dev = [&](double s0) { return std::abs(invariant_with_rule(g, s0, eps, r, rule) - half_sigma_lap * g(s0)); };

  // Per face: two corner layers of width eps, where the clipped interval on
  // the neighbouring face opens like a square root, and the smooth interior.
  double acc = 0.0;
  for (int f = 0; f < 4; ++f) {
    const double a = f;
    const double b = f + 1.0;
    acc += integrate_endpoint_singular(dev, a, a + eps, 1e-8);
    acc += integrate_endpoint_singular(dev, b - eps, b, 1e-8);
    acc += integrate(dev, a + eps, b - eps, 1e-8);
  }
  return kTwoPi * r * acc;
}

double h_m_eval(int m, double t) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "t must lie in [0, 1]");
  if (t == 1.0) return 0.0;
  const double p = 0.5 * (m - 1);
  auto first = [p](double s) { return s * std::pow(std::max(0.0, 1.0 - s * s), p); };
  auto second = [p, t](double s) { return (s + t) * std::pow(std::max(0.0, 1.0 - s * s - t * t), p); };
  const double upper = std::sqrt(1.0 - t * t);
  return integrate_endpoint_singular(first, t, 1.0) - integrate_endpoint_singular(second, 0.0, upper);
}

double h_m_closed_form(int m, double t) {
  if (m == 1) return -t * std::sqrt(std::max(0.0, 1.0 - t * t));
  if (m == 2) return -(kPi / 4.0) * t * (1.0 - t * t);
  throw Error(ErrorCode::InvalidArgument, "closed form only for m = 1, 2");
}

double sensitivity_l1_limit(const SensitivityConfig& config, int m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "the limit needs m >= 2");
  const double abs_h = integrate([m](double t) { return std::abs(h_m_eval(m, t)); }, 0.0, 1.0, 1e-10);
  const double phase = std::abs(std::sin(config.alpha)) + std::abs(std::cos(config.alpha));
  return kTwoPi * phase * (kTwoPi * config.m2_radius) * unit_ball_volume(m - 1) * abs_h;
}

std::vector<SensitivityRow> sensitivity_sweep(const SensitivityConfig& config) {
  config.validate();
  const double rhs = sensitivity_l1_limit(config, 2);
  std::vector<SensitivityRow> rows;
  rows.reserve(config.eps_grid.size());
  for (double eps : config.eps_grid) {
    rows.push_back({eps, sensitivity_l1_deviation(config, eps), rhs, sensitivity_deviation(config, 0.5, eps)});
  }
  return rows;
}

}  // namespace lapeig
