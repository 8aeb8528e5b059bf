#include "lapeig/dyadic.hpp"

#include "lapeig/quadrature.hpp"

#include <algorithm>
#include <numbers>

namespace lapeig {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cell index and local coordinate of x in [0, 1) on a grid with `cells` cells.
std::pair<std::size_t, double> locate(double x, std::size_t cells) {
  double w = x - std::floor(x);
  const double pos = w * static_cast<double>(cells);
  std::size_t k = static_cast<std::size_t>(pos);
  if (k >= cells) k = cells - 1;
  return {k, pos - static_cast<double>(k)};
}

}  // namespace

DyadicProfile dyadic_alpha(double ratio, int level) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::InvalidArgument, "geometric ratio must lie in (0, 1)");
  GeometricTheta<double> theta{ratio};
  return build_dyadic_profile<double>(theta, level, theta.series_sum());
}

ExactDyadicProfile dyadic_alpha_exact(std::int64_t num, std::int64_t den, int level) {
  if (den <= 0 || num <= 0 || num >= den) throw Error(ErrorCode::InvalidArgument, "geometric ratio must lie in (0, 1)");
  GeometricTheta<Rational> theta{Rational(num, den)};
  return build_dyadic_profile<Rational>(theta, level, theta.series_sum());
}

double profile_value(std::span<const double> values, double x) {
  const std::size_t cells = values.size() - 1;
  auto [k, t] = locate(x, cells);
  return (1.0 - t) * values[k] + t * values[k + 1];
}

ProfileCurve::ProfileCurve(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw Error(ErrorCode::InvalidArgument, "profile needs at least two grid values");
  const std::size_t cells = values_.size() - 1;
  cumulative_.assign(cells + 1, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    cumulative_[k + 1] = cumulative_[k] + cell_length(k, 0.0, 1.0);
    const double d = static_cast<double>(cells) * (values_[k + 1] - values_[k]);
    for (double v : {values_[k], values_[k + 1]}) {
      max_speed_ = std::max(max_speed_, std::hypot(kTwoPi * (1.0 + v), d));
    }
  }
}

double ProfileCurve::cell_length(std::size_t k, double t0, double t1) const {
  const std::size_t cells = values_.size() - 1;
  const double h = 1.0 / static_cast<double>(cells);
  const double d = static_cast<double>(cells) * (values_[k + 1] - values_[k]);
  const GaussRule& rule = gauss_legendre(16);
  const double mid = 0.5 * (t0 + t1);
  const double half = 0.5 * (t1 - t0);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = mid + half * rule.nodes[i];
    const double f = (1.0 - t) * values_[k] + t * values_[k + 1];
    acc += rule.weights[i] * std::hypot(kTwoPi * (1.0 + f), d);
  }
  return acc * half * h;
}

double ProfileCurve::value(double x) const { return profile_value(values_, x); }

double ProfileCurve::slope(double x) const {
  const std::size_t cells = values_.size() - 1;
  auto [k, t] = locate(x, cells);
  return static_cast<double>(cells) * (values_[k + 1] - values_[k]);
}

double ProfileCurve::speed(double x) const { return std::hypot(kTwoPi * (1.0 + value(x)), slope(x)); }

double ProfileCurve::arc_length(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return total_length();
  const std::size_t cells = values_.size() - 1;
  auto [k, t] = locate(x, cells);
  return cumulative_[k] + cell_length(k, 0.0, t);
}

std::array<double, 2> ProfileCurve::point(double x) const {
  const double radius = 1.0 + value(x);
  return {radius * std::cos(kTwoPi * x), radius * std::sin(kTwoPi * x)};
}

double isometry_constant(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::InvalidArgument, "profile needs at least two grid values");
  // Integrand divided by 2 pi up front, so a flat profile sums exact cell widths.
  const std::size_t cells = values.size() - 1;
  const double h = 1.0 / static_cast<double>(cells);
  const GaussRule& rule = gauss_legendre(16);
  double c = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    const double d = static_cast<double>(cells) * (values[k + 1] - values[k]) / kTwoPi;
    if (d == 0.0) {
      c += h * std::abs(1.0 + values[k]);
      continue;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = 0.5 + 0.5 * rule.nodes[i];
      acc += rule.weights[i] * std::hypot(1.0 + (1.0 - t) * values[k] + t * values[k + 1], d);
    }
    c += 0.5 * h * acc;
  }
  return c;
}

IsometryConstant isometry_constant_c(const DyadicProfile& profile) {
  if (profile.level < 4) throw Error(ErrorCode::InvalidArgument, "isometry constant needs profile level >= 4");
  IsometryConstant out;
  out.value = isometry_constant(profile.alpha);
  const DyadicProfile coarse = profile.restricted(profile.level - 1);
  out.previous = isometry_constant(coarse.alpha);
  out.difference = out.value - out.previous;
  return out;
}

std::array<double, 4> singular_embedding(const DyadicProfile& profile, double r, double x, double y) {
  const double radius = 1.0 + profile_value(profile.alpha, x);
  return {radius * std::cos(kTwoPi * x), radius * std::sin(kTwoPi * x), r * std::cos(y), r * std::sin(y)};
}

}  // namespace lapeig
