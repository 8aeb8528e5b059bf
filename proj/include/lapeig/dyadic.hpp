#pragma once

// Piecewise-linear profiles on dyadic grids: the inductive construction of a
// Lipschitz function whose slope changes on a dense set, its slope/jump
// bookkeeping, and the closed curve r = 1 + f(x) built from it.
//
// The construction is templated on the scalar so the identities can be checked
// in exact rational arithmetic: with theta(l) = 2^{-l} the jumps e_n shrink
// below double resolution by level ~10 even though they never vanish.

#include "lapeig/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lapeig {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kMaxDyadicLevel = 24;

/// theta(l) = ratio^l for l >= 2.
template <class Scalar>
struct GeometricTheta {
  Scalar ratio;

  Scalar operator()(int l) const {
    Scalar v = 1;
    for (int i = 0; i < l; ++i) v *= ratio;
    return v;
  }
  /// Sum over l >= 2 of ratio^l.
  Scalar series_sum() const { return ratio * ratio / (Scalar(1) - ratio); }
};

template <class Scalar>
struct BasicDyadicProfile {
  int level = 0;
  std::vector<Scalar> theta;  // theta[l] for l <= level; entries 0 and 1 unused
  std::vector<Scalar> alpha;  // alpha(k / 2^level), k = 0..2^level
  Scalar theta_sum = 0;       // sum over all l >= 2 when known, else the partial sum

  std::size_t intervals() const { return alpha.size() - 1; }

  /// Values on D_j for j <= level; exact because coarser values are carried over.
  BasicDyadicProfile restricted(int j) const {
    if (j < 0 || j > level) throw Error(ErrorCode::InvalidArgument, "restriction level out of range");
    BasicDyadicProfile out;
    out.level = j;
    out.theta.assign(theta.begin(), theta.begin() + j + 1);
    out.theta_sum = theta_sum;
    const std::size_t stride = std::size_t{1} << (level - j);
    out.alpha.reserve((std::size_t{1} << j) + 1);
    for (std::size_t k = 0; k < alpha.size(); k += stride) out.alpha.push_back(alpha[k]);
    return out;
  }
};

using DyadicProfile = BasicDyadicProfile<double>;
using ExactDyadicProfile = BasicDyadicProfile<Rational>;

/// Fills alpha on D_n: alpha(0) = alpha(1) = 0, alpha(1/2) = 1, then the two
/// refinement rules at (4k-3)/2^n and (4k-1)/2^n.
template <class Scalar, class Theta>
BasicDyadicProfile<Scalar> build_dyadic_profile(const Theta& theta, int level, Scalar theta_sum) {
  if (level < 1) throw Error(ErrorCode::InvalidArgument, "dyadic level must be at least 1");
  if (level > kMaxDyadicLevel) throw Error(ErrorCode::LevelTooDeep, "dyadic level above 24");
  BasicDyadicProfile<Scalar> p;
  p.level = level;
  p.theta.assign(static_cast<std::size_t>(level) + 1, Scalar(0));
  for (int l = 2; l <= level; ++l) {
    p.theta[l] = theta(l);
    if (!(p.theta[l] > 0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
  }
  p.theta_sum = theta_sum;

  const std::size_t size = (std::size_t{1} << level) + 1;
  p.alpha.assign(size, Scalar(0));
  // Level-n grid indices; a level-j index k sits at k * 2^{level-j}.
  p.alpha[size / 2] = 1;
  for (int n = 2; n <= level; ++n) {
    const std::size_t stride = std::size_t{1} << (level - n);
    const Scalar& t = p.theta[n];
    const Scalar w_far = t / 4;
    const Scalar w_mid = (Scalar(1) - t) / 2;
    const Scalar w_near = (Scalar(2) + t) / 4;
    const std::size_t blocks = std::size_t{1} << (n - 2);
    for (std::size_t k = 1; k <= blocks; ++k) {
      const Scalar& a0 = p.alpha[(4 * k - 4) * stride];
      const Scalar& a2 = p.alpha[(4 * k - 2) * stride];
      const Scalar& a4 = p.alpha[(4 * k) * stride];
      p.alpha[(4 * k - 3) * stride] = w_far * a4 + w_mid * a2 + w_near * a0;
      p.alpha[(4 * k - 1) * stride] = w_far * a0 + w_mid * a2 + w_near * a4;
    }
  }
  return p;
}

/// theta(l) = ratio^l in double precision; the default construction uses 1/2.
DyadicProfile dyadic_alpha(double ratio, int level);
/// Same construction with theta(l) = (num/den)^l in exact rationals.
ExactDyadicProfile dyadic_alpha_exact(std::int64_t num, std::int64_t den, int level);

template <class Scalar>
struct DyadicSlopes {
  int level = 0;
  std::vector<Scalar> d;  // d_n(k/2^n), k = 0..2^n-1
  std::vector<Scalar> e;  // e_n(k/2^n) with d_n(-1/2^n) := d_n((2^n-1)/2^n)
  Scalar total = 0;       // E_n = sum_k |e_n(k/2^n)|
};

template <class Scalar>
DyadicSlopes<Scalar> dyadic_slopes(const BasicDyadicProfile<Scalar>& p) {
  using std::abs;
  DyadicSlopes<Scalar> s;
  s.level = p.level;
  const std::size_t cells = p.intervals();
  const Scalar scale = Scalar(static_cast<std::int64_t>(cells));
  s.d.resize(cells);
  s.e.resize(cells);
  for (std::size_t k = 0; k < cells; ++k) s.d[k] = scale * (p.alpha[k + 1] - p.alpha[k]);
  for (std::size_t k = 0; k < cells; ++k) {
    const Scalar& prev = k == 0 ? s.d[cells - 1] : s.d[k - 1];
    s.e[k] = s.d[k] - prev;
    s.total += abs(s.e[k]);
  }
  return s;
}

/// f_n(x) for x in [0, 1] (linear interpolation of alpha), extended with period 1.
double profile_value(std::span<const double> values, double x);

/// The closed curve x -> (1 + f(x)) (cos 2 pi x, sin 2 pi x) for a periodic
/// piecewise-linear f given on a uniform grid of [0, 1] (first and last values
/// equal). Arc length is integrated cell by cell with a 16-point Gauss rule;
/// the speed is analytic inside each cell, so this is exact to rounding.
class ProfileCurve {
 public:
  explicit ProfileCurve(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  double value(double x) const;
  double slope(double x) const;
  double speed(double x) const;
  double max_speed() const noexcept { return max_speed_; }
  /// Arc length from parameter 0 to x in [0, 1].
  double arc_length(double x) const;
  double total_length() const noexcept { return cumulative_.back(); }
  std::array<double, 2> point(double x) const;

 private:
  double cell_length(std::size_t k, double t0, double t1) const;

  std::vector<double> values_;
  std::vector<double> cumulative_;
  double max_speed_ = 0.0;
};

struct IsometryConstant {
  double value = 0.0;     // c at the profile's level
  double previous = 0.0;  // c one level coarser (equal to value when not applicable)
  double difference = 0.0;
};

/// c = (1/2pi) int_0^1 ((2pi)^2 (1 + f)^2 + f'^2)^{1/2} dx for piecewise-linear f.
double isometry_constant(std::span<const double> values);
IsometryConstant isometry_constant_c(const DyadicProfile& profile);

/// ((1 + f(x)) (cos 2 pi x, sin 2 pi x), r cos y, r sin y).
std::array<double, 4> singular_embedding(const DyadicProfile& profile, double r, double x, double y);

}  // namespace lapeig
