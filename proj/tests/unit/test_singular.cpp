#include "doctest.h"

#include "lapeig/dyadic.hpp"
#include "lapeig/errors.hpp"
#include "lapeig/sensitivity.hpp"

#include <cmath>
#include <numbers>

using namespace lapeig;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("square boundary chart") {
  auto p = square_boundary_param(kPi / 4);
  CHECK(p[0] == Approx(0.5));
  CHECK(p[1] == Approx(0.0));
  p = square_boundary_param(kPi);
  CHECK(p[0] == Approx(1.0));
  CHECK(p[1] == Approx(1.0));
  p = square_boundary_param(3 * kPi / 2);
  CHECK(std::abs(p[0]) < 1e-15);
  CHECK(p[1] == Approx(1.0));
  for (int i = 0; i < 64; ++i) {
    const double t = 2 * kPi * (i + 0.3) / 64;
    CHECK(square_boundary_angle(square_boundary_param(t)) == Approx(t).epsilon(1e-12));
  }
  CHECK_THROWS_AS(square_boundary_angle({0.5, 0.5}), Error);
  CHECK(eigenfunction_F_alpha(0.0, {1.0, 0.0}, 0.7) == Approx(1.0));
  CHECK(eigenfunction_F_alpha(kPi / 2, {1.0, 0.0}, 0.0) == Approx(0.0).scale(1.0));
  CHECK(eigenfunction_F_alpha(0.0, {0.5, 1.0}, 0.0) == Approx(std::sin(5 * kPi / 4)));
}

TEST_CASE("corner profile h_m") {
  for (int m = 1; m <= 3; ++m) {
    CHECK(std::abs(h_m_eval(m, 0.0)) < 1e-10);
    CHECK(std::abs(h_m_eval(m, 1.0)) < 1e-10);
  }
  CHECK(h_m_eval(1, 0.5) == Approx(-0.4330127019).epsilon(1e-8));
  for (int m = 1; m <= 2; ++m) {
    for (double t : {0.1, 0.25, 0.5, 0.8, 0.95}) CHECK(h_m_eval(m, t) == Approx(h_m_closed_form(m, t)).epsilon(1e-8));
  }
}

TEST_CASE("limit of the L1 deviation") {
  SensitivityConfig c;
  CHECK(sensitivity_sigma() == Approx(kPi / 4));
  CHECK(sensitivity_l1_limit(c, 2) == Approx(kPi * kPi * kPi / 2).epsilon(1e-10));
  SensitivityConfig tilted;
  tilted.alpha = kPi / 4;
  CHECK(sensitivity_l1_limit(tilted, 2) == Approx(std::sqrt(2.0) * kPi * kPi * kPi / 2).epsilon(1e-10));
  SensitivityConfig bad;
  bad.eps_grid = {0.1, 0.2};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.eps_grid = {0.1};
  bad.m2_radius = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("integral operator annihilates constants") {
  SensitivityConfig c;
  c.quad_resolution = 64;
  for (double s0 : {0.0, 0.5, 1.02, 3.99}) {
    CHECK(std::abs(sensitivity_operator_invariant(c, [](double) { return 3.0; }, s0, 0.1)) < 1e-9);
    CHECK(std::abs(sensitivity_operator(c, [](double, double) { return 3.0; }, {s0, 0.4}, 0.1)) < 1e-9);
  }
}

TEST_CASE("general and invariant operator paths agree") {
  SensitivityConfig c;
  c.quad_resolution = 128;
  const auto g = [](double s) { return std::sin(kPi * s / 2); };
  for (double s0 : {0.5, 0.97, 2.3}) {
    const double a = sensitivity_operator_invariant(c, g, s0, 0.1);
    const double b = sensitivity_operator(c, [&](double s, double) { return g(s); }, {s0, 1.0}, 0.1);
    CHECK(b == Approx(a).epsilon(2e-3));
  }
}

TEST_CASE("sensitivity sweep values") {
  // Frozen from an independent scalar evaluation of the same integrals.
  SensitivityConfig c;
  const auto rows = sensitivity_sweep(c);
  REQUIRE(rows.size() == 4);
  const double l1[] = {16.1999, 15.8723, 15.6915, 15.5981};
  const double mid[] = {-2.241e-3, -5.613e-4, -1.404e-4, -3.510e-5};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rows[i].l1_deviation == Approx(l1[i]).epsilon(2e-4));
    CHECK(rows[i].midpoint_deviation == Approx(mid[i]).epsilon(2e-3));
    CHECK(rows[i].limit_rhs == Approx(15.5031).epsilon(1e-4));
  }
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(rows[i].l1_deviation < rows[i - 1].l1_deviation);
    CHECK(rows[i - 1].midpoint_deviation / rows[i].midpoint_deviation == Approx(4.0).epsilon(0.01));
  }
}

TEST_CASE("dyadic profile small levels") {
  const DyadicProfile p1 = dyadic_alpha(0.5, 1);
  REQUIRE(p1.alpha.size() == 3);
  CHECK(p1.alpha[0] == 0.0);
  CHECK(p1.alpha[1] == 1.0);
  CHECK(p1.alpha[2] == 0.0);
  const auto s1 = dyadic_slopes(p1);
  CHECK(s1.d == std::vector<double>{2.0, -2.0});
  CHECK(s1.e == std::vector<double>{4.0, -4.0});
  const DyadicProfile p2 = dyadic_alpha(0.5, 2);
  CHECK(p2.alpha == std::vector<double>{0.0, 0.375, 1.0, 0.375, 0.0});
  CHECK_THROWS_AS(dyadic_alpha(0.5, 0), Error);
  try {
    dyadic_alpha(0.5, 25);
    FAIL("expected LevelTooDeep");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelTooDeep);
  }
}

TEST_CASE("dyadic profile symmetry and nesting") {
  const DyadicProfile p = dyadic_alpha(0.5, 12);
  const std::size_t n = p.intervals();
  for (std::size_t k = 0; k <= n; ++k) CHECK(p.alpha[k] == p.alpha[n - k]);
  for (int j = 1; j < 12; ++j) CHECK(p.restricted(j).alpha == dyadic_alpha(0.5, j).alpha);
  // slope bound 2 exp(sum theta) and jump bound 8 exp(4 sum theta), sum theta = 1/2
  const auto s = dyadic_slopes(p);
  double dmax = 0.0;
  for (double d : s.d) dmax = std::max(dmax, std::abs(d));
  CHECK(dmax <= 2 * std::exp(0.5));
  CHECK(s.total <= 8 * std::exp(2.0));
  CHECK(profile_value(p.alpha, 0.5) == 1.0);
  CHECK(profile_value(p.alpha, 1.25) == Approx(profile_value(p.alpha, 0.25)));
}

TEST_CASE("exact slope and jump recursions") {
  const int top = 10;
  const ExactDyadicProfile full = dyadic_alpha_exact(1, 2, top);
  std::vector<DyadicSlopes<Rational>> s;
  for (int n = 0; n <= top; ++n) s.push_back(n == 0 ? DyadicSlopes<Rational>{} : dyadic_slopes(full.restricted(n)));
  for (int n = 2; n <= top; ++n) {
    const Rational t = full.theta[n];
    const auto& d = s[n].d;
    const auto& d1 = s[n - 1].d;
    const auto& e = s[n].e;
    const auto& e1 = s[n - 1].e;
    const std::size_t half = e1.size();
    for (std::size_t k = 0; k < (std::size_t{1} << (n - 2)); ++k) {
      CHECK(d[4 * k] == t / 2 * d1[2 * k + 1] + (1 - t / 2) * d1[2 * k]);
      CHECK(d[4 * k + 1] == -t / 2 * d1[2 * k + 1] + (1 + t / 2) * d1[2 * k]);
      CHECK(d[4 * k + 2] == (1 + t / 2) * d1[2 * k + 1] - t / 2 * d1[2 * k]);
      CHECK(d[4 * k + 3] == (1 - t / 2) * d1[2 * k + 1] + t / 2 * d1[2 * k]);
      const Rational& before = e1[(2 * k + half - 1) % half];
      CHECK(e[4 * k] == t / 2 * e1[2 * k + 1] + e1[2 * k] + t / 2 * before);
      CHECK(e[4 * k + 1] == -t * e1[2 * k + 1]);
      CHECK(e[4 * k + 2] == (1 + t) * e1[2 * k + 1]);
      CHECK(e[4 * k + 3] == -t * e1[2 * k + 1]);
      if (n >= 3) {
        CHECK(d[4 * k] == t * s[n - 2].d[k] + (1 - t) * d1[2 * k]);
        CHECK(e[4 * k] == t * s[n - 2].e[k] + (1 - t) * e1[2 * k]);
      }
    }
    CHECK(s[n].total <= (1 + 4 * t) * s[n - 1].total);
    for (const auto& x : e) CHECK(x != 0);
  }
}

TEST_CASE("isometry constant of the profile curve") {
  CHECK(isometry_constant(std::vector<double>(17, 0.0)) == Approx(1.0).epsilon(1e-14));
  CHECK(isometry_constant(std::vector<double>(9, 0.3)) == Approx(1.3).epsilon(1e-14));
  const auto c = isometry_constant_c(dyadic_alpha(0.5, 12));
  CHECK(c.value > 1.0);
  CHECK(std::abs(c.value - c.previous) < 1e-3);
  const ProfileCurve curve(dyadic_alpha(0.5, 6).alpha);
  CHECK(curve.arc_length(1.0) == Approx(curve.total_length()));
  CHECK(curve.arc_length(0.5) < curve.total_length());
}

TEST_CASE("singular surface embedding") {
  const DyadicProfile p = dyadic_alpha(0.5, 8);
  for (double x : {0.0, 0.1, 0.5, 0.77}) {
    const auto z = singular_embedding(p, 2.0, x, 1.1);
    CHECK(std::hypot(z[0], z[1]) == Approx(1.0 + profile_value(p.alpha, x)));
    CHECK(std::hypot(z[2], z[3]) == Approx(2.0));
  }
}
