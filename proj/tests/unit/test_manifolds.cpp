#include "doctest.h"

#include "lapeig/errors.hpp"
#include "lapeig/manifolds.hpp"
#include "lapeig/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

using namespace lapeig;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double ambient_gap(const ManifoldModel& m, std::span<const double> p, std::span<const double> q) {
  return (m.embed(p) - m.embed(q)).norm();
}

std::vector<double> random_param(const ManifoldModel& m, Rng& rng) {
  std::vector<double> p;
  for (const auto& [lo, hi] : m.chart_box()) p.push_back(lo + (hi - lo) * rng.uniform());
  return p;
}

}  // namespace

TEST_CASE("sampling on the circle") {
  const auto circle = ManifoldModel::unit_circle();
  const auto one = sample_iid(circle, 1, 7);
  CHECK(one.size() == 1);
  CHECK(Eigen::Map<const Eigen::VectorXd>(one.point(0).data(), 2).norm() == Approx(1.0).epsilon(1e-14));

  // Kolmogorov-Smirnov distance of the angles to the uniform law.
  const auto cloud = sample_iid(circle, 10000, 7);
  std::vector<double> theta(cloud.params.data(), cloud.params.data() + cloud.size());
  std::sort(theta.begin(), theta.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double cdf = theta[i] / (2.0 * kPi);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / 1e4), std::abs(cdf - static_cast<double>(i + 1) / 1e4)});
  }
  CHECK(ks < 0.02);
}

TEST_CASE("cosine density sampler reproduces the first moment") {
  const auto model = ManifoldModel::unit_circle(DensitySpec::circle_cosine(0.5));
  const auto cloud = sample_iid(model, 100000, 3);
  double mean = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) mean += std::cos(cloud.param(i)[0]);
  mean /= static_cast<double>(cloud.size());
  CHECK(std::abs(mean - 0.25) < 0.01);
}

TEST_CASE("sampler determinism") {
  for (const char* name : {"circle", "torus", "sphere", "square", "singular"}) {
    const auto model = ManifoldModel::parse(name);
    const auto a = sample_iid(model, 200, 99);
    const auto b = sample_iid(model, 200, 99);
    CHECK(a.params == b.params);
    CHECK(a.ambient == b.ambient);
    CHECK_FALSE(a.params == sample_iid(model, 200, 100).params);
  }
}

TEST_CASE("embeddings") {
  const auto square = ManifoldModel::square_boundary();
  const double zero = 0.0, quarter = kPi / 2.0, half = kPi;
  CHECK(square.embed({&zero, 1}).isApprox(Eigen::Vector2d(0.0, 0.0)));
  CHECK(square.embed({&quarter, 1}).isApprox(Eigen::Vector2d(1.0, 0.0)));
  CHECK(square.embed({&half, 1}).isApprox(Eigen::Vector2d(1.0, 1.0)));
  const auto circle = ManifoldModel::unit_circle();
  CHECK((circle.embed({&half, 1}) - Eigen::Vector2d(-1.0, 0.0)).norm() < 1e-15);
}

TEST_CASE("intrinsic distances") {
  const auto circle = ManifoldModel::unit_circle();
  const double a = 0.0, b = kPi;
  CHECK(circle.intrinsic_distance({&a, 1}, {&b, 1}) == Approx(kPi));

  const auto square = ManifoldModel::square_boundary();
  const double c1 = kPi / 2.0, c3 = 3.0 * kPi / 2.0;  // corners (1,0) and (0,1)
  CHECK(square.intrinsic_distance({&c1, 1}, {&c3, 1}) == Approx(2.0));

  const auto sphere = ManifoldModel::sphere2();
  const double north[2] = {0.0, 0.0}, equator[2] = {kPi / 2.0, 1.0};
  CHECK(sphere.intrinsic_distance(north, equator) == Approx(kPi / 2.0));
}

TEST_CASE("chord never exceeds intrinsic distance, which stays within L chords") {
  for (const char* name : {"circle", "torus", "sphere", "square", "singular"}) {
    const auto model = ManifoldModel::parse(name);
    Rng rng(11);
    const double L = model.bilipschitz_constant();
    for (int i = 0; i < 10000; ++i) {
      const auto p = random_param(model, rng);
      const auto q = random_param(model, rng);
      const double chord = ambient_gap(model, p, q);
      const double d = model.intrinsic_distance(p, q);
      CHECK(chord <= d * (1.0 + 1e-12) + 1e-12);
      CHECK(d <= L * chord * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("square boundary bi-Lipschitz constant is the grid sup") {
  // Midpoints of opposite faces: arc 2, chord 1.
  CHECK(ManifoldModel::square_boundary().bilipschitz_constant() == Approx(2.0).epsilon(1e-3));
}

TEST_CASE("analytic spectra") {
  const auto circle = ManifoldModel::unit_circle();
  const auto n = analytic_spectrum(circle, SpectrumKind::NormalizedRho, 4);
  REQUIRE(n.size() == 5);
  CHECK(n == std::vector<double>{0.0, 1.0, 1.0, 4.0, 4.0});
  const auto w = analytic_spectrum(circle, SpectrumKind::WeightedRho, 2);
  CHECK(w[1] == Approx(1.0 / (2.0 * kPi)));
  CHECK(w[2] == Approx(1.0 / (2.0 * kPi)));

  const auto sq = analytic_spectrum(ManifoldModel::square_boundary(), SpectrumKind::NormalizedRho, 2);
  CHECK(sq[1] == Approx(kPi * kPi / 4.0));
  CHECK(sq[2] == Approx(kPi * kPi / 4.0));

  const auto torus = analytic_spectrum(ManifoldModel::clifford_torus(), SpectrumKind::Unweighted, 9);
  CHECK(torus == std::vector<double>{0, 1, 1, 1, 1, 2, 2, 2, 2, 4});
  const auto sphere = analytic_spectrum(ManifoldModel::sphere2(), SpectrumKind::Unweighted, 4);
  CHECK(sphere == std::vector<double>{0, 2, 2, 2, 6});

  CHECK_THROWS_AS(analytic_spectrum(ManifoldModel::parse("singular"), SpectrumKind::Unweighted, 2), Error);
}

TEST_CASE("weighted circle oracle") {
  const auto constant = oracle_spectrum_circle_weighted(DensitySpec::constant(), 4096, 2);
  CHECK(constant[0] == 0.0);
  CHECK(std::abs(constant[1] - 1.0 / (2.0 * kPi)) < 1e-5);
  CHECK(std::abs(constant[2] - 1.0 / (2.0 * kPi)) < 1e-5);

  const auto flat = oracle_spectrum_circle_weighted(DensitySpec::constant(), 4096, 4);
  const auto beta0 = oracle_spectrum_circle_weighted(DensitySpec::circle_cosine(0.0), 4096, 4);
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(std::abs(flat[i] - beta0[i]) < 1e-9);

  const auto coarse = oracle_spectrum_circle_weighted(DensitySpec::circle_cosine(0.5), 2048, 3);
  const auto fine = oracle_spectrum_circle_weighted(DensitySpec::circle_cosine(0.5), 4096, 3);
  for (std::size_t i = 0; i < coarse.size(); ++i) CHECK(std::abs(coarse[i] - fine[i]) < 1e-4);
}

TEST_CASE("oracle matches an independent dense generalized eigensolve") {
  // Frozen from a dense symmetric eigensolve of the same stiffness/mass pair
  // (grid 2048, beta 0.5) done outside this code base.
  const auto w = oracle_spectrum_circle_weighted(DensitySpec::circle_cosine(0.5), 2048, 4, SpectrumKind::WeightedRho);
  const double weighted[] = {0.0, 1.591548182522e-01, 1.591548182522e-01, 5.852906476307e-01, 5.852906476307e-01};
  const auto nz = oracle_spectrum_circle_weighted(DensitySpec::circle_cosine(0.5), 2048, 4, SpectrumKind::NormalizedRho);
  const double normalized[] = {0.0, 1.044924141042, 1.347914734775, 4.155281777478, 4.183624321007};
  for (int i = 1; i <= 4; ++i) {
    CHECK(w[i] == Approx(weighted[i]).epsilon(1e-9));
    CHECK(nz[i] == Approx(normalized[i]).epsilon(1e-9));
  }
}

TEST_CASE("manifold errors") {
  CHECK_THROWS_AS(ManifoldModel::parse("sphere", "cos:0.5"), Error);
  CHECK_THROWS_AS(DensitySpec::parse("cos:1.5"), Error);
  CHECK_THROWS_AS(ManifoldModel::parse("klein"), Error);
  CHECK_THROWS_AS(sample_iid(ManifoldModel::unit_circle(), 0, 1), Error);
  CHECK_THROWS_AS(oracle_spectrum_circle_weighted(DensitySpec::constant(), 32, 2), Error);
  try {
    ManifoldModel::parse("torus", "cos:0.2");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedDensity);
  }
}

TEST_CASE("derived seeds do not collide") {
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t n = 0; n < 1024; ++n) {
    for (std::uint64_t t = 0; t < 1024; ++t) seen.insert(derive_seed(1, n, t));
  }
  CHECK(seen.size() == std::size_t{1} << 20);
}
