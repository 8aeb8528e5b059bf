#include "doctest.h"

#include "lapeig/comparison.hpp"
#include "lapeig/errors.hpp"
#include "lapeig/rng.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace lapeig;
using doctest::Approx;

namespace {

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::MatrixXd random_psd(Rng& rng, Eigen::Index n) {
  const Eigen::MatrixXd a = gaussian(rng, n, n);
  return a * a.transpose() / static_cast<double>(n);
}

Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index n) {
  return gaussian(rng, n, n).householderQr().householderQ();
}

FormSpace diagonal_space(std::initializer_list<double> values) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) d[i++] = v;
  return {d.asDiagonal(), Eigen::MatrixXd::Identity(d.size(), d.size())};
}

}  // namespace

TEST_CASE("sphere sup brackets the true maximum") {
  Rng rng(3);
  for (int dim = 1; dim <= 3; ++dim) {
    const Eigen::MatrixXd a = random_psd(rng, dim);
    const double truth = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().maxCoeff();
    const auto s = sphere_sup([&](const Eigen::VectorXd& c) { return c.dot(a * c) / c.squaredNorm(); }, dim, 32);
    CHECK(s.value <= truth + 1e-12);
    CHECK(s.upper() >= truth - 1e-12);
    CHECK(s.value == Approx(truth).epsilon(1e-6));
  }
  CHECK_THROWS_AS(sphere_sup([](const Eigen::VectorXd&) { return 0.0; }, 4, 32), Error);
  CHECK_THROWS_AS(sphere_sup([](const Eigen::VectorXd&) { return 0.0; }, 2, 2), Error);
}

TEST_CASE("eigenvalue comparison: isometric forms") {
  Rng rng(5);
  const Eigen::MatrixXd form = random_psd(rng, 6);
  const Eigen::MatrixXd u = random_orthogonal(rng, 6);
  const FormSpace d1{form, Eigen::MatrixXd::Identity(6, 6)};
  const FormSpace d2{u * form * u.transpose(), Eigen::MatrixXd::Identity(6, 6)};
  const auto c = evalcomp_bound_check(d1, d2, u, 3);
  CHECK(std::abs(c.e.value) < 1e-10);
  CHECK(c.passed);
  for (double m : c.margins) CHECK(std::abs(m) < 1e-9 + c.e.slack);
}

TEST_CASE("eigenvalue comparison: uniform shift gives E = c") {
  Rng rng(6);
  const Eigen::MatrixXd form = random_psd(rng, 5);
  const FormSpace d1{form, Eigen::MatrixXd::Identity(5, 5)};
  const FormSpace d2{form + 0.3 * Eigen::MatrixXd::Identity(5, 5), Eigen::MatrixXd::Identity(5, 5)};
  const auto c = evalcomp_bound_check(d1, d2, Eigen::MatrixXd::Identity(5, 5), 2);
  CHECK(c.e.value == Approx(0.3).epsilon(1e-10));
  for (double m : c.margins) CHECK(std::abs(m - c.e.slack) < 1e-9);
}

TEST_CASE("eigenvalue comparison on random pairs") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const FormSpace d1{random_psd(rng, 6), Eigen::MatrixXd::Identity(6, 6) + 0.1 * random_psd(rng, 6)};
    const FormSpace d2{random_psd(rng, 6), Eigen::MatrixXd::Identity(6, 6)};
    const Eigen::MatrixXd q1 = Eigen::MatrixXd::Identity(6, 6) + 0.2 * gaussian(rng, 6, 6);
    CHECK(evalcomp_bound_check(d1, d2, q1, 2).passed);
  }
}

TEST_CASE("modified form is dominated and keeps the low spectrum") {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 3 + t % 6;
    const FormSpace space{random_psd(rng, n), Eigen::MatrixXd::Identity(n, n) + 0.2 * random_psd(rng, n)};
    const auto eig = form_eigen(space);
    const double lambda = eig.values[n / 2];
    const double lambda_prime = lambda + 0.1;
    const Eigen::MatrixXd sub = gaussian(rng, n, 1 + t % static_cast<int>(n));
    const auto c = dtilde_check(space, lambda, lambda_prime, sub);
    CHECK(c.passed);
    CHECK(c.domination_margin >= -1e-10);
  }
}

TEST_CASE("eigenvector comparison under an isometry") {
  Rng rng(9);
  const Eigen::MatrixXd u = random_orthogonal(rng, 4);
  const FormSpace d1 = diagonal_space({0.0, 1.0, 2.5, 4.0});
  const FormSpace d2{u * d1.form * u.transpose(), Eigen::MatrixXd::Identity(4, 4)};
  const auto r = eveccomp_quantities(d1, d2, u, u.transpose(), 2, 2);
  CHECK(std::abs(r.e1.value) < 1e-10);
  CHECK(std::abs(r.e2.value) < 1e-10);
  CHECK(r.e3.value < 1e-7);
  CHECK(r.e4.value < 1e-10);
  CHECK(r.report.spread == 0.0);
  CHECK(r.report.f_bound < 1e-6);
  CHECK(r.conclusion_holds);
  CHECK(r.report.principal_angles[0] < 1e-6);
}

TEST_CASE("eigenvector comparison with a small perturbation") {
  Rng rng(10);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    const FormSpace d1 = diagonal_space({0.0, 1.0, 2.2, 3.5, 5.0, 6.1, 7.0, 8.0});
    const FormSpace d2{d1.form + 1e-3 * random_psd(rng, 8), Eigen::MatrixXd::Identity(8, 8)};
    const Eigen::MatrixXd q1 = Eigen::MatrixXd::Identity(8, 8) + 1e-4 * gaussian(rng, 8, 8);
    const Eigen::MatrixXd q2 = q1.inverse();
    try {
      const auto r = eveccomp_quantities(d1, d2, q1, q2, 2, 2);
      CHECK(r.conclusion_holds);
      CHECK(r.report.projection_residual[0] <= r.report.f_bound + 1e-12);
      ++checked;
    } catch (const Error& e) {
      CHECK((e.code() == ErrorCode::FExceedsOne || e.code() == ErrorCode::GapViolation));
    }
  }
  CHECK(checked >= 30);
}

TEST_CASE("eigenvector comparison guards") {
  const FormSpace d1 = diagonal_space({0.0, 1.0, 2.0, 3.0});
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  // Uniform shift by c: E2 = c, (E1)+ = 0, gamma = 1/2, so F = 18 c.
  const FormSpace small{d1.form + 0.01 * id, id};
  CHECK(eveccomp_quantities(d1, small, id, id, 2, 2).report.f_bound == Approx(0.18).epsilon(1e-6));
  const FormSpace big{d1.form + 0.1 * id, id};
  try {
    eveccomp_quantities(d1, big, id, id, 2, 2);
    FAIL("expected FExceedsOne");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FExceedsOne);
  }
  const FormSpace huge{d1.form + 0.8 * id, id};
  try {
    eveccomp_quantities(d1, huge, id, id, 2, 2);
    FAIL("expected GapViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GapViolation);
  }
  CHECK_THROWS_AS(eveccomp_quantities(d1, d1, id, id, 1, 2), Error);
  CHECK_THROWS_AS(eveccomp_quantities(d1, d1, id, id, 2, 3), Error);
}
