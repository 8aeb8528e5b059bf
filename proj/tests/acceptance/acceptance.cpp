// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include "lapeig/comparison.hpp"
#include "lapeig/dyadic.hpp"
#include "lapeig/errors.hpp"
#include "lapeig/graph.hpp"
#include "lapeig/harness.hpp"
#include "lapeig/interp.hpp"
#include "lapeig/io.hpp"
#include "lapeig/kernels.hpp"
#include "lapeig/rng.hpp"
#include "lapeig/sensitivity.hpp"
#include "lapeig/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

using namespace lapeig;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

NeighborhoodGraph graph_from(std::initializer_list<std::initializer_list<double>> rows, double eps) {
  RowMatrix p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) p(i, j++) = v;
    ++i;
  }
  return build_graph(p, KernelProfile::indicator(), eps, 1);
}

Outcome ac1() {
  const auto tri = unnormalized_spectrum(graph_from({{0.0}, {0.1}, {0.2}}, 1.0), 2).values;
  const auto path = graph_from({{0.0}, {1.0}, {2.0}}, 1.5);
  const auto un = unnormalized_spectrum(path, 2).values;
  const auto nn = normalized_spectrum(path, 2).values;
  const bool ok = near(tri[0], 0, 1e-9) && near(tri[1], 3, 1e-9) && near(tri[2], 3, 1e-9) && near(un[0], 0, 1e-9) &&
                  near(un[1], 1, 1e-9) && near(un[2], 3, 1e-9) && near(nn[0], 0, 1e-9) && near(nn[1], 0.5, 1e-9) &&
                  near(nn[2], 7.0 / 6, 1e-9);
  return {ok, "triangle {" + fmt(tri[1]) + "," + fmt(tri[2]) + "} path {" + fmt(un[1]) + "," + fmt(un[2]) +
                  "} normalized {" + fmt(nn[1]) + "," + fmt(nn[2]) + "}"};
}

Outcome ac2() {
  const auto k = KernelProfile::indicator();
  const double s = sigma_eta(k, 1);
  const double st = sigma_tilde_eta(k, 1);
  const double p0 = k.psi(0.0);
  return {near(s, 2.0 / 3, 1e-10) && near(st, 2.0, 1e-10) && near(p0, 0.5, 1e-10),
          "sigma " + fmt(s) + " sigma_tilde " + fmt(st) + " psi(0) " + fmt(p0)};
}

ExperimentConfig experiment(std::string manifold, std::string density, Mode mode, std::vector<std::size_t> grid) {
  ExperimentConfig c;
  c.manifold = std::move(manifold);
  c.density = std::move(density);
  c.mode = mode;
  c.n_grid = std::move(grid);
  c.trials = 20;
  c.k_max = 4;
  c.master_seed = 20240601;
  c.threads = worker_count();
  return c;
}

// Largest per-k median relative error over k in [lo, hi] at the last size.
double worst_median(const ConvergenceReport& r, std::size_t lo, std::size_t hi) {
  double worst = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) worst = std::max(worst, r.summaries.back().median[k]);
  return worst;
}

Outcome ac3() {
  const ConvergenceReport r =
      run_convergence(experiment("circle", "const", Mode::Unnormalized, {512, 1024, 2048, 4096}));
  bool monotone = true;
  std::string curve;
  for (std::size_t i = 0; i < r.summaries.size(); ++i) {
    curve += (i ? "," : "") + fmt(r.summaries[i].median_error);
    if (i > 0 && r.summaries[i].median_error > r.summaries[i - 1].median_error) monotone = false;
  }
  const double worst = worst_median(r, 1, 4);
  const double slope = fit_rate(r).slope;
  return {r.failures.empty() && worst <= 0.2 && monotone && slope < 0,
          "worst median at 4096 " + fmt(worst) + ", medians {" + curve + "}, slope " + fmt(slope)};
}

Outcome ac4() {
  const ConvergenceReport r = run_convergence(experiment("circle", "const", Mode::Normalized, {4096}));
  const double worst = worst_median(r, 1, 4);
  return {r.failures.empty() && worst <= 0.2, "worst median at 4096 " + fmt(worst)};
}

Outcome ac5() {
  ExperimentConfig c = experiment("square", "const", Mode::Unnormalized, {4096});
  c.k_max = 2;
  const ConvergenceReport r = run_convergence(c);
  const double target = 0.25 * (kPi / 2) * (kPi / 2);
  const bool targets_ok = near(r.targets[1], target, 1e-12) && near(r.targets[2], target, 1e-12);
  const double worst = worst_median(r, 1, 2);
  return {r.failures.empty() && targets_ok && worst <= 0.25,
          "worst median at 4096 " + fmt(worst) + " against " + fmt(target)};
}

Outcome ac6() {
  ExperimentConfig c = experiment("circle", "cos:0.5", Mode::Unnormalized, {4096});
  c.k_max = 2;
  c.oracle_grid = 4096;
  const ConvergenceReport r = run_convergence(c);
  const double worst = worst_median(r, 1, 2);
  return {r.failures.empty() && worst <= 0.25, "worst median at 4096 " + fmt(worst)};
}

Outcome ac7() {
  ExperimentConfig c = experiment("circle", "const", Mode::Unnormalized, {4096});
  const AlignmentSummary s = run_eigvec_alignment(c, 1, 2);
  const double within = s.fraction_within(4096, 0.1);
  double mass = 0.0;
  bool failed = false;
  for (const auto& t : s.trials) {
    failed = failed || t.failed;
    if (!t.failed) mass = std::max(mass, t.mass_discrepancy);
  }
  return {!failed && within >= 0.8 && mass <= 0.05,
          "fraction within 0.1: " + fmt(within) + ", worst mass discrepancy " + fmt(mass)};
}

Outcome ac8() {
  const std::size_t n = 2048;
  const PointCloud cloud = sample_iid(ManifoldModel::unit_circle(), n, 99);
  const double eps = epsilon_schedule(static_cast<double>(n), 1);
  const InterpolationContext ctx(cloud, KernelProfile::indicator(), eps);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  const Eigen::VectorXd f = restrict_function([](std::span<const double> p) { return std::sin(p[0]); }, cloud);
  Rng rng(100);
  bool exact = true;
  double worst = 0.0;
  for (int q = 0; q < 100; ++q) {
    const double x = 2 * kPi * rng.uniform();
    const std::span<const double> at(&x, 1);
    exact = exact && lambda_eps_eval(ctx, ones, at) == 1.0;
    worst = std::max(worst, std::abs(lambda_eps_eval(ctx, f, at) - std::sin(x)));
  }
  return {exact && worst <= eps, "constants reproduced: " + std::string(exact ? "yes" : "no") + ", max |error| " +
                                     fmt(worst) + " vs eps " + fmt(eps)};
}

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

Outcome ac9() {
  Rng rng(424242);
  int violations = 0;
  int evec_applied = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index dim = 3 + t % 6;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    // D1 with generalized eigenvalues i + u/2 under a random Gram matrix B^T B.
    const Eigen::MatrixXd b = id + 0.3 * gaussian(rng, dim, dim) / std::sqrt(static_cast<double>(dim));
    const Eigen::MatrixXd u = gaussian(rng, dim, dim).householderQr().householderQ();
    Eigen::VectorXd spectrum(dim);
    for (Eigen::Index i = 0; i < dim; ++i) spectrum[i] = static_cast<double>(i) + 0.5 * rng.uniform();
    const FormSpace d1{b.transpose() * u * spectrum.asDiagonal() * u.transpose() * b, b.transpose() * b};
    const double scale = std::pow(10.0, -2.0 - 2.0 * rng.uniform());
    const FormSpace d2{d1.form + scale * random_psd(rng, dim), d1.gram + scale * random_psd(rng, dim)};
    const Eigen::MatrixXd q1 = id + scale * gaussian(rng, dim, dim);
    const Eigen::MatrixXd q2 = q1.inverse();

    const FormEigen eig = form_eigen(d1);
    const double lambda = eig.values[dim / 2];
    const auto dt = dtilde_check(d1, lambda, lambda + 0.05, gaussian(rng, dim, 1 + t % 3));
    if (!dt.passed) ++violations;

    const auto ev = evalcomp_bound_check(d1, d2, q1, static_cast<std::size_t>(1 + t % 3));
    if (!ev.passed) ++violations;

    try {
      const auto ec = eveccomp_quantities(d1, d2, q1, q2, 2, 2);
      ++evec_applied;
      if (!ec.conclusion_holds) ++violations;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GapViolation && e.code() != ErrorCode::FExceedsOne) throw;
    }
  }
  return {violations == 0 && evec_applied >= 50,
          std::to_string(violations) + " violations; eigenvector bound applicable on " + std::to_string(evec_applied) +
              " of 100 pairs"};
}

Outcome ac10() {
  SensitivityConfig c;
  c.alpha = 0.0;
  c.m2_radius = 1.0;
  c.eps_grid = {0.2, 0.1, 0.05, 0.025};
  const auto rows = sensitivity_sweep(c);
  const double rhs = sensitivity_l1_limit(c, 2);
  bool ok = rows.size() == 4;
  std::string l1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    l1 += (i ? "," : "") + fmt(rows[i].l1_deviation);
    ok = ok && rows[i].l1_deviation > 0.5 * rhs;
    if (i >= 2) ok = ok && std::abs(rows[i].l1_deviation - rhs) <= 0.2 * rhs;
    if (i >= 1) ok = ok && std::abs(rows[i].midpoint_deviation) * 2 <= std::abs(rows[i - 1].midpoint_deviation);
  }
  return {ok, "L1 {" + l1 + "} vs limit " + fmt(rhs) + ", midpoint " + fmt(rows.front().midpoint_deviation) + " -> " +
                  fmt(rows.back().midpoint_deviation)};
}

Outcome ac11() {
  bool ok = true;
  std::string why;
  auto require = [&](bool cond, const char* what) {
    if (!cond && ok) why = what;
    ok = ok && cond;
  };
  const DyadicProfile base = dyadic_alpha(0.5, 1);
  require(base.alpha == std::vector<double>{0.0, 1.0, 0.0}, "base values");

  const int top = 12;
  const ExactDyadicProfile full = dyadic_alpha_exact(1, 2, top);
  std::vector<DyadicSlopes<Rational>> s(1);
  std::vector<ExactDyadicProfile> levels(1);
  for (int n = 1; n <= top; ++n) {
    levels.push_back(full.restricted(n));
    s.push_back(dyadic_slopes(levels.back()));
  }
  // f_j at x = i / 2^level, by exact linear interpolation of the level-j values.
  auto value_at = [&](int j, std::size_t i, int level) {
    const auto& a = levels[j].alpha;
    const std::size_t ratio = std::size_t{1} << (level - j);
    const std::size_t k = std::min(i / ratio, a.size() - 2);
    const Rational frac = Rational(static_cast<std::int64_t>(i - k * ratio)) / static_cast<std::int64_t>(ratio);
    return Rational((1 - frac) * a[k] + frac * a[k + 1]);
  };
  auto sup_gap = [&](int j, int level) {
    Rational best = 0;
    for (std::size_t i = 1; i < (std::size_t{1} << level); i += 2) {
      best = std::max(best, Rational(abs(value_at(j, i, level) - value_at(j - 1, i, level))));
    }
    return best;
  };
  double lip = 0.0;
  for (int n = 2; n <= top; ++n) {
    const Rational t = full.theta[n];
    const auto& d = s[n].d;
    const auto& d1 = s[n - 1].d;
    const auto& e = s[n].e;
    const auto& e1 = s[n - 1].e;
    const std::size_t half = e1.size();
    for (std::size_t k = 0; k < (std::size_t{1} << (n - 2)); ++k) {
      require(d[4 * k] == t / 2 * d1[2 * k + 1] + (1 - t / 2) * d1[2 * k], "(ii) 4k");
      require(d[4 * k + 1] == -t / 2 * d1[2 * k + 1] + (1 + t / 2) * d1[2 * k], "(ii) 4k+1");
      require(d[4 * k + 2] == (1 + t / 2) * d1[2 * k + 1] - t / 2 * d1[2 * k], "(ii) 4k+2");
      require(d[4 * k + 3] == (1 - t / 2) * d1[2 * k + 1] + t / 2 * d1[2 * k], "(ii) 4k+3");
      require(e[4 * k] == t / 2 * e1[2 * k + 1] + e1[2 * k] + t / 2 * e1[(2 * k + half - 1) % half], "(iii) 4k");
      require(e[4 * k + 1] == -t * e1[2 * k + 1], "(iii) 4k+1");
      require(e[4 * k + 2] == (1 + t) * e1[2 * k + 1], "(iii) 4k+2");
      require(e[4 * k + 3] == -t * e1[2 * k + 1], "(iii) 4k+3");
      if (n >= 3) {
        require(d[4 * k] == t * s[n - 2].d[k] + (1 - t) * d1[2 * k], "(ii) two-level 4k");
        require(d[4 * k + 3] == t * s[n - 2].d[k] + (1 - t) * d1[2 * k + 1], "(ii) two-level 4k+3");
        require(e[4 * k] == t * s[n - 2].e[k] + (1 - t) * e1[2 * k], "(iii) two-level 4k");
      }
    }
    // (i): on the points of D_n \ D_{n-1}, |f_n - f_{n-1}| peaks at theta(n) times the
    // f_{n-1} - f_{n-2} gap on the same points, and at theta(n)/2 times that gap on D_{n-1}.
    if (n >= 3) {
      const Rational now = sup_gap(n, n);
      require(now == t * sup_gap(n - 1, n), "(i) same points");
      require(now == t / 2 * sup_gap(n - 1, n - 1), "(i) previous level");
    }
    require(s[n].total <= (1 + 4 * t) * s[n - 1].total, "E_n recursion");
    for (const auto& x : e) require(x != 0, "e_n vanishes");
    for (const auto& x : d) lip = std::max(lip, std::abs(x.convert_to<double>()));
  }
  require(lip <= 2 * std::exp(0.5), "Lipschitz bound");
  const double c0 = isometry_constant(std::vector<double>(33, 0.0));
  require(c0 == 1.0, "isometry constant of the zero profile");
  return {ok, ok ? "identities exact for n <= 12, max |d_n| " + fmt(lip) + ", c(0) = " + fmt(c0) : "failed: " + why};
}

Outcome ac12() {
  ExperimentConfig c;
  c.n_grid = {256, 512, 1024};
  c.trials = 4;
  c.master_seed = 31337;
  const std::string a = report_csv(run_convergence(c));
  c.threads = worker_count() + 1;
  const std::string b = report_csv(run_convergence(c));
  const std::string again = report_csv(run_convergence(c));
  return {a == b && b == again, std::to_string(a.size()) + " bytes, repeated runs " + (a == b && b == again ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by tag, e.g. `AC3 AC9`.
  const std::vector<std::string> only(argv + 1, argv + argc);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"AC1 exact small spectra", ac1},        {"AC2 kernel constants", ac2},
      {"AC3 circle convergence", ac3},         {"AC4 normalized convergence", ac4},
      {"AC5 square boundary", ac5},            {"AC6 non-constant density", ac6},
      {"AC7 eigenvector alignment", ac7},      {"AC8 interpolation", ac8},
      {"AC9 comparison inequalities", ac9}, {"AC10 corner sensitivity", ac10},
      {"AC11 dyadic construction", ac11},      {"AC12 determinism", ac12},
  };
  int failed = 0;
  for (const auto& [name, run] : checks) {
    const std::string tag(name, std::string_view(name).find(' '));
    if (!only.empty() && std::find(only.begin(), only.end(), tag) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
