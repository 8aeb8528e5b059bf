#include "lapeig/harness.hpp"

#include "lapeig/errors.hpp"
#include "lapeig/interp.hpp"
#include "lapeig/rng.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace lapeig {

namespace {

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Runs task(i) for i in [0, count) on up to `threads` workers.
template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

double relative_error(double value, double target) {
  if (target == 0.0) return std::abs(value);
  return std::abs(value - target) / std::abs(target);
}

// Eigenfunction j of a closed curve in its angle chart: 1, cos t, sin t, cos 2t, ...
double curve_eigenfunction(std::size_t j, double theta) {
  if (j == 0) return 1.0;
  const double p = static_cast<double>((j + 1) / 2);
  return j % 2 == 1 ? std::cos(p * theta) : std::sin(p * theta);
}

}  // namespace

const char* to_string(Mode mode) noexcept { return mode == Mode::Unnormalized ? "unnormalized" : "normalized"; }

Mode parse_mode(std::string_view text) {
  if (text == "unnormalized") return Mode::Unnormalized;
  if (text == "normalized") return Mode::Normalized;
  throw Error(ErrorCode::InvalidArgument, "unknown mode: " + std::string(text));
}

EpsRule EpsRule::parse(std::string_view text) {
  auto number = [](std::string_view body) {
    double v = 0.0;
    auto res = std::from_chars(body.data(), body.data() + body.size(), v);
    if (res.ec != std::errc{} || res.ptr != body.data() + body.size() || !(v > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "bad eps value: " + std::string(body));
    }
    return v;
  };
  if (text == "auto") return {Kind::Schedule, 1.0};
  if (text.substr(0, 5) == "auto:") return {Kind::Schedule, number(text.substr(5))};
  return {Kind::Fixed, number(text)};
}

std::string EpsRule::name() const {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  const std::string v(buf, res.ptr);
  return kind == Kind::Schedule ? "auto:" + v : v;
}

double EpsRule::eps_for(std::size_t n, int m) const {
  if (kind == Kind::Fixed) return value;
  return epsilon_schedule(static_cast<double>(n), m, value);
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw Error(ErrorCode::InvalidArgument, "n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 3) throw Error(ErrorCode::InvalidArgument, "sample sizes must be at least 3");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw Error(ErrorCode::InvalidArgument, "n grid must be ascending");
  }
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be at least 1");
  if (k_max + 1 > n_grid.front()) throw Error(ErrorCode::KTooLarge, "k_max must be below the smallest n");
}

std::vector<double> convergence_targets(const ExperimentConfig& config) {
  const ManifoldModel model = ManifoldModel::parse(config.manifold, config.density);
  const SpectrumKind which = config.mode == Mode::Unnormalized ? SpectrumKind::WeightedRho : SpectrumKind::NormalizedRho;
  if (model.density().form == DensityForm::Constant) return analytic_spectrum(model, which, config.k_max);
  return oracle_spectrum_circle_weighted(model.density(), config.oracle_grid, config.k_max, which);
}

std::vector<SizeSummary> summarize(const std::vector<ConvergenceRow>& rows, std::size_t k_max) {
  std::vector<SizeSummary> out;
  std::size_t start = 0;
  while (start < rows.size()) {
    std::size_t end = start;
    while (end < rows.size() && rows[end].n == rows[start].n) ++end;
    SizeSummary s;
    s.n = rows[start].n;
    s.eps = rows[start].eps;
    std::vector<std::vector<double>> per_k(k_max + 1);
    for (std::size_t i = start; i < end; ++i) {
      if (rows[i].k <= k_max) per_k[rows[i].k].push_back(rows[i].rel_error);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k <= k_max; ++k) {
      s.median.push_back(quantile(per_k[k], 0.5));
      s.iqr.push_back(quantile(per_k[k], 0.75) - quantile(per_k[k], 0.25));
      if (k >= 1) acc += s.median.back();
    }
    s.median_error = acc / static_cast<double>(k_max);
    out.push_back(std::move(s));
    start = end;
  }
  return out;
}

ConvergenceReport run_convergence(const ExperimentConfig& config) {
  config.validate();
  const ManifoldModel model = ManifoldModel::parse(config.manifold, config.density);
  const KernelProfile kernel = KernelProfile::parse(config.kernel);
  const int m = model.intrinsic_dim();
  const KernelConstants consts = kernel_constants(kernel, m);

  ConvergenceReport report;
  report.config = config;
  report.targets = convergence_targets(config);

  struct Outcome {
    std::vector<ConvergenceRow> rows;
    std::string error;
  };
  const std::size_t tasks = config.n_grid.size() * config.trials;
  std::vector<Outcome> outcomes(tasks);
  parallel_for(tasks, config.threads, [&](std::size_t t) {
    const std::size_t n = config.n_grid[t / config.trials];
    const std::size_t trial = t % config.trials;
    Outcome& out = outcomes[t];
    try {
      const PointCloud cloud = sample_iid(model, n, derive_seed(config.master_seed, n, trial));
      const double eps = config.eps_rule.eps_for(n, m);
      const NeighborhoodGraph graph = build_graph(cloud, kernel, eps);
      const Spectrum spec = config.mode == Mode::Unnormalized ? unnormalized_spectrum(graph, config.k_max, config.solver)
                                                              : normalized_spectrum(graph, config.k_max, config.solver);
      for (std::size_t k = 0; k <= config.k_max; ++k) {
        ConvergenceRow row;
        row.n = n;
        row.trial = trial;
        row.k = k;
        row.eps = eps;
        row.raw = spec.values[static_cast<Eigen::Index>(k)];
        if (config.mode == Mode::Unnormalized) {
          row.rescaled = rescale_unnormalized(row.raw, static_cast<double>(n), eps, consts.sigma_eta, m);
        } else if (config.rescale_with_n) {
          row.rescaled = rescale_normalized_with_n(row.raw, static_cast<double>(n), eps, consts.sigma_eta,
                                                   consts.sigma_tilde_eta);
        } else {
          row.rescaled = rescale_normalized(row.raw, eps, consts.sigma_eta, consts.sigma_tilde_eta);
        }
        row.target = report.targets[k];
        row.rel_error = relative_error(row.rescaled, row.target);
        out.rows.push_back(row);
      }
    } catch (const std::exception& e) {
      out.rows.clear();
      out.error = e.what();
    }
  });

  for (std::size_t t = 0; t < tasks; ++t) {
    if (!outcomes[t].error.empty()) {
      report.failures.push_back({config.n_grid[t / config.trials], t % config.trials, outcomes[t].error});
      continue;
    }
    report.rows.insert(report.rows.end(), outcomes[t].rows.begin(), outcomes[t].rows.end());
  }
  report.summaries = summarize(report.rows, config.k_max);
  return report;
}

RateFit fit_rate(const std::vector<double>& n, const std::vector<double>& error, const std::vector<double>& eps) {
  if (n.size() != error.size() || (!eps.empty() && eps.size() != n.size())) {
    throw Error(ErrorCode::DimensionMismatch, "rate fit inputs differ in length");
  }
  if (n.size() < 3) throw Error(ErrorCode::InsufficientGrid, "rate fit needs at least 3 sample sizes");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0) || !(error[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "rate fit needs positive values");
  }
  auto fit = [](const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept,
                double& ssr, double& sxx) {
    const double k = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0.0;
    sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    slope = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
    intercept = my - slope * mx;
    ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (intercept + slope * x[i]);
      ssr += r * r;
    }
  };
  std::vector<double> x(n.size()), y(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    x[i] = std::log(n[i]);
    y[i] = std::log(error[i]);
  }
  RateFit r;
  double sxx = 0.0;
  fit(x, y, r.slope, r.intercept, r.residual, sxx);
  const double dof = static_cast<double>(n.size()) - 2.0;
  r.slope_se = std::sqrt(r.residual / dof / sxx);
  const boost::math::students_t dist(dof);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  r.band_lo = r.slope - t * r.slope_se;
  r.band_hi = r.slope + t * r.slope_se;

  r.slope_eps = std::numeric_limits<double>::quiet_NaN();
  if (!eps.empty()) {
    std::vector<double> xe(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) xe[i] = std::log(eps[i]);
    double b = 0.0, ssr = 0.0, sxe = 0.0;
    fit(xe, y, r.slope_eps, b, ssr, sxe);
    if (!(sxe > 1e-300)) r.slope_eps = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

RateFit fit_rate(const ConvergenceReport& report) {
  std::vector<double> n, err, eps;
  for (const auto& s : report.summaries) {
    n.push_back(static_cast<double>(s.n));
    err.push_back(s.median_error);
    eps.push_back(s.eps);
  }
  return fit_rate(n, err, eps);
}

double AlignmentSummary::fraction_within(std::size_t n, double threshold) const {
  std::size_t total = 0;
  std::size_t good = 0;
  for (const auto& t : trials) {
    if (t.n != n || t.failed) continue;
    ++total;
    if (t.max_residual <= threshold) ++good;
  }
  return total == 0 ? 0.0 : static_cast<double>(good) / static_cast<double>(total);
}

AlignmentSummary run_eigvec_alignment(const ExperimentConfig& config, std::size_t k, std::size_t l) {
  config.validate();
  if (k > l) throw Error(ErrorCode::InvalidArgument, "alignment block needs k <= l");
  const ManifoldModel model = ManifoldModel::parse(config.manifold, config.density);
  if (model.intrinsic_dim() != 1) throw Error(ErrorCode::UnsupportedDimension, "alignment needs a 1-D model");
  const KernelProfile kernel = KernelProfile::parse(config.kernel);
  const SpectrumKind which = config.mode == Mode::Unnormalized ? SpectrumKind::WeightedRho : SpectrumKind::NormalizedRho;
  const std::vector<double> target = analytic_spectrum(model, which, l + 1);

  AlignmentSummary summary;
  summary.k = k;
  summary.l = l;
  const double upper_gap = target[l + 1] - target[l];
  const double lower_gap = k == 0 ? std::numeric_limits<double>::infinity() : target[k] - target[k - 1];
  summary.gap = std::min(upper_gap, lower_gap);
  if (!(summary.gap > 1e-12)) throw Error(ErrorCode::GapViolation, "block k..l splits an eigenspace");

  std::vector<double> exact_mass;
  for (std::size_t j = k; j <= l; ++j) {
    exact_mass.push_back(dirichlet_energy_1d(model, [j](double t) { return curve_eigenfunction(j, t); }, 1 << 14).mass_rho);
  }

  const std::size_t tasks = config.n_grid.size() * config.trials;
  summary.trials.resize(tasks);
  parallel_for(tasks, config.threads, [&](std::size_t t) {
    AlignmentTrial& out = summary.trials[t];
    out.n = config.n_grid[t / config.trials];
    out.trial = t % config.trials;
    try {
      const PointCloud cloud = sample_iid(model, out.n, derive_seed(config.master_seed, out.n, out.trial));
      const double eps = config.eps_rule.eps_for(out.n, model.intrinsic_dim());
      const NeighborhoodGraph graph = build_graph(cloud, kernel, eps);
      const std::size_t kk = std::max(l, config.k_max);
      const Spectrum spec = config.mode == Mode::Unnormalized ? unnormalized_spectrum(graph, kk, config.solver)
                                                              : normalized_spectrum(graph, kk, config.solver);
      const auto width = static_cast<Eigen::Index>(l - k + 1);
      Eigen::MatrixXd fvals(static_cast<Eigen::Index>(out.n), width);
      for (Eigen::Index c = 0; c < width; ++c) {
        const std::size_t j = k + static_cast<std::size_t>(c);
        fvals.col(c) = restrict_function([j](std::span<const double> p) { return curve_eigenfunction(j, p[0]); }, cloud);
        const double empirical = fvals.col(c).squaredNorm() / static_cast<double>(out.n);
        const double exact = exact_mass[static_cast<std::size_t>(c)];
        out.mass_discrepancy = std::max(out.mass_discrepancy, std::abs(empirical - exact) / exact);
      }
      const AlignmentReport rep =
          subspace_alignment(fvals, spec.vectors.middleCols(static_cast<Eigen::Index>(k), width), spec.weights);
      out.max_residual = rep.max_residual();
      out.principal_angles = rep.principal_angles;
    } catch (const std::exception& e) {
      out.failed = true;
      out.message = e.what();
    }
  });
  return summary;
}

}  // namespace lapeig
