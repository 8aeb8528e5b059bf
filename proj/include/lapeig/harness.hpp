#pragma once

#include "lapeig/spectral.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lapeig {

enum class Mode { Unnormalized, Normalized };

const char* to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view text);

/// eps = c (log n / n)^{1/(m+2)} or a fixed value.
struct EpsRule {
  enum class Kind { Schedule, Fixed };
  Kind kind = Kind::Schedule;
  double value = 1.0;

  /// `auto`, `auto:<c>` or a positive number.
  static EpsRule parse(std::string_view text);
  std::string name() const;
  double eps_for(std::size_t n, int m) const;
};

struct ExperimentConfig {
  std::string manifold = "circle";
  std::string density = "const";
  std::string kernel = "indicator";
  Mode mode = Mode::Unnormalized;
  std::size_t k_max = 4;
  std::vector<std::size_t> n_grid{512, 1024, 2048, 4096};
  std::size_t trials = 20;
  std::uint64_t master_seed = 1;
  EpsRule eps_rule;
  std::size_t oracle_grid = 4096;    // 1-D oracle resolution for non-constant densities
  bool rescale_with_n = false;       // normalized mode only: the extra-1/n variant
  std::size_t threads = 1;           // trials run concurrently; results do not depend on this
  SolverOptions solver;

  /// InvalidArgument unless n_grid is strictly ascending with n >= 3, trials >= 1, k_max >= 1.
  void validate() const;
};

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::size_t k = 0;
  double eps = 0.0;
  double raw = 0.0;
  double rescaled = 0.0;
  double target = 0.0;
  double rel_error = 0.0;  // |rescaled - target| / target, absolute when target = 0
};

struct TrialFailure {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::string message;
};

struct SizeSummary {
  std::size_t n = 0;
  double eps = 0.0;
  std::vector<double> median;  // per k, over trials
  std::vector<double> iqr;     // per k
  double median_error = 0.0;   // mean over k >= 1 of the per-k medians
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<double> targets;
  std::vector<ConvergenceRow> rows;  // sorted by (n, trial, k)
  std::vector<TrialFailure> failures;
  std::vector<SizeSummary> summaries;
};

/// Target eigenvalues of Delta_rho (unnormalized) or Delta_rho^N (normalized):
/// analytic for constant densities, the 1-D oracle for the cosine circle.
std::vector<double> convergence_targets(const ExperimentConfig& config);

ConvergenceReport run_convergence(const ExperimentConfig& config);

/// Per-n summaries recomputed from rows.
std::vector<SizeSummary> summarize(const std::vector<ConvergenceRow>& rows, std::size_t k_max);

struct RateFit {
  double slope = 0.0;       // d log(error) / d log(n)
  double intercept = 0.0;
  double residual = 0.0;    // sum of squared residuals
  double slope_se = 0.0;
  double band_lo = 0.0;     // 95% t-band on the slope
  double band_hi = 0.0;
  double slope_eps = 0.0;   // d log(error) / d log(eps_n); NaN when eps does not vary
};

/// Least squares of log(median_error) against log(n) (and log(eps_n)).
/// InsufficientGrid with fewer than 3 sizes.
RateFit fit_rate(const std::vector<double>& n, const std::vector<double>& error, const std::vector<double>& eps = {});
RateFit fit_rate(const ConvergenceReport& report);

struct AlignmentTrial {
  std::size_t n = 0;
  std::size_t trial = 0;
  double max_residual = 0.0;
  std::vector<double> principal_angles;
  double mass_discrepancy = 0.0;  // max over the block of |(1/n) sum f^2 - int f^2 rho| / int f^2 rho
  bool failed = false;
  std::string message;
};

struct AlignmentSummary {
  std::size_t k = 0;
  std::size_t l = 0;
  double gap = 0.0;
  std::vector<AlignmentTrial> trials;
  /// Fraction of non-failed trials at size n whose residual is <= threshold.
  double fraction_within(std::size_t n, double threshold) const;
};

/// Compares the graph eigenvector block k..l with the analytic eigenfunctions
/// (1, cos, sin, cos 2., ... along arc length) restricted to the cloud. Needs a
/// one-dimensional model with constant density and a block closed under
/// multiplicity (GapViolation otherwise).
AlignmentSummary run_eigvec_alignment(const ExperimentConfig& config, std::size_t k, std::size_t l);

}  // namespace lapeig
