#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lapeig {

enum class KernelKind { Indicator, Triangular, TruncatedGaussian, Custom };

/// A radial profile eta: [0, inf) -> [0, inf) used to weight graph edges.
///
/// Admissible profiles are non-increasing, vanish on (1, inf), are positive at
/// 3/4 and Lipschitz on [0, 1]. The built-in profiles satisfy this by
/// construction; `Custom` profiles exist for validation and testing and are
/// only checked by `validate_kernel`.
///
/// The truncated Gaussian jumps from e^{-1} to 0 at t = 1. Only the restriction
/// to [0, 1] has to be Lipschitz, so the jump is admissible.
class KernelProfile {
 public:
  static KernelProfile indicator();
  /// eta(t) = max(0, 1 - slope t) on [0, 1]; requires 0 < slope < 4/3.
  static KernelProfile triangular(double slope);
  /// eta(t) = exp(-t^2) on [0, 1].
  static KernelProfile truncated_gaussian();
  static KernelProfile custom(std::function<double(double)> eta, double lipschitz_bound, std::string name);

  /// Parses `indicator`, `triangular:<c>` or `gauss`.
  static KernelProfile parse(std::string_view spec);

  KernelKind kind() const noexcept { return kind_; }
  double slope() const noexcept { return slope_; }
  const std::string& name() const noexcept { return name_; }
  double lipschitz_bound() const noexcept { return lipschitz_; }
  double eta_at_34() const { return eval(0.75); }

  /// eta(t); exactly 0 for t > 1.
  double eval(double t) const;
  double operator()(double t) const { return eval(t); }
  /// The profile as supplied, before the t > 1 cutoff (differs from eval only for custom kernels).
  double eval_uncut(double t) const;

  /// psi(t) = int_t^inf eta(s) s ds.
  double psi(double t) const;

  /// int_0^1 eta(t) t^p dt, closed form for built-in profiles.
  double moment(int p) const;

 private:
  KernelProfile() = default;

  KernelKind kind_ = KernelKind::Indicator;
  double slope_ = 0.0;
  double lipschitz_ = 1.0;
  std::string name_;
  std::function<double(double)> custom_;
};

/// Vol(S^{m-1}) = 2 pi^{m/2} / Gamma(m/2); 1 <= m <= 10.
double sphere_volume(int m);
/// Lebesgue volume of the unit ball in R^m (m >= 0).
double unit_ball_volume(int m);

/// Vol(S^{m-1})/m * int_0^1 eta(t) t^{m+1} dt.
double sigma_eta(const KernelProfile& kernel, int m);
/// Vol(S^{m-1}) * int_0^1 eta(t) t^{m-1} dt.
double sigma_tilde_eta(const KernelProfile& kernel, int m);

/// Same moments through generic adaptive quadrature of eval(); used to cross
/// check the closed forms.
double moment_by_quadrature(const KernelProfile& kernel, int p);
double psi_by_quadrature(const KernelProfile& kernel, double t);

struct KernelConstants {
  int m = 1;
  double sigma_eta = 0.0;
  double sigma_tilde_eta = 0.0;
  double sphere_volume = 0.0;
};

KernelConstants kernel_constants(const KernelProfile& kernel, int m);

enum class KernelViolation { ViolatesMonotonicity, ViolatesSupport, ViolatesPositivityAt34, ViolatesLipschitz };

const char* to_string(KernelViolation v) noexcept;

struct KernelCheck {
  KernelViolation kind;
  bool passed = true;
  std::optional<double> first_violation;  // grid point where the check first failed
};

struct KernelValidationReport {
  std::vector<KernelCheck> checks;

  bool all_passed() const;
  std::vector<KernelViolation> violations() const;
};

/// Evaluates eta on a uniform grid of [0, 1.5] and checks the admissibility
/// conditions one by one.
KernelValidationReport validate_kernel(const KernelProfile& kernel, int grid_size);

}  // namespace lapeig
