#include "lapeig/kernels.hpp"

#include "lapeig/errors.hpp"
#include "lapeig/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace lapeig {

KernelProfile KernelProfile::indicator() {
  KernelProfile k;
  k.kind_ = KernelKind::Indicator;
  // Constant on [0, 1]; any positive bound works.
  k.lipschitz_ = 1.0;
  k.name_ = "indicator";
  return k;
}

KernelProfile KernelProfile::triangular(double slope) {
  if (!(slope > 0.0 && slope < 4.0 / 3.0)) {
    throw Error(ErrorCode::InvalidArgument, "triangular slope must lie in (0, 4/3)");
  }
  KernelProfile k;
  k.kind_ = KernelKind::Triangular;
  k.slope_ = slope;
  k.lipschitz_ = slope;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), slope);
  k.name_ = "triangular:" + std::string(buf, res.ptr);
  return k;
}

KernelProfile KernelProfile::truncated_gaussian() {
  KernelProfile k;
  k.kind_ = KernelKind::TruncatedGaussian;
  k.lipschitz_ = std::sqrt(2.0) * std::exp(-0.5);  // max of 2t e^{-t^2}
  k.name_ = "gauss";
  return k;
}

KernelProfile KernelProfile::custom(std::function<double(double)> eta, double lipschitz_bound, std::string name) {
  KernelProfile k;
  k.kind_ = KernelKind::Custom;
  k.custom_ = std::move(eta);
  k.lipschitz_ = lipschitz_bound;
  k.name_ = std::move(name);
  return k;
}

KernelProfile KernelProfile::parse(std::string_view spec) {
  if (spec == "indicator") return indicator();
  if (spec == "gauss" || spec == "gaussian") return truncated_gaussian();
  constexpr std::string_view tri = "triangular";
  if (spec.substr(0, tri.size()) == tri) {
    double c = 1.0;
    if (spec.size() > tri.size()) {
      if (spec[tri.size()] != ':') throw Error(ErrorCode::InvalidArgument, "bad kernel spec: " + std::string(spec));
      auto body = spec.substr(tri.size() + 1);
      auto res = std::from_chars(body.data(), body.data() + body.size(), c);
      if (res.ec != std::errc{} || res.ptr != body.data() + body.size()) {
        throw Error(ErrorCode::InvalidArgument, "bad triangular slope: " + std::string(body));
      }
    }
    return triangular(c);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown kernel: " + std::string(spec));
}

double KernelProfile::eval(double t) const {
  if (t > 1.0) return 0.0;
  switch (kind_) {
    case KernelKind::Indicator: return 1.0;
    case KernelKind::Triangular: return std::max(0.0, 1.0 - slope_ * t);
    case KernelKind::TruncatedGaussian: return std::exp(-t * t);
    case KernelKind::Custom: return custom_(t);
  }
  return 0.0;
}

double KernelProfile::eval_uncut(double t) const { return kind_ == KernelKind::Custom ? custom_(t) : eval(t); }

double KernelProfile::psi(double t) const {
  if (t >= 1.0) return 0.0;
  switch (kind_) {
    case KernelKind::Indicator: return 0.5 * (1.0 - t * t);
    case KernelKind::Triangular: {
      const double b = std::min(1.0, 1.0 / slope_);
      if (t >= b) return 0.0;
      return 0.5 * (b * b - t * t) - slope_ * (b * b * b - t * t * t) / 3.0;
    }
    case KernelKind::TruncatedGaussian: return 0.5 * (std::exp(-t * t) - std::exp(-1.0));
    case KernelKind::Custom: return psi_by_quadrature(*this, t);
  }
  return 0.0;
}

double KernelProfile::moment(int p) const {
  const double q = static_cast<double>(p) + 1.0;
  switch (kind_) {
    case KernelKind::Indicator: return 1.0 / q;
    case KernelKind::Triangular: {
      const double b = std::min(1.0, 1.0 / slope_);
      return std::pow(b, q) / q - slope_ * std::pow(b, q + 1.0) / (q + 1.0);
    }
    case KernelKind::TruncatedGaussian:
      // substitute u = t^2: (1/2) * lower incomplete gamma((p+1)/2, 1)
      return 0.5 * boost::math::tgamma_lower(0.5 * q, 1.0);
    case KernelKind::Custom: return moment_by_quadrature(*this, p);
  }
  return 0.0;
}

double moment_by_quadrature(const KernelProfile& kernel, int p) {
  auto f = [&](double t) { return kernel.eval(t) * std::pow(t, p); };
  if (kernel.kind() == KernelKind::Triangular && kernel.slope() > 1.0) {
    const double b = 1.0 / kernel.slope();
    return integrate(f, 0.0, b) + integrate(f, b, 1.0);
  }
  return integrate(f, 0.0, 1.0);
}

double psi_by_quadrature(const KernelProfile& kernel, double t) {
  if (t >= 1.0) return 0.0;
  auto f = [&](double s) { return kernel.eval(s) * s; };
  if (kernel.kind() == KernelKind::Triangular && kernel.slope() > 1.0) {
    const double b = 1.0 / kernel.slope();
    if (t < b) return integrate(f, t, b) + integrate(f, b, 1.0);
  }
  return integrate(f, t, 1.0);
}

double sphere_volume(int m) {
  if (m < 1 || m > 10) throw Error(ErrorCode::InvalidArgument, "intrinsic dimension must lie in [1, 10]");
  const double half = 0.5 * m;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double unit_ball_volume(int m) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "negative dimension");
  const double half = 0.5 * m;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double sigma_eta(const KernelProfile& kernel, int m) {
  return sphere_volume(m) / m * kernel.moment(m + 1);
}

double sigma_tilde_eta(const KernelProfile& kernel, int m) { return sphere_volume(m) * kernel.moment(m - 1); }

KernelConstants kernel_constants(const KernelProfile& kernel, int m) {
  return KernelConstants{m, sigma_eta(kernel, m), sigma_tilde_eta(kernel, m), sphere_volume(m)};
}

const char* to_string(KernelViolation v) noexcept {
  switch (v) {
    case KernelViolation::ViolatesMonotonicity: return "ViolatesMonotonicity";
    case KernelViolation::ViolatesSupport: return "ViolatesSupport";
    case KernelViolation::ViolatesPositivityAt34: return "ViolatesPositivityAt34";
    case KernelViolation::ViolatesLipschitz: return "ViolatesLipschitz";
  }
  return "Unknown";
}

bool KernelValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const KernelCheck& c) { return c.passed; });
}

std::vector<KernelViolation> KernelValidationReport::violations() const {
  std::vector<KernelViolation> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.kind);
  }
  return out;
}

KernelValidationReport validate_kernel(const KernelProfile& kernel, int grid_size) {
  if (grid_size < 2) throw Error(ErrorCode::GridTooSmall, "kernel validation grid needs at least 2 points");
  constexpr double upper = 1.5;
  constexpr double slack = 1e-12;
  const double h = upper / (grid_size - 1);

  KernelCheck mono{KernelViolation::ViolatesMonotonicity};
  KernelCheck support{KernelViolation::ViolatesSupport};
  KernelCheck pos{KernelViolation::ViolatesPositivityAt34};
  KernelCheck lip{KernelViolation::ViolatesLipschitz};

  double prev_t = 0.0;
  double prev = kernel.eval_uncut(0.0);
  for (int i = 1; i < grid_size; ++i) {
    const double t = i * h;
    const double v = kernel.eval_uncut(t);
    if (mono.passed && v > prev + slack) {
      mono.passed = false;
      mono.first_violation = t;
    }
    if (support.passed && t > 1.0 && v != 0.0) {
      support.passed = false;
      support.first_violation = t;
    }
    if (lip.passed && t <= 1.0 && std::abs(v - prev) > kernel.lipschitz_bound() * (t - prev_t) + slack) {
      lip.passed = false;
      lip.first_violation = t;
    }
    prev = v;
    prev_t = t;
  }
  if (!(kernel.eval(0.75) > 0.0)) {
    pos.passed = false;
    pos.first_violation = 0.75;
  }
  return KernelValidationReport{{mono, support, pos, lip}};
}

}  // namespace lapeig
