#include "lapeig/manifolds.hpp"

#include "lapeig/errors.hpp"
#include "lapeig/rng.hpp"
#include "lapeig/sensitivity.hpp"

#include <Eigen/Geometry>
#include <Eigen/SparseLU>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace lapeig {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kChartSlack = 1e-12;
constexpr std::size_t kInverseCdfTable = std::size_t{1} << 16;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double periodic_distance(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

// Largest ratio of arc to chord over a grid of point pairs on a closed curve.
template <class ArcFn, class PointFn>
double arc_chord_sup(std::size_t samples, ArcFn arc, PointFn point) {
  std::vector<std::array<double, 2>> pts(samples);
  std::vector<double> arcs(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(samples);
    pts[i] = point(x);
    arcs[i] = arc(x);
  }
  const double total = arc(1.0);
  double best = 1.0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = i + 1; j < samples; ++j) {
      const double a = std::abs(arcs[j] - arcs[i]);
      const double d = std::min(a, total - a);
      const double c = std::hypot(pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]);
      if (c > 0.0) best = std::max(best, d / c);
    }
  }
  return best;
}

}  // namespace

double circle_distance(double a, double b) noexcept { return periodic_distance(a, b, kTwoPi); }

DensitySpec DensitySpec::circle_cosine(double beta) {
  if (!(std::abs(beta) < 1.0)) throw Error(ErrorCode::InvalidArgument, "cosine density needs |beta| < 1");
  return DensitySpec{DensityForm::CircleCosine, beta};
}

DensitySpec DensitySpec::parse(std::string_view spec) {
  if (spec == "const" || spec == "constant") return constant();
  if (spec.substr(0, 4) == "cos:") {
    auto body = spec.substr(4);
    double beta = 0.0;
    auto res = std::from_chars(body.data(), body.data() + body.size(), beta);
    if (res.ec != std::errc{} || res.ptr != body.data() + body.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad density beta: " + std::string(body));
    }
    return circle_cosine(beta);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown density: " + std::string(spec));
}

std::string DensitySpec::name() const {
  if (form == DensityForm::Constant) return "const";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), beta);
  return "cos:" + std::string(buf, res.ptr);
}

ManifoldModel ManifoldModel::unit_circle(DensitySpec density) {
  ManifoldModel m;
  m.kind_ = ManifoldKind::UnitCircle;
  m.density_ = density;
  m.finalize();
  return m;
}

ManifoldModel ManifoldModel::clifford_torus() {
  ManifoldModel m;
  m.kind_ = ManifoldKind::CliffordTorus;
  m.finalize();
  return m;
}

ManifoldModel ManifoldModel::sphere2() {
  ManifoldModel m;
  m.kind_ = ManifoldKind::Sphere2;
  m.finalize();
  return m;
}

ManifoldModel ManifoldModel::square_boundary() {
  ManifoldModel m;
  m.kind_ = ManifoldKind::SquareBoundary;
  m.finalize();
  return m;
}

ManifoldModel ManifoldModel::singular_surface(const DyadicProfile& profile, double m2_radius) {
  if (!(m2_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "M2 radius must be positive");
  ManifoldModel m;
  m.kind_ = ManifoldKind::SingularSurface;
  m.m2_radius_ = m2_radius;
  m.dyadic_level_ = profile.level;
  m.curve_ = std::make_shared<const ProfileCurve>(profile.alpha);
  m.finalize();
  return m;
}

ManifoldModel ManifoldModel::parse(std::string_view manifold, std::string_view density) {
  const DensitySpec dens = DensitySpec::parse(density);
  if (manifold == "circle") return unit_circle(dens);
  if (dens.form != DensityForm::Constant) {
    throw Error(ErrorCode::UnsupportedDensity, "non-constant densities are only sampled on the circle");
  }
  if (manifold == "torus") return clifford_torus();
  if (manifold == "sphere") return sphere2();
  if (manifold == "square") return square_boundary();
  if (manifold == "singular") return singular_surface(dyadic_alpha(0.5, 12), 1.0);
  throw Error(ErrorCode::InvalidArgument, "unknown manifold: " + std::string(manifold));
}

void ManifoldModel::finalize() {
  switch (kind_) {
    case ManifoldKind::UnitCircle:
      volume_ = kTwoPi;
      bilipschitz_ = kPi / 2.0;  // antipodal points: arc pi, chord 2
      break;
    case ManifoldKind::CliffordTorus:
      volume_ = kTwoPi * kTwoPi;
      bilipschitz_ = kPi / 2.0;
      break;
    case ManifoldKind::Sphere2:
      volume_ = 4.0 * kPi;
      bilipschitz_ = kPi / 2.0;
      break;
    case ManifoldKind::SquareBoundary:
      volume_ = 4.0;
      bilipschitz_ = arc_chord_sup(
          400, [](double x) { return 4.0 * x; },
          [](double x) { return square_boundary_param(kTwoPi * x); });
      break;
    case ManifoldKind::SingularSurface: {
      const ProfileCurve& c = *curve_;
      volume_ = c.total_length() * kTwoPi * m2_radius_;
      const double profile_sup =
          arc_chord_sup(512, [&c](double x) { return c.arc_length(x); }, [&c](double x) { return c.point(x); });
      // For a product metric the ratio of root-sum-squares is bounded by the larger factor ratio.
      bilipschitz_ = std::max(profile_sup, kPi / 2.0);
      break;
    }
  }
}

std::string ManifoldModel::name() const {
  switch (kind_) {
    case ManifoldKind::UnitCircle: return "circle";
    case ManifoldKind::CliffordTorus: return "torus";
    case ManifoldKind::Sphere2: return "sphere";
    case ManifoldKind::SquareBoundary: return "square";
    case ManifoldKind::SingularSurface: return "singular";
  }
  return "unknown";
}

int ManifoldModel::intrinsic_dim() const noexcept {
  switch (kind_) {
    case ManifoldKind::UnitCircle:
    case ManifoldKind::SquareBoundary: return 1;
    default: return 2;
  }
}

int ManifoldModel::ambient_dim() const noexcept {
  switch (kind_) {
    case ManifoldKind::UnitCircle:
    case ManifoldKind::SquareBoundary: return 2;
    case ManifoldKind::Sphere2: return 3;
    default: return 4;
  }
}

double ManifoldModel::density_at(std::span<const double> p) const {
  if (density_.form == DensityForm::CircleCosine) return (1.0 + density_.beta * std::cos(p[0])) / kTwoPi;
  return 1.0 / volume_;
}

double ManifoldModel::alpha_bound() const {
  if (density_.form == DensityForm::CircleCosine) {
    const double hi = (1.0 + std::abs(density_.beta)) / kTwoPi;
    const double lo = (1.0 - std::abs(density_.beta)) / kTwoPi;
    return std::max(hi, 1.0 / lo);
  }
  const double rho = 1.0 / volume_;
  return std::max(rho, 1.0 / rho);
}

double ManifoldModel::density_lipschitz() const {
  if (density_.form == DensityForm::CircleCosine) return std::abs(density_.beta) / kTwoPi;
  return 0.0;
}

std::vector<std::pair<double, double>> ManifoldModel::chart_box() const {
  switch (kind_) {
    case ManifoldKind::UnitCircle:
    case ManifoldKind::SquareBoundary: return {{0.0, kTwoPi}};
    case ManifoldKind::CliffordTorus: return {{0.0, kTwoPi}, {0.0, kTwoPi}};
    case ManifoldKind::Sphere2: return {{0.0, kPi}, {0.0, kTwoPi}};
    case ManifoldKind::SingularSurface: return {{0.0, 1.0}, {0.0, kTwoPi}};
  }
  return {};
}

double ManifoldModel::arc_length_per_radian() const {
  switch (kind_) {
    case ManifoldKind::UnitCircle: return 1.0;
    case ManifoldKind::SquareBoundary: return 2.0 / kPi;
    default: return 0.0;
  }
}

bool ManifoldModel::in_chart(std::span<const double> p) const {
  const auto box = chart_box();
  if (p.size() != box.size()) return false;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < box[i].first - kChartSlack || p[i] > box[i].second + kChartSlack) return false;
  }
  return true;
}

void ManifoldModel::embed_into(std::span<const double> p, std::span<double> out) const {
  if (!in_chart(p)) throw Error(ErrorCode::OutOfChart, "chart coordinates outside the domain of " + name());
  if (out.size() != static_cast<std::size_t>(ambient_dim())) {
    throw Error(ErrorCode::DimensionMismatch, "output buffer has wrong ambient dimension");
  }
  switch (kind_) {
    case ManifoldKind::UnitCircle:
      out[0] = std::cos(p[0]);
      out[1] = std::sin(p[0]);
      break;
    case ManifoldKind::CliffordTorus:
      out[0] = std::cos(p[0]);
      out[1] = std::sin(p[0]);
      out[2] = std::cos(p[1]);
      out[3] = std::sin(p[1]);
      break;
    case ManifoldKind::Sphere2: {
      const double s = std::sin(p[0]);
      out[0] = s * std::cos(p[1]);
      out[1] = s * std::sin(p[1]);
      out[2] = std::cos(p[0]);
      break;
    }
    case ManifoldKind::SquareBoundary: {
      const auto q = square_boundary_param(p[0]);
      out[0] = q[0];
      out[1] = q[1];
      break;
    }
    case ManifoldKind::SingularSurface: {
      const auto q = curve_->point(p[0]);
      out[0] = q[0];
      out[1] = q[1];
      out[2] = m2_radius_ * std::cos(p[1]);
      out[3] = m2_radius_ * std::sin(p[1]);
      break;
    }
  }
}

Eigen::VectorXd ManifoldModel::embed(std::span<const double> p) const {
  Eigen::VectorXd out(ambient_dim());
  embed_into(p, {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

double ManifoldModel::intrinsic_distance(std::span<const double> p, std::span<const double> q) const {
  if (!in_chart(p) || !in_chart(q)) throw Error(ErrorCode::OutOfChart, "chart coordinates outside the domain of " + name());
  switch (kind_) {
    case ManifoldKind::UnitCircle: return circle_distance(p[0], q[0]);
    case ManifoldKind::SquareBoundary: return periodic_distance(2.0 * p[0] / kPi, 2.0 * q[0] / kPi, 4.0);
    case ManifoldKind::CliffordTorus: return std::hypot(circle_distance(p[0], q[0]), circle_distance(p[1], q[1]));
    case ManifoldKind::Sphere2: {
      const Eigen::Vector3d a = embed(p);
      const Eigen::Vector3d b = embed(q);
      return std::atan2(a.cross(b).norm(), a.dot(b));
    }
    case ManifoldKind::SingularSurface: {
      const double total = curve_->total_length();
      const double along = periodic_distance(curve_->arc_length(p[0]), curve_->arc_length(q[0]), total);
      return std::hypot(along, m2_radius_ * circle_distance(p[1], q[1]));
    }
  }
  return 0.0;
}

double ManifoldModel::volume_element(std::span<const double> p) const {
  switch (kind_) {
    case ManifoldKind::UnitCircle: return 1.0;
    case ManifoldKind::SquareBoundary: return 2.0 / kPi;
    case ManifoldKind::CliffordTorus: return 1.0;
    case ManifoldKind::Sphere2: return std::sin(p[0]);
    case ManifoldKind::SingularSurface: return curve_->speed(p[0]) * m2_radius_;
  }
  return 0.0;
}

PointCloud make_cloud(const ManifoldModel& model, RowMatrix params, std::uint64_t seed) {
  if (params.cols() != model.intrinsic_dim()) throw Error(ErrorCode::DimensionMismatch, "chart dimension mismatch");
  PointCloud cloud{model, seed, std::move(params), RowMatrix(0, 0)};
  const std::size_t n = cloud.size();
  const int d = model.ambient_dim();
  cloud.ambient.resize(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) {
    model.embed_into(cloud.param(i), {cloud.ambient.data() + i * d, static_cast<std::size_t>(d)});
  }
  return cloud;
}

PointCloud sample_iid(const ManifoldModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::EmptyCloud, "sample size must be positive");
  if (model.density().form != DensityForm::Constant && model.kind() != ManifoldKind::UnitCircle) {
    throw Error(ErrorCode::UnsupportedDensity, "no sampler for a non-constant density on " + model.name());
  }
  Rng rng(seed);
  RowMatrix params(static_cast<Eigen::Index>(n), model.intrinsic_dim());
  switch (model.kind()) {
    case ManifoldKind::UnitCircle:
      if (model.density().form == DensityForm::CircleCosine) {
        const double beta = model.density().beta;
        std::vector<double> cdf(kInverseCdfTable + 1);
        for (std::size_t j = 0; j <= kInverseCdfTable; ++j) {
          const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(kInverseCdfTable);
          cdf[j] = (t + beta * std::sin(t)) / kTwoPi;
        }
        cdf.back() = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double u = rng.uniform();
          auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
          const std::size_t j = static_cast<std::size_t>(std::distance(cdf.begin(), it)) - 1;
          const double frac = (u - cdf[j]) / (cdf[j + 1] - cdf[j]);
          const double t = kTwoPi * (static_cast<double>(j) + frac) / static_cast<double>(kInverseCdfTable);
          params(static_cast<Eigen::Index>(i), 0) = wrap_angle(t);
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) params(static_cast<Eigen::Index>(i), 0) = kTwoPi * rng.uniform();
      }
      break;
    case ManifoldKind::SquareBoundary:
      for (std::size_t i = 0; i < n; ++i) params(static_cast<Eigen::Index>(i), 0) = kTwoPi * rng.uniform();
      break;
    case ManifoldKind::CliffordTorus:
      for (std::size_t i = 0; i < n; ++i) {
        params(static_cast<Eigen::Index>(i), 0) = kTwoPi * rng.uniform();
        params(static_cast<Eigen::Index>(i), 1) = kTwoPi * rng.uniform();
      }
      break;
    case ManifoldKind::Sphere2:
      for (std::size_t i = 0; i < n; ++i) {
        Eigen::Vector3d g;
        do {
          g = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
        } while (g.norm() < 1e-12);
        g.normalize();
        params(static_cast<Eigen::Index>(i), 0) = std::acos(std::clamp(g.z(), -1.0, 1.0));
        params(static_cast<Eigen::Index>(i), 1) = wrap_angle(std::atan2(g.y(), g.x()));
      }
      break;
    case ManifoldKind::SingularSurface: {
      const ProfileCurve& curve = *model.profile_curve();
      const double bound = curve.max_speed();
      for (std::size_t i = 0; i < n; ++i) {
        double x = 0.0;
        do {
          x = rng.uniform();
        } while (rng.uniform() * bound > curve.speed(x));
        params(static_cast<Eigen::Index>(i), 0) = x;
        params(static_cast<Eigen::Index>(i), 1) = kTwoPi * rng.uniform();
      }
      break;
    }
  }
  return make_cloud(model, std::move(params), seed);
}

namespace {

std::vector<double> laplacian_spectrum(const ManifoldModel& model, std::size_t count) {
  std::vector<double> out;
  out.reserve(count + 8);
  switch (model.kind()) {
    case ManifoldKind::UnitCircle:
    case ManifoldKind::SquareBoundary: {
      // The square boundary has perimeter 4: frequencies 2 pi j / 4.
      const double scale = model.kind() == ManifoldKind::UnitCircle ? 1.0 : kPi / 2.0;
      out.push_back(0.0);
      for (std::size_t j = 1; out.size() < count; ++j) {
        const double v = std::pow(scale * static_cast<double>(j), 2);
        out.push_back(v);
        out.push_back(v);
      }
      break;
    }
    case ManifoldKind::CliffordTorus: {
      long radius = 1;
      for (;;) {
        std::vector<double> vals;
        const long r2 = radius * radius;
        for (long j = -radius; j <= radius; ++j) {
          for (long l = -radius; l <= radius; ++l) {
            if (j * j + l * l <= r2) vals.push_back(static_cast<double>(j * j + l * l));
          }
        }
        if (vals.size() >= count) {
          std::sort(vals.begin(), vals.end());
          out = std::move(vals);
          break;
        }
        ++radius;
      }
      break;
    }
    case ManifoldKind::Sphere2:
      for (long l = 0; out.size() < count; ++l) {
        for (long i = 0; i < 2 * l + 1; ++i) out.push_back(static_cast<double>(l * (l + 1)));
      }
      break;
    case ManifoldKind::SingularSurface:
      throw Error(ErrorCode::NoAnalyticSpectrum, "no analytic spectrum for the singular surface");
  }
  out.resize(count);
  return out;
}

// Inertia count: number of eigenvalues of (A - sigma M) below zero for a
// periodic tridiagonal A (diag, off with off[N-1] the corner) and diagonal M.
std::size_t count_below(const std::vector<double>& diag, const std::vector<double>& off,
                        const std::vector<double>& mass, double sigma) {
  const std::size_t n = diag.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - sigma * mass[i];
  std::vector<double> next(off.begin(), off.end() - 1);  // (i, i+1)
  double far = off[n - 1];                               // (i, n-1) for the current row
  double last = d[n - 1];
  std::size_t negatives = 0;
  constexpr double tiny = 1e-300;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double pivot = i == 0 ? d[0] : d[i];
    if (pivot == 0.0) pivot = tiny;
    if (pivot < 0.0) ++negatives;
    const double e = next[i];
    if (i + 1 < n - 1) {
      d[i + 1] -= e * e / pivot;
      const double f = far;
      last -= f * f / pivot;
      const double new_far = -e * f / pivot;
      if (i + 2 == n - 1) {
        next[i + 1] += new_far;
        far = 0.0;
      } else {
        far = new_far;
      }
    } else {
      last -= e * e / pivot;
    }
  }
  if (last < 0.0) ++negatives;
  return negatives;
}

// Shift-invert steps from a bisection estimate, finished with a Rayleigh
// quotient. The inertia count is only good to about eps * ||A|| and can split
// a degenerate pair at that level; the quotient is accurate to its square.
double polish_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off,
                         const std::vector<double>& mass, double sigma) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(3 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    trips.emplace_back(i, i, diag[static_cast<std::size_t>(i)]);
    trips.emplace_back(i, j, off[static_cast<std::size_t>(i)]);
    trips.emplace_back(j, i, off[static_cast<std::size_t>(i)]);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  const Eigen::Map<const Eigen::VectorXd> m(mass.data(), n);
  Eigen::SparseMatrix<double> shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma * m[i];
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(shifted);
  if (lu.info() != Eigen::Success) return sigma;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + std::sin(0.7 * static_cast<double>(i) + 0.3);
  for (int it = 0; it < 4; ++it) {
    x = lu.solve(m.cwiseProduct(x)).eval();
    if (!x.allFinite()) return sigma;
    x /= x.norm();
  }
  const double q = x.dot(a * x) / x.dot(m.cwiseProduct(x));
  return std::abs(q - sigma) <= 1e-6 * (1.0 + std::abs(sigma)) ? q : sigma;
}

}  // namespace

std::vector<double> analytic_spectrum(const ManifoldModel& model, SpectrumKind which, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (which != SpectrumKind::Unweighted && model.density().form != DensityForm::Constant) {
    throw Error(ErrorCode::NoAnalyticSpectrum, "weighted spectra need a constant density");
  }
  std::vector<double> values = laplacian_spectrum(model, k + 1);
  if (which == SpectrumKind::WeightedRho) {
    const double rho = 1.0 / model.volume();
    for (double& v : values) v *= rho;
  }
  return values;
}

std::vector<double> oracle_spectrum_circle_weighted(const DensitySpec& density, std::size_t grid_size, std::size_t k,
                                                    SpectrumKind which) {
  if (grid_size < 64) throw Error(ErrorCode::GridTooSmall, "oracle grid needs at least 64 nodes");
  if (k + 1 > grid_size) throw Error(ErrorCode::KTooLarge, "more eigenvalues requested than grid nodes");
  const ManifoldModel circle = ManifoldModel::unit_circle(density);
  const std::size_t n = grid_size;
  const double h = kTwoPi / static_cast<double>(n);
  auto rho = [&](double t) { return circle.density_at(std::span<const double>(&t, 1)); };

  const int stiff_power = which == SpectrumKind::Unweighted ? 0 : 2;
  const int mass_power = which == SpectrumKind::Unweighted ? 0 : (which == SpectrumKind::WeightedRho ? 1 : 2);

  std::vector<double> diag(n, 0.0), off(n, 0.0), mass(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * h;
    const double w = std::pow(rho(mid), stiff_power) / h;
    diag[i] += w;
    diag[(i + 1) % n] += w;
    off[i] = -w;  // couples i and i+1; off[n-1] is the periodic corner
    mass[i] = h * std::pow(rho(static_cast<double>(i) * h), mass_power);
  }
  double upper = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = off[(i + n - 1) % n];
    upper = std::max(upper, (diag[i] + std::abs(off[i]) + std::abs(left)) / mass[i]);
  }

  std::vector<double> values(k + 1);
  for (std::size_t j = 0; j <= k; ++j) {
    double lo = -1e-9 * upper - 1e-12;
    double hi = upper;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * upper; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(diag, off, mass, mid) > j) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    values[j] = polish_eigenvalue(diag, off, mass, 0.5 * (lo + hi));
  }
  values[0] = 0.0;  // constants span the kernel exactly; bisection only lands near it
  return values;
}

}  // namespace lapeig
