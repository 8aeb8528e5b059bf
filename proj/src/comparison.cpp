#include "lapeig/comparison.hpp"

#include "lapeig/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lapeig {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double rayleigh(const FormSpace& s, const Eigen::VectorXd& u) {
  const double n2 = s.norm2(u);
  if (!(n2 > 0.0)) return kInf;  // a / 0 = infinity
  return s.energy(u) / n2;
}

Eigen::VectorXd on_circle(double phi) { return Eigen::Vector2d(std::cos(phi), std::sin(phi)); }

Eigen::VectorXd on_sphere(double t, double phi) {
  return Eigen::Vector3d(std::sin(t) * std::cos(phi), std::sin(t) * std::sin(phi), std::cos(t));
}

SupEstimate sup_circle(const std::function<double(const Eigen::VectorXd&)>& f, int n) {
  std::vector<double> vals(static_cast<std::size_t>(n));
  std::size_t best = 0;
  for (int i = 0; i < n; ++i) {
    vals[static_cast<std::size_t>(i)] = f(on_circle(kPi * i / n));
    if (vals[static_cast<std::size_t>(i)] > vals[best]) best = static_cast<std::size_t>(i);
  }
  double osc = 0.0;
  for (int i = 0; i < n; ++i) {
    osc = std::max(osc, std::abs(vals[static_cast<std::size_t>(i)] - vals[static_cast<std::size_t>((i + 1) % n)]));
  }
  double center = kPi * static_cast<double>(best) / n;
  double half = kPi / n;
  double top = vals[best];
  for (int pass = 0; pass < 2; ++pass) {
    double next_center = center;
    for (int i = 0; i <= n; ++i) {
      const double phi = center - half + 2.0 * half * i / n;
      const double v = f(on_circle(phi));
      if (v > top) {
        top = v;
        next_center = phi;
      }
    }
    center = next_center;
    half = 2.0 * half / n;
  }
  const double upper = std::max(vals[best] + osc, top);
  return {top, upper - top};
}

SupEstimate sup_sphere(const std::function<double(const Eigen::VectorXd&)>& f, int n) {
  const int rows = n + 1;
  const int cols = 2 * n;
  std::vector<double> vals(static_cast<std::size_t>(rows * cols));
  auto at = [&](int i, int j) -> double& { return vals[static_cast<std::size_t>(i * cols + j)]; };
  int bi = 0;
  int bj = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      at(i, j) = f(on_sphere(kPi * i / n, kPi * j / n));
      if (at(i, j) > at(bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  }
  double osc = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      osc = std::max(osc, std::abs(at(i, j) - at(i, (j + 1) % cols)));
      if (i + 1 < rows) osc = std::max(osc, std::abs(at(i, j) - at(i + 1, j)));
    }
  }
  double ct = kPi * bi / n;
  double cp = kPi * bj / n;
  double half = kPi / n;
  double top = at(bi, bj);
  for (int pass = 0; pass < 2; ++pass) {
    double nt = ct;
    double np = cp;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double t = ct - half + 2.0 * half * i / n;
        const double p = cp - half + 2.0 * half * j / n;
        const double v = f(on_sphere(t, p));
        if (v > top) {
          top = v;
          nt = t;
          np = p;
        }
      }
    }
    ct = nt;
    cp = np;
    half = 2.0 * half / n;
  }
  const double upper = std::max(at(bi, bj) + osc, top);
  return {top, upper - top};
}

// Principal angles between span(a) and span(b) under <u, v> = u^T g v.
std::vector<double> angles_with_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& g) {
  auto orth = [&g](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * g * m);
    if (es.eigenvalues().minCoeff() <= 1e-14 * std::max(1.0, es.eigenvalues().maxCoeff())) {
      throw Error(ErrorCode::DegenerateBasis, "basis is linearly dependent under the inner product");
    }
    return Eigen::MatrixXd(m * es.operatorInverseSqrt());
  };
  const Eigen::MatrixXd cross = orth(a).transpose() * g * orth(b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    out.push_back(std::acos(std::clamp(svd.singularValues()[i], 0.0, 1.0)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_spaces(const FormSpace& d1, const FormSpace& d2, const Eigen::MatrixXd& q1) {
  if (q1.rows() != d2.dim() || q1.cols() != d1.dim()) throw Error(ErrorCode::DimensionMismatch, "Q1 must map H1 into H2");
}

}  // namespace

FormEigen form_eigen(const FormSpace& space) {
  if (space.form.rows() != space.form.cols() || space.gram.rows() != space.form.rows() ||
      space.gram.cols() != space.form.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "form and gram matrix sizes differ");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(space.form, space.gram);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "generalized eigensolve failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

SupEstimate sphere_sup(const std::function<double(const Eigen::VectorXd&)>& f, int dim, int grid_density) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "span must be nonempty");
  if (dim > 3) throw Error(ErrorCode::SpanTooLarge, "sphere grids are limited to spans of dimension 3");
  if (grid_density < 4) throw Error(ErrorCode::GridTooSmall, "grid density must be at least 4");
  if (dim == 1) return {f(Eigen::VectorXd::Ones(1)), 0.0};
  if (dim == 2) return sup_circle(f, grid_density);
  return sup_sphere(f, grid_density);
}

Eigen::MatrixXd dtilde_form(const FormSpace& space, double lambda, double lambda_prime) {
  if (!(lambda > 0.0 && lambda_prime >= lambda)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < lambda <= lambda_prime");
  }
  const FormEigen eig = form_eigen(space);
  Eigen::Index keep = 0;
  while (keep < eig.values.size() && eig.values[keep] <= lambda_prime) ++keep;
  const Eigen::MatrixXd v = eig.vectors.leftCols(keep);
  const Eigen::MatrixXd p = v * v.transpose() * space.gram;
  const Eigen::MatrixXd rest = Eigen::MatrixXd::Identity(space.dim(), space.dim()) - p;
  Eigen::MatrixXd out = p.transpose() * space.form * p + lambda * rest.transpose() * space.gram * rest;
  return 0.5 * (out + out.transpose());
}

DtildeCheck dtilde_check(const FormSpace& space, double lambda, double lambda_prime, const Eigen::MatrixXd& subspace) {
  if (subspace.rows() != space.dim() || subspace.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "subspace basis does not live in the form's space");
  }
  const Eigen::MatrixXd dt = dtilde_form(space, lambda, lambda_prime);
  const FormEigen full = form_eigen(space);
  const double scale = std::max(1.0, std::abs(full.values.maxCoeff()));

  DtildeCheck c;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> diff(space.form - dt, space.gram, Eigen::EigenvaluesOnly);
  c.domination_margin = diff.eigenvalues().minCoeff();

  const Eigen::MatrixXd sub_form = subspace.transpose() * dt * subspace;
  const Eigen::MatrixXd sub_gram = subspace.transpose() * space.gram * subspace;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> restricted(sub_form, sub_gram, Eigen::EigenvaluesOnly);
  c.min_margin = kInf;
  for (Eigen::Index j = 0; j < restricted.eigenvalues().size(); ++j) {
    c.min_margin = std::min(c.min_margin, restricted.eigenvalues()[j] - std::min(lambda, full.values[j]));
  }
  c.passed = c.domination_margin >= -1e-10 * scale && c.min_margin >= -1e-10 * scale;
  return c;
}

EvalCompCheck evalcomp_bound_check(const FormSpace& d1, const FormSpace& d2, const Eigen::MatrixXd& q1, std::size_t k,
                                   int grid_density) {
  check_spaces(d1, d2, q1);
  if (k < 1 || k > static_cast<std::size_t>(std::min(d1.dim(), d2.dim()))) {
    throw Error(ErrorCode::InvalidArgument, "k must lie in [1, min(dim H1, dim H2)]");
  }
  if (k > 3) throw Error(ErrorCode::SpanTooLarge, "evalcomp check supports spans of dimension <= 3");
  const FormEigen e1 = form_eigen(d1);
  const FormEigen e2 = form_eigen(d2);
  const Eigen::MatrixXd basis = e1.vectors.leftCols(static_cast<Eigen::Index>(k));
  auto diff = [&](const Eigen::VectorXd& c) {
    const Eigen::VectorXd f = basis * c;
    return rayleigh(d2, q1 * f) - rayleigh(d1, f);
  };
  EvalCompCheck out;
  out.e = sphere_sup(diff, static_cast<int>(k), grid_density);
  const double scale = std::max(1.0, std::abs(e2.values.maxCoeff()));
  out.passed = true;
  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double margin = e1.values[jj] + out.e.upper() - e2.values[jj];
    out.margins.push_back(margin);
    if (margin < -1e-12 * scale) out.passed = false;
  }
  return out;
}

EvecCompResult eveccomp_quantities(const FormSpace& d1, const FormSpace& d2, const Eigen::MatrixXd& q1,
                                   const Eigen::MatrixXd& q2, std::size_t k, std::size_t l, int grid_density) {
  check_spaces(d1, d2, q1);
  if (q2.rows() != d1.dim() || q2.cols() != d2.dim()) throw Error(ErrorCode::DimensionMismatch, "Q2 must map H2 into H1");
  const auto min_dim = static_cast<std::size_t>(std::min(d1.dim(), d2.dim()));
  if (k < 2 || k > l || l + 1 > min_dim) throw Error(ErrorCode::InvalidArgument, "need 2 <= k <= l <= min dim - 1");
  if (l + 1 > 3) throw Error(ErrorCode::SpanTooLarge, "eigenvector comparison needs spans of dimension <= 3");

  const FormEigen ev1 = form_eigen(d1);
  const FormEigen ev2 = form_eigen(d2);
  const auto K = static_cast<Eigen::Index>(k);
  const auto Lx = static_cast<Eigen::Index>(l);
  const Eigen::MatrixXd s_basis = ev1.vectors.middleCols(K - 1, Lx - K + 1);
  const Eigen::MatrixXd st_basis = ev2.vectors.middleCols(K - 1, Lx - K + 1);
  const Eigen::MatrixXd u_low = ev2.vectors.leftCols(Lx + 1);
  const Eigen::MatrixXd f_low = ev1.vectors.leftCols(Lx + 1);
  const int s_dim = static_cast<int>(l - k + 1);

  auto back_gap = [&](const Eigen::VectorXd& u) { return rayleigh(d1, q2 * u) - rayleigh(d2, u); };
  EvecCompResult out;
  const SupEstimate e1_low = sphere_sup([&](const Eigen::VectorXd& c) { return back_gap(u_low * c); },
                                        static_cast<int>(l + 1), grid_density);
  const SupEstimate e1_s = sphere_sup([&](const Eigen::VectorXd& c) { return back_gap(q1 * (s_basis * c)); }, s_dim,
                                      grid_density);
  out.e1 = e1_low.upper() >= e1_s.upper() ? e1_low : e1_s;
  out.e2 = sphere_sup(
      [&](const Eigen::VectorXd& c) {
        const Eigen::VectorXd f = f_low * c;
        return rayleigh(d2, q1 * f) - rayleigh(d1, f);
      },
      static_cast<int>(l + 1), grid_density);
  out.e3 = sphere_sup(
      [&](const Eigen::VectorXd& c) {
        const Eigen::VectorXd f = s_basis * c;
        const Eigen::VectorXd r = f - q2 * (q1 * f);
        return std::sqrt(d1.norm2(r) / d1.norm2(f));
      },
      s_dim, grid_density);
  out.e4 = sphere_sup(
      [&](const Eigen::VectorXd& c) {
        const Eigen::VectorXd f = s_basis * c;
        const double nf = std::sqrt(d1.norm2(f));
        return std::abs(std::sqrt(d2.norm2(q1 * f)) - nf) / nf;
      },
      s_dim, grid_density);

  const double lam_k = ev1.values[K - 1];
  const double lam_l = ev1.values[Lx - 1];
  const double gamma =
      0.5 * std::min(std::abs(lam_k - ev1.values[K - 2]), std::abs(ev1.values[Lx] - lam_l));
  const double spread = lam_l - lam_k;
  const double E1 = out.e1.upper();
  const double E2 = out.e2.upper();
  const double E3 = out.e3.upper();
  if (!(gamma > std::max(E1, E2))) throw Error(ErrorCode::GapViolation, "gap does not exceed max(E1, E2)");
  const double plus = std::max(E1, 0.0) + std::max(E2, 0.0);
  const double F = ((lam_l / gamma + 2.0) * static_cast<double>(l) + 1.0) * plus / gamma + (4.0 * lam_l * E3 + spread) / gamma;
  if (!(F < 1.0)) throw Error(ErrorCode::FExceedsOne, "F >= 1, the eigenvector comparison gives no information");

  // Projection onto S~ in H2: P v = V V^T G2 v with V gram-orthonormal.
  auto residual = [&](const Eigen::VectorXd& f) {
    const Eigen::VectorXd u = q1 * f;
    const Eigen::VectorXd pu = st_basis * (st_basis.transpose() * (d2.gram * u));
    const double nu = d2.norm2(u);
    if (!(nu > 0.0)) return 1.0;
    return d2.norm2(u - pu) / nu;
  };
  out.max_ratio = sphere_sup([&](const Eigen::VectorXd& c) { return residual(s_basis * c); }, s_dim, grid_density).value;
  out.conclusion_holds = out.max_ratio <= F + 1e-12;

  AlignmentReport& r = out.report;
  r.e1 = E1;
  r.e2 = E2;
  r.e3 = E3;
  r.e4 = out.e4.upper();
  r.f_bound = F;
  r.gap = gamma;
  r.spread = spread;
  r.principal_angles = angles_with_gram(q1 * s_basis, st_basis, d2.gram);
  for (Eigen::Index c = 0; c < s_basis.cols(); ++c) r.projection_residual.push_back(residual(s_basis.col(c)));
  return out;
}

}  // namespace lapeig
