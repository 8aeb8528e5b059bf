#include "lapeig/spectral.hpp"

#include "lapeig/errors.hpp"
#include "lapeig/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lapeig {

namespace {

double gershgorin_bound(const SparseMatrix& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return std::max(rows.maxCoeff(), 1e-300);
}

// Deterministic sign: the largest-magnitude entry (lowest index on ties) is positive.
void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      const double x = std::abs(v(r, c));
      if (x > mag * (1.0 + 1e-12)) {
        mag = x;
        best = r;
      }
    }
    if (v(best, c) < 0.0) v.col(c) *= -1.0;
  }
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
  // A second pass keeps the basis orthonormal to working precision.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr2(q);
  return qr2.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

SymmetricEigen solve_symmetric(const SparseMatrix& a, std::size_t count, const SolverOptions& options) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const bool dense = options.kind == SolverKind::Dense ||
                     (options.kind == SolverKind::Auto && n <= options.dense_threshold);
  if (dense) return smallest_eigenpairs_dense(Eigen::MatrixXd(a), count);
  return smallest_eigenpairs_shift_invert(a, count, options);
}

void check_k(std::size_t n, std::size_t k) {
  if (n < 2) throw Error(ErrorCode::KTooLarge, "graph needs at least two vertices");
  if (k > n - 1) throw Error(ErrorCode::KTooLarge, "k must not exceed n - 1");
}

}  // namespace

SymmetricEigen smallest_eigenpairs_dense(const Eigen::MatrixXd& a, std::size_t count) {
  if (count > static_cast<std::size_t>(a.rows())) throw Error(ErrorCode::KTooLarge, "more eigenpairs than rows");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "dense symmetric eigensolver failed");
  const auto c = static_cast<Eigen::Index>(count);
  SymmetricEigen out;
  out.values = es.eigenvalues().head(c);
  out.vectors = es.eigenvectors().leftCols(c);
  fix_signs(out.vectors);
  return out;
}

SymmetricEigen smallest_eigenpairs_shift_invert(const SparseMatrix& a, std::size_t count, const SolverOptions& options) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (count == 0 || count > n) throw Error(ErrorCode::KTooLarge, "invalid eigenpair count");
  const std::size_t block = std::min(n, std::max<std::size_t>(2 * count, count + 8));
  const double scale = gershgorin_bound(a);
  const double delta = options.shift * scale;

  SparseMatrix shifted = a;
  for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) += delta;
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "factorization of the shifted matrix failed");

  Rng rng(options.seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(block));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = rng.normal();
  }
  x = orthonormalize(x);

  const auto wanted = static_cast<Eigen::Index>(count);
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd y = ldlt.solve(x);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "shift-invert solve failed");
    Eigen::MatrixXd q = orthonormalize(y);
    Eigen::MatrixXd aq = a * q;
    Eigen::MatrixXd h = q.transpose() * aq;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "Rayleigh-Ritz step failed");
    x = q * es.eigenvectors();
    const Eigen::MatrixXd ax = aq * es.eigenvectors();

    double worst = 0.0;
    for (Eigen::Index c = 0; c < wanted; ++c) {
      worst = std::max(worst, (ax.col(c) - es.eigenvalues()[c] * x.col(c)).norm());
    }
    if (worst <= options.tol * scale) {
      SymmetricEigen out;
      out.values = es.eigenvalues().head(wanted);
      out.vectors = x.leftCols(wanted);
      out.iterations = it;
      fix_signs(out.vectors);
      return out;
    }
  }
  throw Error(ErrorCode::SolverFailure, "shift-invert subspace iteration did not converge");
}

Eigen::VectorXd inner_product_weights(const NeighborhoodGraph& graph, InnerProduct ip) {
  const double n = static_cast<double>(graph.size());
  if (ip == InnerProduct::MeanDot) return Eigen::VectorXd::Constant(graph.degrees().size(), 1.0 / n);
  const double st = sigma_tilde_eta(graph.kernel(), graph.intrinsic_dim());
  const double scale = n * n * std::pow(graph.eps(), graph.intrinsic_dim()) * st;
  return graph.degrees() / scale;
}

Spectrum unnormalized_spectrum(const NeighborhoodGraph& graph, std::size_t k, const SolverOptions& options) {
  const std::size_t n = graph.size();
  check_k(n, k);
  SymmetricEigen eig = solve_symmetric(graph.laplacian(), k + 1, options);
  Spectrum s;
  s.values = eig.values;
  s.vectors = eig.vectors * std::sqrt(static_cast<double>(n));
  s.inner_product = InnerProduct::MeanDot;
  s.weights = inner_product_weights(graph, InnerProduct::MeanDot);
  s.k = k;
  return s;
}

Spectrum normalized_spectrum(const NeighborhoodGraph& graph, std::size_t k, const SolverOptions& options) {
  const std::size_t n = graph.size();
  check_k(n, k);
  const Eigen::VectorXd& deg = graph.degrees();
  if ((deg.array() <= 0.0).any()) throw Error(ErrorCode::SolverFailure, "normalized problem needs positive degrees");
  const Eigen::VectorXd inv_sqrt = deg.array().rsqrt();
  SparseMatrix sym = inv_sqrt.asDiagonal() * graph.laplacian() * inv_sqrt.asDiagonal();
  sym = 0.5 * (sym + SparseMatrix(sym.transpose()));
  SymmetricEigen eig = solve_symmetric(sym, k + 1, options);

  Spectrum s;
  s.values = eig.values;
  s.inner_product = InnerProduct::DegreeWeighted;
  s.weights = inner_product_weights(graph, InnerProduct::DegreeWeighted);
  s.vectors = inv_sqrt.asDiagonal() * eig.vectors;  // now v^T D v = 1
  for (Eigen::Index c = 0; c < s.vectors.cols(); ++c) {
    const double norm2 = (s.vectors.col(c).array().square() * s.weights.array()).sum();
    s.vectors.col(c) /= std::sqrt(norm2);
  }
  s.k = k;
  return s;
}

double rescale_unnormalized(double lambda, double n, double eps, double sigma_eta, int m) {
  return 2.0 * lambda / (sigma_eta * n * std::pow(eps, m + 2));
}

double rescale_normalized(double lambda, double eps, double sigma_eta, double sigma_tilde_eta) {
  return 2.0 * sigma_tilde_eta * lambda / (sigma_eta * eps * eps);
}

double rescale_normalized_with_n(double lambda, double n, double eps, double sigma_eta, double sigma_tilde_eta) {
  return rescale_normalized(lambda, eps, sigma_eta, sigma_tilde_eta) / n;
}

double rayleigh_quotient(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& u) {
  if (a.rows() != u.size() || b.rows() != u.size()) throw Error(ErrorCode::DimensionMismatch, "form and vector sizes differ");
  const double den = u.dot(b * u);
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroVector, "Rayleigh quotient of a zero vector");
  return u.dot(a * u) / den;
}

double rayleigh_quotient(const NeighborhoodGraph& graph, const Eigen::VectorXd& u, InnerProduct ip) {
  const double num = quadratic_form(graph, u);
  const double den = ip == InnerProduct::MeanDot ? u.squaredNorm() : (u.array().square() * graph.degrees().array()).sum();
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroVector, "Rayleigh quotient of a zero vector");
  return num / den;
}

double AlignmentReport::max_residual() const {
  double m = 0.0;
  for (double r : projection_residual) m = std::max(m, r);
  return m;
}

namespace {

// Columns of `basis` turned into a W-orthonormal basis of the same span.
Eigen::MatrixXd weighted_orthonormal(const Eigen::MatrixXd& basis, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd gram = basis.transpose() * w.asDiagonal() * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top) {
    throw Error(ErrorCode::DegenerateBasis, "basis is linearly dependent under the inner product");
  }
  const Eigen::MatrixXd inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return basis * inv_sqrt;
}

}  // namespace

AlignmentReport subspace_alignment(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& weights) {
  if (a.rows() != b.rows() || a.rows() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "bases and weights have different lengths");
  }
  if (a.cols() == 0 || b.cols() == 0) throw Error(ErrorCode::DegenerateBasis, "empty basis");
  const Eigen::MatrixXd qa = weighted_orthonormal(a, weights);
  const Eigen::MatrixXd qb = weighted_orthonormal(b, weights);
  const Eigen::MatrixXd cross = qa.transpose() * weights.asDiagonal() * qb;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);

  AlignmentReport r;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    r.principal_angles.push_back(std::acos(std::clamp(svd.singularValues()[i], 0.0, 1.0)));
  }
  std::sort(r.principal_angles.begin(), r.principal_angles.end());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const Eigen::VectorXd col = a.col(c);
    const double norm2 = (col.array().square() * weights.array()).sum();
    const Eigen::VectorXd coeff = qb.transpose() * weights.asDiagonal() * col;
    r.projection_residual.push_back(std::clamp(1.0 - coeff.squaredNorm() / norm2, 0.0, 1.0));
  }
  return r;
}

}  // namespace lapeig
