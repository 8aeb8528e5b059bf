#pragma once

// Finite-dimensional eigenvalue and eigenvector comparison between two
// symmetric forms linked by linear maps Q1: H1 -> H2 and Q2: H2 -> H1.
// The supremum quantities are estimated on sphere grids over spans of
// dimension at most 3, and every estimate carries an explicit slack so the
// checks compare against an upper bound rather than the grid maximum.

#include "lapeig/spectral.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace lapeig {

/// A symmetric form D(u, v) = u^T form v on R^dim with inner product u^T gram v.
struct FormSpace {
  Eigen::MatrixXd form;
  Eigen::MatrixXd gram;

  Eigen::Index dim() const { return form.rows(); }
  double norm2(const Eigen::VectorXd& u) const { return u.dot(gram * u); }
  double energy(const Eigen::VectorXd& u) const { return u.dot(form * u); }
};

struct FormEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // gram-orthonormal columns
};

FormEigen form_eigen(const FormSpace& space);

struct SupEstimate {
  double value = 0.0;  // largest grid value after refinement
  double slack = 0.0;  // allowance for the grid modulus
  double upper() const { return value + slack; }
};

/// sup of an even function over the unit sphere of R^dim, dim in {1, 2, 3}:
/// `grid_density` points per angle, then two local refinement passes around
/// the best node. The slack is the largest difference between neighbouring
/// nodes of the coarse grid.
SupEstimate sphere_sup(const std::function<double(const Eigen::VectorXd&)>& f, int dim, int grid_density);

/// D~(u, v) = D(P u, P v) + lambda <(1 - P) u, (1 - P) v>, P the projection
/// onto eigenvectors of D with eigenvalue <= lambda_prime.
Eigen::MatrixXd dtilde_form(const FormSpace& space, double lambda, double lambda_prime);

struct DtildeCheck {
  double domination_margin = 0.0;  // smallest eigenvalue of D - D~ relative to the gram
  double min_margin = 0.0;         // min_j lambda_j(D~|_L) - min(lambda, lambda_j(D))
  bool passed = false;
};

/// Checks D >= D~ and lambda_j(D~|_L) >= min(lambda, lambda_j(D)) for the
/// subspace L spanned by the columns of `subspace`.
DtildeCheck dtilde_check(const FormSpace& space, double lambda, double lambda_prime, const Eigen::MatrixXd& subspace);

struct EvalCompCheck {
  SupEstimate e;
  std::vector<double> margins;  // lambda_j(D1) + E + slack - lambda_j(D2), j = 1..k
  bool passed = false;
};

/// lambda_j(D2) <= lambda_j(D1) + E for j <= k, E the sup over span{f_1..f_k}
/// of R2(Q1 f) - R1(f). SpanTooLarge for k > 3.
EvalCompCheck evalcomp_bound_check(const FormSpace& d1, const FormSpace& d2, const Eigen::MatrixXd& q1, std::size_t k,
                                   int grid_density = 64);

struct EvecCompResult {
  AlignmentReport report;
  SupEstimate e1, e2, e3, e4;
  double max_ratio = 0.0;  // max over the S grid of ||(1 - P)Q1 f||^2 / ||Q1 f||^2
  bool conclusion_holds = false;
};

/// Eigenvector comparison for the block k..l (1-based, 2 <= k <= l). Needs
/// span{u_1..u_{l+1}} and span{f_1..f_{l+1}} of dimension <= 3, i.e. k = l = 2.
/// Throws GapViolation when gamma <= max(E1, E2) and FExceedsOne when F >= 1.
EvecCompResult eveccomp_quantities(const FormSpace& d1, const FormSpace& d2, const Eigen::MatrixXd& q1,
                                   const Eigen::MatrixXd& q2, std::size_t k, std::size_t l, int grid_density = 64);

}  // namespace lapeig
