#pragma once

#include "lapeig/graph.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lapeig {

enum class InnerProduct {
  MeanDot,         // <u, v> = (1/n) sum u_i v_i
  DegreeWeighted,  // <u, v>_D = (1/n) sum u_i v_i D~_i,  D~_i = D_ii / (n eps^m sigma~)
};

enum class SolverKind { Auto, Dense, Lanczos };

struct SolverOptions {
  SolverKind kind = SolverKind::Auto;
  std::size_t dense_threshold = 1024;  // Auto uses the dense solver up to this n
  double tol = 1e-10;                  // residual tolerance relative to a Gershgorin bound
  double shift = 1e-4;                 // shift-invert offset relative to the same bound
  int max_iterations = 500;
  std::uint64_t seed = 0x243F6A8885A308D3ull;
};

struct Spectrum {
  Eigen::VectorXd values;   // ascending, k + 1 entries
  Eigen::MatrixXd vectors;  // n x (k + 1)
  InnerProduct inner_product = InnerProduct::MeanDot;
  Eigen::VectorXd weights;  // <u, v> = sum weights_i u_i v_i
  std::size_t k = 0;
};

/// Smallest k + 1 eigenpairs of L; eigenvectors orthonormal under MeanDot.
Spectrum unnormalized_spectrum(const NeighborhoodGraph& graph, std::size_t k, const SolverOptions& options = {});

/// Smallest k + 1 eigenpairs of L v = lambda D v via D^{-1/2} L D^{-1/2};
/// eigenvectors orthonormal under DegreeWeighted.
Spectrum normalized_spectrum(const NeighborhoodGraph& graph, std::size_t k, const SolverOptions& options = {});

struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // Euclidean-orthonormal columns
  int iterations = 0;
};

/// Smallest `count` eigenpairs of a symmetric positive semidefinite sparse
/// matrix by block subspace iteration on (A + delta I)^{-1} with a
/// Rayleigh-Ritz step on A itself each sweep. Clustered and repeated
/// eigenvalues are resolved as long as the cluster fits in the block.
SymmetricEigen smallest_eigenpairs_shift_invert(const SparseMatrix& a, std::size_t count, const SolverOptions& options);

/// Dense reference: full symmetric eigendecomposition, first `count` pairs.
SymmetricEigen smallest_eigenpairs_dense(const Eigen::MatrixXd& a, std::size_t count);

/// Weights realizing the inner product for this graph.
Eigen::VectorXd inner_product_weights(const NeighborhoodGraph& graph, InnerProduct ip);

/// 2 lambda / (sigma n eps^{m+2}).
double rescale_unnormalized(double lambda, double n, double eps, double sigma_eta, int m);
/// 2 sigma~ lambda / (sigma eps^2).
double rescale_normalized(double lambda, double eps, double sigma_eta, double sigma_tilde_eta);
/// The variant with an extra 1/n, kept for side-by-side comparison only.
double rescale_normalized_with_n(double lambda, double n, double eps, double sigma_eta, double sigma_tilde_eta);

/// u^T A u / u^T B u for dense symmetric forms; ZeroVector when u^T B u <= 0.
double rayleigh_quotient(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& u);
/// u^T L u / u^T u (MeanDot) or u^T L u / u^T D u (DegreeWeighted); on the
/// same scale as the raw eigenvalues of the corresponding problem.
double rayleigh_quotient(const NeighborhoodGraph& graph, const Eigen::VectorXd& u, InnerProduct ip);

struct AlignmentReport {
  std::vector<double> principal_angles;     // ascending, in [0, pi/2]
  std::vector<double> projection_residual;  // per column of the first basis, in [0, 1]
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double e4 = 0.0;
  double f_bound = 0.0;
  double gap = 0.0;
  double spread = 0.0;
  double max_residual() const;
};

/// Principal angles between span(a) and span(b) under <u, v> = sum w_i u_i v_i,
/// plus ||(1 - P_b) a_j||^2 / ||a_j||^2 for every column a_j.
AlignmentReport subspace_alignment(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& weights);

}  // namespace lapeig
