#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "weil/errors.hpp"

namespace weil::linops {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense linear map between Euclidean spaces. Columns index the domain,
// rows the codomain. Construction rejects non-finite entries.
class LinearOperator {
 public:
  LinearOperator() = default;
  explicit LinearOperator(MatrixXd m);

  Eigen::Index domain_dim() const { return mat_.cols(); }
  Eigen::Index codomain_dim() const { return mat_.rows(); }
  const MatrixXd& matrix() const { return mat_; }
  VectorXd apply(const VectorXd& x) const;

 private:
  MatrixXd mat_;
};

// Scale-invariant cutoff below which singular values count as zero:
// eps * max(rows, cols) * sigma_max.
double rank_threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max);

// Singular values in decreasing order (empty for degenerate shapes).
VectorXd singular_values(const LinearOperator& a);

// Spectral norm: the largest singular value. Empty operators have norm 0.
double operator_norm(const LinearOperator& a);

// Right inverse of an operator on its numerical image, realized as the
// SVD pseudo-inverse. `bound` is the open-mapping constant 1/sigma_min_plus:
// every y in the image has a preimage of norm <= bound * ||y||.
class RightInverseCertificate {
 public:
  explicit RightInverseCertificate(const LinearOperator& op, double rank_tol = 0.0);

  // Minimum-norm least-squares preimage, no membership check.
  VectorXd apply(const VectorXd& y) const;
  // As apply(), but fails with YNotInImage when ||A x - y|| > tol * ||y||.
  VectorXd solve(const VectorXd& y, double tol) const;

  const LinearOperator& pseudo_inverse() const { return pinv_; }
  double bound() const { return bound_; }
  double rank_tolerance() const { return rank_tol_; }
  Eigen::Index rank() const { return rank_; }
  double sigma_max() const { return sigma_max_; }
  // Smallest singular value above the rank cutoff; 0 when rank is 0.
  double sigma_min_plus() const { return sigma_min_plus_; }

 private:
  MatrixXd original_;
  LinearOperator pinv_;
  double bound_ = 1.0;
  double rank_tol_ = 0.0;
  Eigen::Index rank_ = 0;
  double sigma_max_ = 0.0;
  double sigma_min_plus_ = 0.0;
};

// Minimum-norm solution of A x = y. Requires the least-squares residual
// to stay below tol * ||y||, otherwise fails with YNotInImage.
VectorXd min_norm_preimage(const LinearOperator& a, const VectorXd& y, double tol);

struct BoundConstants {
  double c1;  // 1 / sigma_min_plus(dphi0)
  double c2;  // 1 / sigma_min_plus(dpsi0)
  double c;   // max{c1, c2, ||dphi0||, ||dpsi0||, 1}
};

// Open-mapping constants for a pair of differentials. Operators with an
// empty matrix (zero-dimensional domain or codomain) have image {0}, where
// the preimage bound holds vacuously; their constant is taken to be 1.
// A nonempty operator of numerical rank zero is rejected (ZeroOperator).
BoundConstants bound_constants(const LinearOperator& dphi0, const LinearOperator& dpsi0);

struct PerturbationSolve {
  VectorXd solution;
  // ||(f+g) w_partial - v|| after 1, 2, ... terms, recorded through the
  // telescoped form ||g w_n||; entry n is bounded by a^{n+1} ||v||.
  std::vector<double> residual_norms;
  double contraction;  // a = ||g|| / r
  double radius;       // r = sigma_min(f)
};

// Solves (f + g) w = v for surjective f and ||g|| < sigma_min(f) by the
// geometric preimage series w_0 = f^+ v, w_{k+1} = f^+(-g w_k). The partial
// sum after n terms has residual <= a^n ||v||, and ||w|| <= ||v|| / (r (1-a)).
PerturbationSolve surjective_perturbation_solve(const LinearOperator& f,
                                                const LinearOperator& g,
                                                const VectorXd& v, double tol);

// Largest r with ||f x|| >= r ||x||: the smallest singular value, 0 when the
// kernel is nontrivial, +infinity for a zero-dimensional domain.
double embedding_radius(const LinearOperator& f);

struct ExactnessTransfer {
  VectorXd solution;
  std::vector<double> v_norms;  // ||v_j|| trace; consecutive entries halve
};

// Transfers v in ker(g_tilde) to a preimage under f_tilde when (f_tilde,
// g_tilde) perturbs an exact normalized chain (f, g) by less than 1/10.
// f must have orthonormal columns and g orthonormal rows (normalize_chain
// produces such a pair). The ||v_j|| trace is checked against the 1/2
// contraction at every step.
ExactnessTransfer exactness_transfer(const LinearOperator& f, const LinearOperator& g,
                                     const LinearOperator& f_tilde,
                                     const LinearOperator& g_tilde, const VectorXd& v,
                                     double tol);

// Least-squares solution A of f A = g, column by column. Fails with
// ImageMismatch when any column of g leaves im(f) by more than
// tol * (1 + ||g_col||).
LinearOperator inverse_compose(const LinearOperator& f, const LinearOperator& g,
                               double tol = 1e-8);

// Replaces f by an orthonormal-column basis of its image and g by an
// orthonormal-row basis of its coimage, the normalization under which the
// exactness_transfer constants are valid.
std::pair<LinearOperator, LinearOperator> normalize_chain(const LinearOperator& f,
                                                          const LinearOperator& g);

}  // namespace weil::linops
