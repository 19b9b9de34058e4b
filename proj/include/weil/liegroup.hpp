#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "weil/linops.hpp"
#include "weil/words.hpp"

namespace weil::lie {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Matrix exponential (scaling and squaring); exp(0) = I.
MatrixXd exp(const MatrixXd& x);

// Principal matrix logarithm on the chart ||g - I|| < 1 (spectral norm);
// outside it fails with OutOfChartDomain.
MatrixXd log(const MatrixXd& g);

// Invertible square matrix with a cached inverse.
class GroupElement {
 public:
  explicit GroupElement(MatrixXd m, double det_tol = 1e-12);
  static GroupElement identity(int n);

  const MatrixXd& matrix() const { return mat_; }
  const MatrixXd& inverse_matrix() const { return inv_; }
  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& rhs) const;
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  MatrixXd mat_;
  MatrixXd inv_;
};

// Matrix of v -> g v g^{-1} in the given algebra basis. Fails with
// NotInvariant when conjugation leaves the span of the basis.
linops::LinearOperator ad_matrix(const GroupElement& g, const std::vector<MatrixXd>& basis,
                                 double tol = 1e-8);

// Matrix Lie group configuration: ambient dimension plus an ordered
// algebra basis. Conversion between algebra matrices and coordinates is
// least-squares against the stacked basis.
class MatrixGroup {
 public:
  MatrixGroup(std::string name, int ambient_dim, std::vector<MatrixXd> basis);

  static MatrixGroup gl(int n);  // all of gl(n), basis E_ij row-major
  static MatrixGroup sl(int n);  // traceless: diagonal differences then E_ij
  static MatrixGroup so(int n);  // antisymmetric: E_ji - E_ij for i < j
  // Preset lookup: "gl(2)", "sl(3)", "so(2)", ...
  static MatrixGroup from_key(const std::string& key);

  const std::string& name() const { return name_; }
  int ambient_dim() const { return ambient_dim_; }
  int algebra_dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<MatrixXd>& basis() const { return basis_; }

  MatrixXd from_coords(const VectorXd& coords) const;
  // Coordinates of x in the basis; fails with NotInvariant when x leaves
  // the span by more than tol * (1 + ||x||).
  VectorXd to_coords(const MatrixXd& x, double tol = 1e-8) const;

 private:
  std::string name_;
  int ambient_dim_;
  std::vector<MatrixXd> basis_;
  linops::RightInverseCertificate coords_solver_;
};

// Homomorphism from a finitely presented group into a matrix group, given
// by one invertible matrix per generator. Construction validates that
// every relator evaluates to the identity within rel_tol (scaled by the
// product of the factor norms).
class Representation {
 public:
  Representation(words::Presentation pres, MatrixGroup group, std::vector<MatrixXd> images,
                 double rel_tol = 1e-10);

  const words::Presentation& presentation() const { return pres_; }
  const MatrixGroup& group() const { return group_; }
  const GroupElement& image(int generator) const { return images_.at(generator); }
  int dim() const { return group_.ambient_dim(); }
  double max_relator_defect() const { return max_defect_; }

 private:
  words::Presentation pres_;
  MatrixGroup group_;
  std::vector<GroupElement> images_;
  double max_defect_ = 0.0;
};

// Ordered product of generator images along the word; the empty word gives I.
GroupElement evaluate_word(const Representation& rep, const words::Word& w);

// Orthonormal basis (columns) of the numerical null space of the derived
// action evaluated at a point: the Lie algebra of the stabilizer.
MatrixXd stabilizer_algebra(const linops::LinearOperator& action_derivative,
                            double rank_tol = 0.0);

// Text format:
//   group: so(2)
//   matrix a:
//     -0.5 -0.8660254037844386
//     0.8660254037844386 -0.5
// Every generator of the presentation needs exactly one matrix block of
// ambient_dim^2 numbers (line breaks are free).
Representation load_representation(const std::string& path, const words::Presentation& pres,
                                   double rel_tol = 1e-10);

}  // namespace weil::lie
