#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weil/liegroup.hpp"
#include "weil/linops.hpp"
#include "weil/words.hpp"

namespace weil::coh {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Module over a finitely presented group: one invertible d x d matrix per
// generator, extended to words multiplicatively.
class GammaModule {
 public:
  GammaModule(int dimension, std::vector<MatrixXd> rho);

  int dimension() const { return dim_; }
  std::size_t num_generators() const { return rho_.size(); }
  const MatrixXd& rho(int generator) const;
  const MatrixXd& rho_inverse(int generator) const;
  MatrixXd rho_word(const words::Word& w) const;

  // Largest defect ||rho(uv) - rho(u) rho(v)|| over random reduced words;
  // a sampled consistency check of multiplicativity.
  double multiplicativity_defect(const words::Presentation& pres, int samples,
                                 std::uint64_t seed) const;

 private:
  int dim_;
  std::vector<MatrixXd> rho_;
  std::vector<MatrixXd> rho_inv_;
};

// Adjoint module on the group's algebra: rho(s) = Ad(r(s)).
GammaModule module_from_representation(const lie::Representation& rep, double tol = 1e-8);

// First coboundary: block for generator s is I - rho(s), stacked in
// generator order, (|S| d) x d.
MatrixXd delta0(const GammaModule& module, const words::Presentation& pres);

// Relator coboundary restricted to a relator subset: block row for relator
// t and block column for generator s collects sign * rho(prefix) over the
// prefix expansion of t, (|T'| d) x (|S| d).
MatrixXd delta1(const GammaModule& module, const words::Presentation& pres,
                const std::vector<int>& subset);

// sup-norm over d-blocks of a stacked vector, the diagnostic norm on
// Map(S, V).
double sup_block_norm(const VectorXd& stacked, int block_dim);

struct CoboundaryPair {
  MatrixXd d0;
  MatrixXd d1;
  std::vector<int> relator_subset;
};

struct H1Details {
  Eigen::Index rank_d0 = 0;
  Eigen::Index rank_d1 = 0;
  Eigen::Index nullity_d1 = 0;
  double complex_defect = 0.0;  // ||d1 d0||
  VectorXd d0_singular_values;
  VectorXd d1_singular_values;
  double rank_gap_d0 = 0.0;  // smallest kept sv / threshold; 0 when rank 0
  double rank_gap_d1 = 0.0;
  std::vector<std::string> warnings;  // borderline rank decisions
};

struct H1Result {
  Eigen::Index dimension = 0;
  H1Details details;
};

// dim H^1 = nullity(delta1 on the subset) - rank(delta0). Requires
// ||d1 d0|| <= 1e-9 (1 + ||d1|| ||d0||), otherwise NotAComplex. Singular
// values within a factor 10 of the rank cutoff are reported as warnings.
H1Result h1_dimension(const GammaModule& module, const words::Presentation& pres,
                      const std::vector<int>& subset, double rank_tol = 0.0);

// Greedy finite relator selection: scan relators in file order, keep those
// that strictly increase rank(delta1). The result has the same kernel as
// the full operator.
std::vector<int> saturate_relators(const GammaModule& module,
                                   const words::Presentation& pres, double rank_tol = 0.0);

}  // namespace weil::coh
