#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weil/cohomology.hpp"
#include "weil/ift.hpp"
#include "weil/liegroup.hpp"

namespace weil::rigidity {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Point of Map(S, G) near the identity tuple: one group element per
// generator plus its stacked algebra log-coordinates.
struct RepPoint {
  std::vector<lie::GroupElement> alpha;
  VectorXd coords;  // |S| * d
};

// alpha(s) = r'(s) r(s)^{-1}, the displacement of rep_prime from rep.
RepPoint rep_point(const lie::Representation& rep, const lie::Representation& rep_prime);

struct MapBuildOptions {
  double fd_step = 1e-5;
  double domain_radius = 0.25;  // log-chart safety, well inside ||g - I|| < 1
  int lipschitz_pairs = 60;     // sampled derivative-Lipschitz estimate
  double lipschitz_margin = 2.0;
  std::uint64_t seed = 0x5eedULL;
};

// The conjugation displacement map in exponential charts:
// xi -> stacked log-coords of s -> exp(xi) r(s) exp(-xi) r(s)^{-1}.
// Its differential at 0 is delta0; away from 0 it is finite differences.
// The declared derivative-Lipschitz bound is a sampled estimate.
ift::DifferentiableMap build_phi(const lie::Representation& rep,
                                 const MapBuildOptions& opts = {});

// The relator evaluation map in exponential charts:
// c -> stacked log-coords of t -> prod_j (alpha(s_j) r(s_j))^{eps_j}
// over the relator subset. Its differential at 0 is delta1 on the subset.
ift::DifferentiableMap build_psi(const lie::Representation& rep,
                                 const std::vector<int>& subset,
                                 const MapBuildOptions& opts = {});

struct RigidityReport {
  Eigen::Index h1_dim = 0;
  bool rigid = false;
  std::vector<int> relator_subset;
  double dphi_residual = 0.0;  // max |FD(dphi(0)) - delta0| entrywise
  double dpsi_residual = 0.0;  // max |FD(dpsi(0)) - delta1| entrywise
  coh::H1Details h1_details;
  // Closed image of delta1 is automatic at finite dimension; recorded, not
  // tested.
  bool closed_image_automatic = true;
  std::optional<MatrixXd> conjugator;
  std::optional<double> conjugation_residual;

  std::vector<std::string> machine_lines() const;  // key = value form
  std::string text() const;
};

struct RigidityOptions {
  double rank_tol = 0.0;
  double fd_step = 1e-5;
  MapBuildOptions map_build;
};

// Full verdict pipeline: relator saturation, H^1, and the agreement of the
// finite-difference differentials of the chart maps with the assembled
// coboundaries. rigid iff h1_dim == 0.
RigidityReport check_local_rigidity(const lie::Representation& rep,
                                    const RigidityOptions& opts = {});

struct ConjugatorOptions {
  double tol = 1e-8;  // generator-wise conjugation residual bound
  bool override_radius = false;
  ift::SolveOptions solve;
  RigidityOptions rigidity;
};

struct ConjugatorResult {
  lie::GroupElement g;
  double residual;  // max_s ||g r(s) g^{-1} - r'(s)||
  ift::IterationTrace trace;
  ift::IftConstants constants;
};

// Recovers g with g r(s) g^{-1} = r'(s) for all generators by solving the
// fiber equation phi(xi) = alpha_{r'} in log coordinates and exponentiating.
// Requires a rigid reference representation; the displacement must lie in
// the certified ball unless override_radius is set.
ConjugatorResult recover_conjugator(const lie::Representation& rep,
                                    const lie::Representation& rep_prime,
                                    const ConjugatorOptions& opts = {});

}  // namespace weil::rigidity
