#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "weil/linops.hpp"

namespace weil::ift {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using linops::LinearOperator;

// Central-difference Jacobian with step h.
MatrixXd fd_jacobian(const std::function<VectorXd(const VectorXd&)>& f, const VectorXd& x,
                     double h);

// C^1 map carrying the data the certified solver needs: evaluation, a
// differential (analytic, or finite differences via make_fd_map), a bound L
// with ||dF(x) - dF(x')|| <= L ||x - x'|| on the working ball, and the ball
// radius itself. deriv_lipschitz = 0 means the differential is constant.
struct DifferentiableMap {
  int domain_dim = 0;
  int codomain_dim = 0;
  std::function<VectorXd(const VectorXd&)> eval;
  std::function<MatrixXd(const VectorXd&)> jacobian;
  double deriv_lipschitz = 0.0;
  double domain_radius = 1.0;
  double fd_step = 1e-5;

  VectorXd operator()(const VectorXd& x) const;
  LinearOperator differential(const VectorXd& x) const;
};

// Builds a map whose jacobian callback is central differences of eval.
DifferentiableMap make_fd_map(int domain_dim, int codomain_dim,
                              std::function<VectorXd(const VectorXd&)> eval,
                              double deriv_lipschitz, double domain_radius,
                              double fd_step = 1e-5);

// Largest relative deviation between the declared Jacobian and central
// differences over points sampled away from the origin. Consistent maps
// stay below 10 * fd_step^2.
double jacobian_consistency(const DifferentiableMap& map, int samples, std::uint64_t seed);

// Sampled estimate of the derivative-Lipschitz bound: max of
// ||J(x) - J(x')|| / ||x - x'|| over random pairs. Heuristic, not a proof;
// callers should apply their own safety margin.
double estimate_deriv_lipschitz(const DifferentiableMap& map, int pairs,
                                std::uint64_t seed);

// Certified constants: within the ball of radius w_radius every point of
// the zero fiber of psi is reached by phi from the ball of radius delta/2,
// and the fixed-point iteration contracts its defect by 1/2 per step.
struct IftConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double cmax = 1.0;
  double delta = 0.0;
  double w_radius = 0.0;   // delta / (9 cmax^3)
  double x0_radius = 0.0;  // delta / (162 cmax^4)
};

struct CertifyOptions {
  int chain_samples = 100;   // points checked for psi(phi(x)) = 0
  double chain_tol = 1e-8;
  double origin_tol = 1e-10;  // |phi(0)|, |psi(0)| gate
  double exactness_tol = 1e-8;
  double rank_tol = 0.0;  // 0 = scale-based default
  std::uint64_t seed = 0x5eedULL;
};

IftConstants certify_neighborhood(const DifferentiableMap& phi,
                                  const DifferentiableMap& psi,
                                  const CertifyOptions& opts = {});

struct IterationTrace {
  std::vector<VectorXd> xs;
  std::vector<double> u_norms;
  std::vector<double> v_norms;
  bool converged = false;
  bool halving_ok = false;  // u_norms[n+1] <= u_norms[n] / 2 for n >= 1
  int iterations = 0;
};

struct SolveOptions {
  double tol = 0.0;         // 0 = 1e-10 * (1 + ||y||)
  double fiber_tol = 1e-8;  // gate on ||psi(y)||
  double solve_tol = 1e-6;  // residual gate for the inner least-squares steps
  int max_iterations = 200;
  int patience = 5;  // consecutive non-contracting steps before Diverged
  bool override_radius = false;
};

struct FiberSolve {
  VectorXd x;
  IterationTrace trace;
};

// Solves phi(x) = y for y in the zero fiber of psi by the certified
// defect-correction iteration x_{n+1} = x_n - sigma(u_n - tau(dpsi(0) u_n)),
// u_n = phi(x_n) - y, starting from x_0 = 0.
FiberSolve solve_fiber(const DifferentiableMap& phi, const DifferentiableMap& psi,
                       const VectorXd& y, const IftConstants& constants,
                       const SolveOptions& opts = {});

struct QuasiIsometry {
  double lower;        // c = r/4
  double upper;        // C = ||df(0)|| + r/4
  double ball_radius;  // where c ||x-x'|| <= ||f(x)-f(x')|| <= C ||x-x'|| holds
};

QuasiIsometry quasi_isometry_constants(const DifferentiableMap& f);

struct Transition {
  VectorXd x_prime;
  LinearOperator differential;  // dphi1(x')^{-1} dphi2(x)
};

// Chart change phi1^{-1} (phi2(x)) computed through the fiber solver, with
// its differential. `constants1` certifies phi1 against psi; phi2 is
// certified on entry.
Transition transition_map(const DifferentiableMap& phi1, const DifferentiableMap& phi2,
                          const DifferentiableMap& psi, const VectorXd& x,
                          const IftConstants& constants1, const SolveOptions& opts = {});

// Certified w_radius for the rank-n truncation of the non-closed-range
// family psi(v) = ||v|| v + A v, A = diag(-1, -1/2, ..., -1/n), with a
// zero-dimensional source. The radius degrades like n^{-6}.
double shrinking_radius_demo(int n);

}  // namespace weil::ift
