#include "weil/ift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "weil/charts.hpp"

namespace weil::ift {

namespace {

using linops::RightInverseCertificate;

VectorXd sample_in_ball(int dim, double radius, std::mt19937_64& rng) {
  if (dim == 0) return VectorXd(0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  VectorXd x(dim);
  do {
    for (int i = 0; i < dim; ++i) x(i) = gauss(rng);
  } while (x.norm() == 0.0);
  x.normalize();
  return radius * std::pow(unit(rng), 1.0 / dim) * x;
}

}  // namespace

MatrixXd fd_jacobian(const std::function<VectorXd(const VectorXd&)>& f, const VectorXd& x,
                     double h) {
  VectorXd probe = x;
  const Eigen::Index n = x.size();
  VectorXd f0 = f(x);
  MatrixXd jac(f0.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    probe(i) = x(i) + h;
    VectorXd fp = f(probe);
    probe(i) = x(i) - h;
    VectorXd fm = f(probe);
    probe(i) = x(i);
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

VectorXd DifferentiableMap::operator()(const VectorXd& x) const {
  if (x.size() != domain_dim)
    fail(errc::invalid_argument, "point has dimension " + std::to_string(x.size()) +
                                     ", map domain is " + std::to_string(domain_dim));
  VectorXd y = eval(x);
  if (y.size() != codomain_dim)
    fail(errc::invalid_argument, "map returned a vector of the wrong dimension");
  return y;
}

LinearOperator DifferentiableMap::differential(const VectorXd& x) const {
  MatrixXd j = jacobian ? jacobian(x) : fd_jacobian(eval, x, fd_step);
  if (j.rows() != codomain_dim || j.cols() != domain_dim)
    fail(errc::invalid_argument, "jacobian has the wrong shape");
  return LinearOperator(std::move(j));
}

DifferentiableMap make_fd_map(int domain_dim, int codomain_dim,
                              std::function<VectorXd(const VectorXd&)> eval,
                              double deriv_lipschitz, double domain_radius, double fd_step) {
  DifferentiableMap map;
  map.domain_dim = domain_dim;
  map.codomain_dim = codomain_dim;
  map.eval = std::move(eval);
  map.jacobian = [f = map.eval, fd_step](const VectorXd& x) {
    return fd_jacobian(f, x, fd_step);
  };
  map.deriv_lipschitz = deriv_lipschitz;
  map.domain_radius = domain_radius;
  map.fd_step = fd_step;
  return map;
}

double jacobian_consistency(const DifferentiableMap& map, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shell(0.2, 0.9);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    VectorXd x = sample_in_ball(map.domain_dim, map.domain_radius, rng);
    if (x.size() > 0 && x.norm() > 0) x *= shell(rng) * map.domain_radius / x.norm();
    MatrixXd declared = map.differential(x).matrix();
    MatrixXd fd = fd_jacobian(map.eval, x, map.fd_step);
    const double rel = (declared - fd).norm() / std::max(1.0, declared.norm());
    worst = std::max(worst, rel);
  }
  return worst;
}

double estimate_deriv_lipschitz(const DifferentiableMap& map, int pairs,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    VectorXd x = sample_in_ball(map.domain_dim, 0.9 * map.domain_radius, rng);
    VectorXd x2 = sample_in_ball(map.domain_dim, 0.9 * map.domain_radius, rng);
    const double dist = (x - x2).norm();
    if (dist < 1e-12) continue;
    const double jump =
        (map.differential(x).matrix() - map.differential(x2).matrix()).norm();
    worst = std::max(worst, jump / dist);
  }
  return worst;
}

IftConstants certify_neighborhood(const DifferentiableMap& phi,
                                  const DifferentiableMap& psi,
                                  const CertifyOptions& opts) {
  if (phi.codomain_dim != psi.domain_dim)
    fail(errc::invalid_argument, "phi codomain does not match psi domain");

  const VectorXd phi0 = phi(VectorXd::Zero(phi.domain_dim));
  if (phi0.norm() > opts.origin_tol)
    fail(errc::invalid_argument, "phi(0) != 0: ||phi(0)|| = " + std::to_string(phi0.norm()));
  const VectorXd psi0 = psi(VectorXd::Zero(psi.domain_dim));
  if (psi0.norm() > opts.origin_tol)
    fail(errc::invalid_argument, "psi(0) != 0: ||psi(0)|| = " + std::to_string(psi0.norm()));

  // psi o phi = 0, sampled on the domain ball.
  std::mt19937_64 rng(opts.seed);
  const int chain_checks = phi.domain_dim == 0 ? 1 : opts.chain_samples;
  for (int k = 0; k < chain_checks; ++k) {
    VectorXd x = sample_in_ball(phi.domain_dim, phi.domain_radius, rng);
    const double defect = psi(phi(x)).norm();
    if (defect > opts.chain_tol)
      fail(errc::chain_condition_failed,
           "||psi(phi(x))|| = " + std::to_string(defect) + " at a sampled point");
  }

  const LinearOperator dphi0 = phi.differential(VectorXd::Zero(phi.domain_dim));
  const LinearOperator dpsi0 = psi.differential(VectorXd::Zero(psi.domain_dim));

  // im(dphi(0)) = ker(dpsi(0)): ranks must complement and the image must be
  // annihilated by dpsi(0).
  RightInverseCertificate phi_cert(dphi0, opts.rank_tol);
  RightInverseCertificate psi_cert(dpsi0, opts.rank_tol);
  const Eigen::Index nullity = psi.domain_dim - psi_cert.rank();
  if (phi_cert.rank() != nullity)
    fail(errc::exactness_failed,
         "rank(dphi(0)) = " + std::to_string(phi_cert.rank()) +
             " but nullity(dpsi(0)) = " + std::to_string(nullity));
  if (phi_cert.rank() > 0) {
    // Columns of dphi(0) mapped through dpsi(0), relative to their size.
    const double leak = (dpsi0.matrix() * dphi0.matrix()).norm();
    const double scale = std::max(1.0, linops::operator_norm(dpsi0) * phi_cert.sigma_max());
    if (leak > opts.exactness_tol * scale)
      fail(errc::exactness_failed,
           "dpsi(0) dphi(0) != 0: ||product|| = " + std::to_string(leak));
  }

  const auto bounds = linops::bound_constants(dphi0, dpsi0);
  const double lipschitz = std::max(phi.deriv_lipschitz, psi.deriv_lipschitz);
  const double c3 = bounds.c * bounds.c * bounds.c;
  const double variation_cap =
      lipschitz > 0.0 ? 1.0 / (6.0 * c3 * lipschitz) : std::numeric_limits<double>::infinity();

  IftConstants out;
  out.c1 = bounds.c1;
  out.c2 = bounds.c2;
  out.cmax = bounds.c;
  out.delta = std::min({phi.domain_radius, psi.domain_radius, variation_cap});
  out.w_radius = out.delta / (9.0 * c3);
  out.x0_radius = out.delta / (162.0 * c3 * bounds.c);
  return out;
}

FiberSolve solve_fiber(const DifferentiableMap& phi, const DifferentiableMap& psi,
                       const VectorXd& y, const IftConstants& constants,
                       const SolveOptions& opts) {
  if (y.size() != phi.codomain_dim)
    fail(errc::invalid_argument, "target dimension does not match phi codomain");
  const double fiber_defect = psi(y).norm();
  if (fiber_defect > opts.fiber_tol)
    fail(errc::not_in_fiber,
         "||psi(y)|| = " + std::to_string(fiber_defect) + " exceeds fiber_tol");
  if (!opts.override_radius && y.norm() >= constants.w_radius)
    fail(errc::outside_certified_radius,
         "||y|| = " + std::to_string(y.norm()) + " >= certified w_radius " +
             std::to_string(constants.w_radius));

  const double tol = opts.tol > 0.0 ? opts.tol : 1e-10 * (1.0 + y.norm());
  const LinearOperator dpsi0_op = psi.differential(VectorXd::Zero(psi.domain_dim));
  RightInverseCertificate sigma(phi.differential(VectorXd::Zero(phi.domain_dim)));
  RightInverseCertificate tau(dpsi0_op);

  FiberSolve out;
  out.x = VectorXd::Zero(phi.domain_dim);

  int stalled = 0;
  for (int n = 0; n <= opts.max_iterations; ++n) {
    const VectorXd u = phi(out.x) - y;
    out.trace.xs.push_back(out.x);
    out.trace.u_norms.push_back(u.norm());
    out.trace.iterations = n;
    if (u.norm() <= tol) {
      out.trace.converged = true;
      break;
    }
    if (n == opts.max_iterations)
      fail(errc::max_iterations,
           "fiber defect " + std::to_string(u.norm()) + " after " + std::to_string(n) +
               " iterations");
    if (n > 0) {
      stalled = u.norm() > 0.9 * out.trace.u_norms[n - 1] ? stalled + 1 : 0;
      if (stalled >= opts.patience)
        fail(errc::diverged, "fiber defect stopped contracting for " +
                                 std::to_string(opts.patience) + " consecutive steps");
    }
    // v_n = sigma(u_n - tau(dpsi(0) u_n)): project u_n onto ker dpsi(0) =
    // im dphi(0), then pull back through dphi(0).
    const VectorXd projected = u - tau.apply(dpsi0_op.apply(u));
    const VectorXd v = sigma.solve(projected, opts.solve_tol);
    out.trace.v_norms.push_back(v.norm());
    out.x -= v;
  }

  out.trace.halving_ok = true;
  for (std::size_t n = 1; n + 1 < out.trace.u_norms.size(); ++n)
    if (out.trace.u_norms[n + 1] > 0.5 * out.trace.u_norms[n] + 1e-12)
      out.trace.halving_ok = false;
  return out;
}

QuasiIsometry quasi_isometry_constants(const DifferentiableMap& f) {
  if (f.domain_dim == 0)
    fail(errc::invalid_argument, "quasi-isometry constants need a nonzero domain");
  const LinearOperator df0 = f.differential(VectorXd::Zero(f.domain_dim));
  const double r = linops::embedding_radius(df0);
  if (r <= 0.0)
    fail(errc::not_embedding, "df(0) has no positive lower bound r");
  QuasiIsometry out;
  out.lower = r / 4.0;
  out.upper = linops::operator_norm(df0) + r / 4.0;
  out.ball_radius = f.deriv_lipschitz > 0.0
                        ? std::min(f.domain_radius, r / (4.0 * f.deriv_lipschitz))
                        : f.domain_radius;
  return out;
}

Transition transition_map(const DifferentiableMap& phi1, const DifferentiableMap& phi2,
                          const DifferentiableMap& psi, const VectorXd& x,
                          const IftConstants& constants1, const SolveOptions& opts) {
  certify_neighborhood(phi2, psi);  // chart hypotheses for the source chart
  const VectorXd y = phi2(x);
  if (!opts.override_radius && y.norm() >= constants1.w_radius)
    fail(errc::out_of_chart, "phi2(x) has norm " + std::to_string(y.norm()) +
                                 ", outside the certified radius " +
                                 std::to_string(constants1.w_radius));
  SolveOptions inner = opts;
  inner.override_radius = true;  // gate already applied above
  FiberSolve fs = solve_fiber(phi1, psi, y, constants1, inner);

  Transition out;
  out.x_prime = fs.x;
  out.differential =
      linops::inverse_compose(phi1.differential(fs.x), phi2.differential(x));
  return out;
}

double shrinking_radius_demo(int n) {
  if (n < 1) fail(errc::invalid_argument, "truncation rank must be >= 1");
  ChartPair chain = truncation_chart(n);
  return certify_neighborhood(chain.phi, chain.psi).w_radius;
}

}  // namespace weil::ift
