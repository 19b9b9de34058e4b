#include "weil/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace weil::rigidity {

namespace {

// Stacked log-coordinates of a tuple of near-identity group elements.
VectorXd stack_log_coords(const std::vector<MatrixXd>& tuple, const lie::MatrixGroup& group) {
  const int d = group.algebra_dim();
  VectorXd out(static_cast<Eigen::Index>(tuple.size()) * d);
  for (std::size_t i = 0; i < tuple.size(); ++i)
    out.segment(static_cast<Eigen::Index>(i) * d, d) = group.to_coords(lie::log(tuple[i]));
  return out;
}

double estimate_lipschitz_or_zero(ift::DifferentiableMap& map, const MapBuildOptions& opts) {
  if (map.domain_dim == 0) return 0.0;
  return opts.lipschitz_margin *
         ift::estimate_deriv_lipschitz(map, opts.lipschitz_pairs, opts.seed);
}

}  // namespace

RepPoint rep_point(const lie::Representation& rep, const lie::Representation& rep_prime) {
  const auto& group = rep.group();
  if (rep_prime.dim() != rep.dim())
    fail(errc::validation_failed, "representations live in different ambient dimensions");
  if (rep_prime.presentation().generators() != rep.presentation().generators())
    fail(errc::validation_failed, "representations use different presentations");
  RepPoint out;
  std::vector<MatrixXd> tuple;
  for (std::size_t s = 0; s < rep.presentation().num_generators(); ++s) {
    const int i = static_cast<int>(s);
    MatrixXd a = rep_prime.image(i).matrix() * rep.image(i).inverse_matrix();
    out.alpha.emplace_back(a);
    tuple.push_back(std::move(a));
  }
  out.coords = stack_log_coords(tuple, group);
  return out;
}

ift::DifferentiableMap build_phi(const lie::Representation& rep,
                                 const MapBuildOptions& opts) {
  const lie::MatrixGroup& group = rep.group();
  const int d = group.algebra_dim();
  const int s_count = static_cast<int>(rep.presentation().num_generators());

  std::vector<MatrixXd> images, inverses;
  for (int s = 0; s < s_count; ++s) {
    images.push_back(rep.image(s).matrix());
    inverses.push_back(rep.image(s).inverse_matrix());
  }
  auto eval = [group, images, inverses, s_count](const VectorXd& xi) {
    const MatrixXd g = lie::exp(group.from_coords(xi));
    const MatrixXd g_inv = lie::exp(group.from_coords(-xi));
    std::vector<MatrixXd> tuple;
    tuple.reserve(static_cast<std::size_t>(s_count));
    for (int s = 0; s < s_count; ++s)
      tuple.push_back(g * images[static_cast<std::size_t>(s)] * g_inv *
                      inverses[static_cast<std::size_t>(s)]);
    return stack_log_coords(tuple, group);
  };

  const MatrixXd d0 = coh::delta0(coh::module_from_representation(rep), rep.presentation());

  ift::DifferentiableMap map;
  map.domain_dim = d;
  map.codomain_dim = s_count * d;
  map.eval = eval;
  map.fd_step = opts.fd_step;
  map.jacobian = [eval, d0, h = opts.fd_step](const VectorXd& xi) -> MatrixXd {
    if (xi.isZero(0.0)) return d0;  // dphi(e) = delta0, exact at the origin
    return ift::fd_jacobian(eval, xi, h);
  };
  map.domain_radius = opts.domain_radius;
  map.deriv_lipschitz = estimate_lipschitz_or_zero(map, opts);
  return map;
}

ift::DifferentiableMap build_psi(const lie::Representation& rep,
                                 const std::vector<int>& subset,
                                 const MapBuildOptions& opts) {
  const lie::MatrixGroup& group = rep.group();
  const int d = group.algebra_dim();
  const int n = group.ambient_dim();
  const int s_count = static_cast<int>(rep.presentation().num_generators());

  std::vector<MatrixXd> images, inverses;
  for (int s = 0; s < s_count; ++s) {
    images.push_back(rep.image(s).matrix());
    inverses.push_back(rep.image(s).inverse_matrix());
  }
  std::vector<words::Word> relators;
  for (int t : subset) {
    if (t < 0 || t >= static_cast<int>(rep.presentation().num_relators()))
      fail(errc::invalid_argument, "relator index out of range");
    relators.push_back(rep.presentation().relators()[static_cast<std::size_t>(t)]);
  }

  auto eval = [group, images, inverses, relators, d, n](const VectorXd& c) {
    std::vector<MatrixXd> factors, factor_inverses;
    const int s_total = static_cast<int>(images.size());
    for (int s = 0; s < s_total; ++s) {
      const MatrixXd x = group.from_coords(c.segment(s * d, d));
      const MatrixXd a = lie::exp(x);
      const MatrixXd a_inv = lie::exp(-x);
      factors.push_back(a * images[static_cast<std::size_t>(s)]);  // alpha(s) r(s)
      factor_inverses.push_back(inverses[static_cast<std::size_t>(s)] * a_inv);
    }
    std::vector<MatrixXd> tuple;
    tuple.reserve(relators.size());
    for (const words::Word& t : relators) {
      MatrixXd value = MatrixXd::Identity(n, n);
      for (const words::Letter& letter : t.letters)
        value *= letter.exponent > 0 ? factors[static_cast<std::size_t>(letter.generator)]
                                     : factor_inverses[static_cast<std::size_t>(letter.generator)];
      tuple.push_back(std::move(value));
    }
    return stack_log_coords(tuple, group);
  };

  const MatrixXd d1 =
      coh::delta1(coh::module_from_representation(rep), rep.presentation(), subset);

  ift::DifferentiableMap map;
  map.domain_dim = s_count * d;
  map.codomain_dim = static_cast<int>(subset.size()) * d;
  map.eval = eval;
  map.fd_step = opts.fd_step;
  map.jacobian = [eval, d1, h = opts.fd_step](const VectorXd& c) -> MatrixXd {
    if (c.isZero(0.0)) return d1;  // dpsi(e_S) = delta1 on the subset
    return ift::fd_jacobian(eval, c, h);
  };
  map.domain_radius = opts.domain_radius;
  map.deriv_lipschitz = estimate_lipschitz_or_zero(map, opts);
  return map;
}

namespace {

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

RigidityReport check_local_rigidity(const lie::Representation& rep,
                                    const RigidityOptions& opts) {
  const coh::GammaModule module = coh::module_from_representation(rep);
  const words::Presentation& pres = rep.presentation();

  RigidityReport report;
  report.relator_subset = coh::saturate_relators(module, pres, opts.rank_tol);

  const coh::H1Result h1 = coh::h1_dimension(module, pres, report.relator_subset, opts.rank_tol);
  report.h1_dim = h1.dimension;
  report.h1_details = h1.details;
  report.rigid = report.h1_dim == 0;

  MapBuildOptions build = opts.map_build;
  build.fd_step = opts.fd_step;

  const ift::DifferentiableMap phi = build_phi(rep, build);
  const MatrixXd d0 = coh::delta0(module, pres);
  const MatrixXd fd_phi =
      ift::fd_jacobian(phi.eval, VectorXd::Zero(phi.domain_dim), opts.fd_step);
  report.dphi_residual = max_abs(fd_phi - d0);

  const ift::DifferentiableMap psi = build_psi(rep, report.relator_subset, build);
  const MatrixXd d1 = coh::delta1(module, pres, report.relator_subset);
  const MatrixXd fd_psi =
      ift::fd_jacobian(psi.eval, VectorXd::Zero(psi.domain_dim), opts.fd_step);
  report.dpsi_residual = max_abs(fd_psi - d1);

  return report;
}

ConjugatorResult recover_conjugator(const lie::Representation& rep,
                                    const lie::Representation& rep_prime,
                                    const ConjugatorOptions& opts) {
  RigidityReport report = check_local_rigidity(rep, opts.rigidity);
  if (!report.rigid)
    fail(errc::not_rigid,
         "h1_dim = " + std::to_string(report.h1_dim) + "; no rigidity certificate");

  const lie::MatrixGroup& group = rep.group();
  const RepPoint target = rep_point(rep, rep_prime);

  auto conjugation_residual = [&](const lie::GroupElement& g) {
    double worst = 0.0;
    for (std::size_t s = 0; s < rep.presentation().num_generators(); ++s) {
      const int i = static_cast<int>(s);
      const MatrixXd lhs = g.matrix() * rep.image(i).matrix() * g.inverse_matrix();
      worst = std::max(worst, (lhs - rep_prime.image(i).matrix()).norm());
    }
    return worst;
  };

  ConjugatorResult out{lie::GroupElement::identity(rep.dim()), 0.0, {}, {}};
  if (target.coords.norm() <= 1e-13) {  // r' = r: the identity conjugates
    out.residual = conjugation_residual(out.g);
    out.trace.converged = true;
    out.trace.halving_ok = true;
    return out;
  }

  const ift::DifferentiableMap phi = build_phi(rep, opts.rigidity.map_build);
  const ift::DifferentiableMap psi =
      build_psi(rep, report.relator_subset, opts.rigidity.map_build);
  out.constants = ift::certify_neighborhood(phi, psi);

  if (!opts.override_radius && target.coords.norm() >= out.constants.w_radius)
    fail(errc::not_in_neighborhood,
         "||alpha|| = " + std::to_string(target.coords.norm()) +
             " outside certified w_radius " + std::to_string(out.constants.w_radius) +
             " (set override_radius to proceed)");

  ift::SolveOptions solve = opts.solve;
  solve.override_radius = true;  // the gate above already ran
  const ift::FiberSolve fs = ift::solve_fiber(phi, psi, target.coords, out.constants, solve);

  out.g = lie::GroupElement(lie::exp(group.from_coords(fs.x)));
  out.trace = fs.trace;
  out.residual = conjugation_residual(out.g);
  if (out.residual > opts.tol)
    fail(errc::diverged, "fiber solution fails the conjugation residual: " +
                             std::to_string(out.residual) + " > " + std::to_string(opts.tol));
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::vector<std::string> RigidityReport::machine_lines() const {
  std::vector<std::string> lines;
  lines.push_back("h1_dim = " + std::to_string(h1_dim));
  lines.push_back(std::string("rigid = ") + (rigid ? "true" : "false"));
  std::string subset;
  for (std::size_t i = 0; i < relator_subset.size(); ++i)
    subset += (i ? " " : "") + std::to_string(relator_subset[i]);
  lines.push_back("relator_subset = " + subset);
  lines.push_back("rank_d0 = " + std::to_string(h1_details.rank_d0));
  lines.push_back("rank_d1 = " + std::to_string(h1_details.rank_d1));
  lines.push_back("nullity_d1 = " + std::to_string(h1_details.nullity_d1));
  lines.push_back("complex_defect = " + fmt(h1_details.complex_defect));
  lines.push_back("dphi_residual = " + fmt(dphi_residual));
  lines.push_back("dpsi_residual = " + fmt(dpsi_residual));
  lines.push_back("closed_image = automatic_finite_dimensional");
  lines.push_back("rank_warnings = " + std::to_string(h1_details.warnings.size()));
  if (conjugation_residual)
    lines.push_back("conjugation_residual = " + fmt(*conjugation_residual));
  if (conjugator) {
    std::string entries;
    for (Eigen::Index i = 0; i < conjugator->rows(); ++i)
      for (Eigen::Index j = 0; j < conjugator->cols(); ++j) {
        if (!entries.empty()) entries += ' ';
        entries += fmt((*conjugator)(i, j));
      }
    lines.push_back("conjugator = " + entries);
  }
  return lines;
}

std::string RigidityReport::text() const {
  std::ostringstream os;
  os << "local rigidity report\n";
  os << "  H^1 dimension:      " << h1_dim << "\n";
  os << "  verdict:            " << (rigid ? "rigid" : "not rigid") << "\n";
  os << "  relator subset T':  ";
  if (relator_subset.empty()) os << "(empty)";
  for (std::size_t i = 0; i < relator_subset.size(); ++i)
    os << (i ? " " : "") << relator_subset[i];
  os << "\n";
  os << "  rank delta0:        " << h1_details.rank_d0 << "\n";
  os << "  rank delta1|T':     " << h1_details.rank_d1 << "\n";
  os << "  nullity delta1|T':  " << h1_details.nullity_d1 << "\n";
  os << "  ||d1 d0||:          " << fmt(h1_details.complex_defect) << "\n";
  os << "  |FD dphi - delta0|: " << fmt(dphi_residual) << "\n";
  os << "  |FD dpsi - delta1|: " << fmt(dpsi_residual) << "\n";
  os << "  closed image:       automatic (finite dimension)\n";
  for (const std::string& w : h1_details.warnings) os << "  warning: " << w << "\n";
  if (conjugation_residual)
    os << "  conjugation residual: " << fmt(*conjugation_residual) << "\n";
  if (conjugator) {
    os << "  conjugator:\n";
    for (Eigen::Index i = 0; i < conjugator->rows(); ++i) {
      os << "   ";
      for (Eigen::Index j = 0; j < conjugator->cols(); ++j)
        os << ' ' << fmt((*conjugator)(i, j));
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace weil::rigidity
