// weil: certified local-rigidity checks for representations of finitely
// presented groups, plus the certified fiber-solving demos behind them.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "weil/charts.hpp"
#include "weil/cohomology.hpp"
#include "weil/ift.hpp"
#include "weil/liegroup.hpp"
#include "weil/rigidity.hpp"
#include "weil/words.hpp"

namespace {

using namespace weil;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;       // file, parse, or argument errors
constexpr int kExitValidation = 2;  // inputs parsed but failed validation
constexpr int kExitRankWarning = 3;  // --strict and a borderline rank decision
constexpr int kExitNotRigid = 4;
constexpr int kExitConjugator = 5;  // conjugator recovery failed

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

bool machine_format(const std::string& format) {
  if (format == "machine") return true;
  if (format == "human") return false;
  throw CLI::ValidationError("--format must be 'human' or 'machine'");
}

int exit_code_for(const error& e) {
  switch (e.code()) {
    case errc::parse_error:
    case errc::unknown_generator:
    case errc::malformed_exponent:
      return kExitUsage;
    default:
      return kExitValidation;
  }
}

struct CohomologyArgs {
  std::string pres_file;
  std::string rep_file;
  std::string format = "human";
  double rank_tol = 0.0;
  bool strict = false;
};

int run_cohomology(const CohomologyArgs& args) {
  const words::Presentation pres = words::load_presentation(args.pres_file);
  const lie::Representation rep = lie::load_representation(args.rep_file, pres);
  const coh::GammaModule module = coh::module_from_representation(rep);

  const std::vector<int> subset = coh::saturate_relators(module, pres, args.rank_tol);
  const coh::H1Result h1 = coh::h1_dimension(module, pres, subset, args.rank_tol);

  std::string subset_text;
  for (std::size_t i = 0; i < subset.size(); ++i)
    subset_text += (i ? " " : "") + std::to_string(subset[i]);

  if (machine_format(args.format)) {
    std::cout << "num_generators = " << pres.num_generators() << "\n";
    std::cout << "num_relators = " << pres.num_relators() << "\n";
    std::cout << "algebra_dim = " << module.dimension() << "\n";
    std::cout << "relator_subset = " << subset_text << "\n";
    std::cout << "rank_d0 = " << h1.details.rank_d0 << "\n";
    std::cout << "rank_d1 = " << h1.details.rank_d1 << "\n";
    std::cout << "nullity_d1 = " << h1.details.nullity_d1 << "\n";
    std::cout << "complex_defect = " << fmt(h1.details.complex_defect) << "\n";
    std::cout << "h1_dim = " << h1.dimension << "\n";
    std::cout << "rank_warnings = " << h1.details.warnings.size() << "\n";
  } else {
    std::cout << "presentation: " << pres.num_generators() << " generators, "
              << pres.num_relators() << " relators\n";
    std::cout << "module: " << rep.group().name() << " adjoint, dimension "
              << module.dimension() << "\n";
    std::cout << "relator subset T': " << (subset.empty() ? "(empty)" : subset_text) << "\n";
    std::cout << "rank delta0:       " << h1.details.rank_d0 << "\n";
    std::cout << "rank delta1|T':    " << h1.details.rank_d1 << "\n";
    std::cout << "nullity delta1|T': " << h1.details.nullity_d1 << "\n";
    std::cout << "H^1 dimension:     " << h1.dimension << "\n";
    for (const std::string& w : h1.details.warnings) std::cout << "warning: " << w << "\n";
  }
  if (args.strict && !h1.details.warnings.empty()) return kExitRankWarning;
  return kExitOk;
}

struct RigidityArgs {
  std::string pres_file;
  std::string rep_file;
  std::string rep_prime_file;
  std::string format = "human";
  double rank_tol = 0.0;
  double fd_step = 1e-5;
  double tol = 1e-8;
  bool override_radius = false;
};

int run_rigidity(const RigidityArgs& args) {
  const words::Presentation pres = words::load_presentation(args.pres_file);
  const lie::Representation rep = lie::load_representation(args.rep_file, pres);

  rigidity::RigidityOptions options;
  options.rank_tol = args.rank_tol;
  options.fd_step = args.fd_step;
  rigidity::RigidityReport report = rigidity::check_local_rigidity(rep, options);

  int code = report.rigid ? kExitOk : kExitNotRigid;
  std::string failure;
  if (!args.rep_prime_file.empty()) {
    if (!report.rigid) {
      failure = "conjugator recovery requires a rigid reference representation";
    } else {
      try {
        const lie::Representation rep_prime =
            lie::load_representation(args.rep_prime_file, pres);
        rigidity::ConjugatorOptions copts;
        copts.tol = args.tol;
        copts.override_radius = args.override_radius;
        copts.rigidity = options;
        const rigidity::ConjugatorResult result =
            rigidity::recover_conjugator(rep, rep_prime, copts);
        report.conjugator = result.g.matrix();
        report.conjugation_residual = result.residual;
      } catch (const error& e) {
        failure = e.what();
        code = kExitConjugator;
      }
    }
  }

  if (machine_format(args.format)) {
    for (const std::string& line : report.machine_lines()) std::cout << line << "\n";
    if (!failure.empty()) std::cout << "conjugator_error = " << failure << "\n";
  } else {
    std::cout << report.text();
    if (!failure.empty()) std::cout << "conjugator recovery failed: " << failure << "\n";
  }
  return code;
}

struct TraceArgs {
  std::string chart;
  double target = 0.01;
  std::string format = "human";
  double tol = 0.0;
  bool no_override = false;
};

ift::ChartPair chart_by_name(const std::string& name) {
  if (name == "parabola") return ift::parabola_chart();
  if (name == "scaled-parabola") return ift::parabola_chart(0.5);
  if (name == "circle") return ift::circle_chart();
  fail(errc::parse_error, "unknown chart '" + name + "'");
}

Eigen::VectorXd chart_point(const std::string& name, double t) {
  Eigen::VectorXd x(1);
  x << t;
  return chart_by_name(name).phi.eval(x);
}

int run_fiber_trace(const TraceArgs& args, const char* label) {
  const ift::ChartPair chart = chart_by_name(args.chart);
  const ift::IftConstants constants = ift::certify_neighborhood(chart.phi, chart.psi);
  const Eigen::VectorXd y = chart_point(args.chart, args.target);

  ift::SolveOptions opts;
  opts.tol = args.tol;
  opts.override_radius = !args.no_override;
  const ift::FiberSolve solve = ift::solve_fiber(chart.phi, chart.psi, y, constants, opts);
  const double fiber_residual = (chart.phi.eval(solve.x) - y).norm();

  if (machine_format(args.format)) {
    std::cout << "demo = " << label << "\n";
    std::cout << "chart = " << args.chart << "\n";
    std::cout << "a = " << fmt(args.target) << "\n";
    std::cout << "c = " << fmt(constants.cmax) << "\n";
    std::cout << "delta = " << fmt(constants.delta) << "\n";
    std::cout << "w_radius = " << fmt(constants.w_radius) << "\n";
    std::cout << "target_norm = " << fmt(y.norm()) << "\n";
    std::cout << "inside_certified = " << (y.norm() < constants.w_radius ? "true" : "false")
              << "\n";
    std::cout << "iterations = " << solve.trace.iterations << "\n";
    std::cout << "converged = " << (solve.trace.converged ? "true" : "false") << "\n";
    std::cout << "halving_ok = " << (solve.trace.halving_ok ? "true" : "false") << "\n";
    for (std::size_t n = 0; n < solve.trace.u_norms.size(); ++n)
      std::cout << "u_norm_" << n << " = " << fmt(solve.trace.u_norms[n]) << "\n";
    std::cout << "x = " << fmt(solve.x(0)) << "\n";
    std::cout << "fiber_residual = " << fmt(fiber_residual) << "\n";
  } else {
    std::cout << args.chart << " fiber solve, target parameter a = " << fmt(args.target)
              << "\n";
    std::cout << "certified: C = " << fmt(constants.cmax) << ", delta = "
              << fmt(constants.delta) << ", w_radius = " << fmt(constants.w_radius) << "\n";
    std::cout << "||y|| = " << fmt(y.norm())
              << (y.norm() < constants.w_radius ? " (inside certified W)"
                                                : " (outside certified W, override active)")
              << "\n";
    std::cout << "iter  ||u_n||\n";
    for (std::size_t n = 0; n < solve.trace.u_norms.size(); ++n)
      std::cout << n << "     " << fmt(solve.trace.u_norms[n]) << "\n";
    std::cout << "x = " << fmt(solve.x(0)) << ", fiber residual = " << fmt(fiber_residual)
              << "\n";
    std::cout << "halving: " << (solve.trace.halving_ok ? "ok" : "violated") << "\n";
  }
  return kExitOk;
}

int run_shrinking_radius(int n_max, const std::string& format) {
  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) radii.push_back(ift::shrinking_radius_demo(n));
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (radii[i + 1] >= radii[i]) decreasing = false;

  if (machine_format(format)) {
    std::cout << "demo = shrinking-radius\n";
    std::cout << "n_max = " << n_max << "\n";
    for (std::size_t i = 0; i < radii.size(); ++i)
      std::cout << "w_radius_" << (i + 1) << " = " << fmt(radii[i]) << "\n";
    std::cout << "strictly_decreasing = " << (decreasing ? "true" : "false") << "\n";
  } else {
    std::cout << "truncated counter-example: certified radius by truncation rank\n";
    std::cout << "n     w_radius\n";
    for (std::size_t i = 0; i < radii.size(); ++i)
      std::cout << (i + 1) << "     " << fmt(radii[i]) << "\n";
    std::cout << "strictly decreasing: " << (decreasing ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified cohomology and local-rigidity computations"};
  app.require_subcommand(1);

  double env_rank_tol = 0.0;
  if (const char* env = std::getenv("WEIL_RANK_TOL")) env_rank_tol = std::atof(env);

  CohomologyArgs coh_args;
  coh_args.rank_tol = env_rank_tol;
  auto* coh_cmd = app.add_subcommand("cohomology", "assemble delta0/delta1 and compute H^1");
  coh_cmd->add_option("presentation", coh_args.pres_file, "presentation file")->required();
  coh_cmd->add_option("representation", coh_args.rep_file, "representation file")->required();
  coh_cmd->add_option("--rank-tol", coh_args.rank_tol, "numerical rank cutoff override");
  coh_cmd->add_option("--format", coh_args.format, "human | machine");
  coh_cmd->add_flag("--strict", coh_args.strict, "exit 3 on borderline rank decisions");

  RigidityArgs rig_args;
  rig_args.rank_tol = env_rank_tol;
  auto* rig_cmd = app.add_subcommand("rigidity", "local rigidity verdict and conjugator");
  rig_cmd->add_option("presentation", rig_args.pres_file, "presentation file")->required();
  rig_cmd->add_option("representation", rig_args.rep_file, "representation file")->required();
  rig_cmd->add_option("perturbed", rig_args.rep_prime_file,
                      "perturbed representation; triggers conjugator recovery");
  rig_cmd->add_option("--rank-tol", rig_args.rank_tol, "numerical rank cutoff override");
  rig_cmd->add_option("--fd-step", rig_args.fd_step, "finite-difference step");
  rig_cmd->add_option("--tol", rig_args.tol, "conjugation residual bound");
  rig_cmd->add_flag("--override-radius", rig_args.override_radius,
                    "solve outside the certified neighborhood");
  rig_cmd->add_option("--format", rig_args.format, "human | machine");

  TraceArgs fiber_args;
  auto* fiber_cmd = app.add_subcommand("solve-fiber", "run the certified fiber solver");
  fiber_cmd->add_option("chart", fiber_args.chart, "parabola | scaled-parabola | circle")
      ->required();
  fiber_cmd->add_option("--target", fiber_args.target, "curve parameter of the target point");
  fiber_cmd->add_option("--tol", fiber_args.tol, "convergence tolerance (0 = scaled default)");
  fiber_cmd->add_flag("--no-override", fiber_args.no_override,
                      "fail instead of solving outside the certified radius");
  fiber_cmd->add_option("--format", fiber_args.format, "human | machine");

  std::string demo_name;
  double demo_a = 0.01;
  int demo_n = 10;
  std::string demo_format = "human";
  auto* demo_cmd = app.add_subcommand("demo", "built-in demonstrations");
  demo_cmd->add_option("name", demo_name, "parabola | circle | shrinking-radius")->required();
  demo_cmd->add_option("--a", demo_a, "target parameter for the chart demos");
  demo_cmd->add_option("--n", demo_n, "largest truncation rank for shrinking-radius");
  demo_cmd->add_option("--format", demo_format, "human | machine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (coh_cmd->parsed()) return run_cohomology(coh_args);
    if (rig_cmd->parsed()) return run_rigidity(rig_args);
    if (fiber_cmd->parsed()) return run_fiber_trace(fiber_args, "solve-fiber");
    if (demo_cmd->parsed()) {
      if (demo_name == "shrinking-radius") return run_shrinking_radius(demo_n, demo_format);
      if (demo_name == "parabola" || demo_name == "circle") {
        TraceArgs args;
        args.chart = demo_name;
        args.target = demo_a;
        if (demo_name == "circle" && demo_cmd->count("--a") == 0) args.target = 0.02;
        args.format = demo_format;
        return run_fiber_trace(args, "demo");
      }
      std::cerr << "error: unknown demo '" << demo_name << "'\n";
      return kExitUsage;
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
