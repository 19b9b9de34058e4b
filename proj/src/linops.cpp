#include "weil/linops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace weil::linops {

namespace {

std::string dims(const LinearOperator& a) {
  std::ostringstream os;
  os << a.codomain_dim() << "x" << a.domain_dim();
  return os.str();
}

}  // namespace

LinearOperator::LinearOperator(MatrixXd m) : mat_(std::move(m)) {
  if (!mat_.allFinite())
    fail(errc::invalid_argument, "operator has non-finite entries");
}

VectorXd LinearOperator::apply(const VectorXd& x) const {
  if (x.size() != mat_.cols())
    fail(errc::invalid_argument, "vector length does not match operator domain");
  return mat_ * x;
}

double rank_threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
  const double eps = std::numeric_limits<double>::epsilon();
  return eps * static_cast<double>(std::max(rows, cols)) * sigma_max;
}

VectorXd singular_values(const LinearOperator& a) {
  if (a.domain_dim() == 0 || a.codomain_dim() == 0) return VectorXd();
  Eigen::JacobiSVD<MatrixXd> svd(a.matrix());
  return svd.singularValues();
}

double operator_norm(const LinearOperator& a) {
  VectorXd sv = singular_values(a);
  return sv.size() == 0 ? 0.0 : sv(0);
}

RightInverseCertificate::RightInverseCertificate(const LinearOperator& op, double rank_tol)
    : original_(op.matrix()) {
  const Eigen::Index m = op.codomain_dim(), n = op.domain_dim();
  if (m == 0 || n == 0) {
    pinv_ = LinearOperator(MatrixXd::Zero(n, m));
    rank_tol_ = rank_tol;
    return;
  }
  Eigen::JacobiSVD<MatrixXd> svd(original_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  sigma_max_ = sv(0);
  rank_tol_ = rank_tol > 0.0 ? rank_tol : rank_threshold(m, n, sigma_max_);
  while (rank_ < sv.size() && sv(rank_) > rank_tol_) ++rank_;
  if (rank_ > 0) {
    sigma_min_plus_ = sv(rank_ - 1);
    bound_ = 1.0 / sigma_min_plus_;
  }
  MatrixXd pinv = MatrixXd::Zero(n, m);
  for (Eigen::Index k = 0; k < rank_; ++k)
    pinv += svd.matrixV().col(k) * svd.matrixU().col(k).transpose() / sv(k);
  pinv_ = LinearOperator(std::move(pinv));
}

VectorXd RightInverseCertificate::apply(const VectorXd& y) const {
  return pinv_.apply(y);
}

VectorXd RightInverseCertificate::solve(const VectorXd& y, double tol) const {
  VectorXd x = pinv_.apply(y);
  const double residual = (original_ * x - y).norm();
  if (residual > tol * y.norm())
    fail(errc::y_not_in_image, "least-squares residual " + std::to_string(residual) +
                                   " exceeds tol * ||y||");
  return x;
}

VectorXd min_norm_preimage(const LinearOperator& a, const VectorXd& y, double tol) {
  if (y.size() != a.codomain_dim())
    fail(errc::invalid_argument, "right-hand side length does not match codomain");
  return RightInverseCertificate(a).solve(y, tol);
}

namespace {

// Open-mapping constant; 1 for empty operators (image {0}, bound vacuous).
double open_constant(const LinearOperator& op, const char* label) {
  if (op.domain_dim() == 0 || op.codomain_dim() == 0) return 1.0;
  RightInverseCertificate cert(op);
  if (cert.rank() == 0)
    fail(errc::zero_operator,
         std::string(label) + " has no nonzero singular value; open-mapping constant undefined");
  return cert.bound();
}

}  // namespace

BoundConstants bound_constants(const LinearOperator& dphi0, const LinearOperator& dpsi0) {
  BoundConstants out{};
  out.c1 = open_constant(dphi0, "dphi(0)");
  out.c2 = open_constant(dpsi0, "dpsi(0)");
  out.c = std::max({out.c1, out.c2, operator_norm(dphi0), operator_norm(dpsi0), 1.0});
  return out;
}

PerturbationSolve surjective_perturbation_solve(const LinearOperator& f,
                                                const LinearOperator& g,
                                                const VectorXd& v, double tol) {
  if (g.domain_dim() != f.domain_dim() || g.codomain_dim() != f.codomain_dim())
    fail(errc::invalid_argument, "f is " + dims(f) + " but g is " + dims(g));
  if (v.size() != f.codomain_dim())
    fail(errc::invalid_argument, "right-hand side length does not match codomain");

  RightInverseCertificate cert(f);
  if (cert.rank() != f.codomain_dim())
    fail(errc::not_surjective, "f has numerical rank " + std::to_string(cert.rank()) +
                                   " < codomain dimension " +
                                   std::to_string(f.codomain_dim()));
  const double r = cert.sigma_min_plus();
  const double a = operator_norm(g) / r;
  if (a >= 1.0)
    fail(errc::perturbation_too_large,
         "||g|| / sigma_min(f) = " + std::to_string(a) + " >= 1");

  PerturbationSolve out;
  out.contraction = a;
  out.radius = r;
  out.solution = VectorXd::Zero(f.domain_dim());

  const double stop = tol * (1.0 + v.norm());
  VectorXd rhs = v;
  // a^n ||v|| < stop bounds the series length; guard the a ~ 0 case.
  const int max_terms =
      a <= 0.0 ? 1
               : std::min(100000, 2 + static_cast<int>(std::log(stop / (1.0 + v.norm())) /
                                                       std::log(a)));
  for (int n = 0; n < max_terms; ++n) {
    VectorXd w = cert.apply(rhs);
    out.solution += w;
    // (f+g) (w_0 + ... + w_n) - v telescopes to g w_n: f consumes each
    // previous correction exactly. Recording the telescoped form keeps the
    // trace free of the cancellation noise of a recomputed defect.
    rhs = -g.apply(w);
    out.residual_norms.push_back(rhs.norm());
    if (rhs.norm() <= stop) break;
  }
  return out;
}

double embedding_radius(const LinearOperator& f) {
  if (f.domain_dim() == 0) return std::numeric_limits<double>::infinity();
  if (f.domain_dim() > f.codomain_dim()) return 0.0;  // nontrivial kernel
  VectorXd sv = singular_values(f);
  return sv(sv.size() - 1);
}

namespace {

bool orthonormal_columns(const MatrixXd& m, double tol) {
  if (m.cols() == 0) return true;
  MatrixXd gram = m.transpose() * m;
  return (gram - MatrixXd::Identity(m.cols(), m.cols())).norm() <= tol;
}

}  // namespace

ExactnessTransfer exactness_transfer(const LinearOperator& f, const LinearOperator& g,
                                     const LinearOperator& f_tilde,
                                     const LinearOperator& g_tilde, const VectorXd& v,
                                     double tol) {
  const Eigen::Index ny = f.codomain_dim();
  if (g.domain_dim() != ny || f_tilde.codomain_dim() != ny || g_tilde.domain_dim() != ny ||
      f_tilde.domain_dim() != f.domain_dim() || g_tilde.codomain_dim() != g.codomain_dim() ||
      v.size() != ny)
    fail(errc::invalid_argument, "chain dimensions are inconsistent");

  if (!orthonormal_columns(f.matrix(), 1e-8))
    fail(errc::invalid_argument,
         "f must have orthonormal columns; see normalize_chain");
  if (!orthonormal_columns(g.matrix().transpose(), 1e-8))
    fail(errc::invalid_argument, "g must have orthonormal rows; see normalize_chain");

  RightInverseCertificate f_cert(f), g_cert(g);
  const double gf = (g.matrix() * f.matrix()).norm();
  if (gf > 1e-10 || f_cert.rank() + g_cert.rank() != ny)
    fail(errc::not_exact, "im(f) != ker(g): ||g f|| = " + std::to_string(gf) +
                              ", rank f + rank g = " +
                              std::to_string(f_cert.rank() + g_cert.rank()) + " vs " +
                              std::to_string(ny));

  const double delta = std::max((f.matrix() - f_tilde.matrix()).norm(),
                                (g.matrix() - g_tilde.matrix()).norm());
  if (delta >= 0.1)
    fail(errc::perturbation_too_large,
         "max(||f - f~||, ||g - g~||) = " + std::to_string(delta) + " >= 1/10");
  const double chain_defect = (g_tilde.matrix() * f_tilde.matrix()).norm();
  if (chain_defect > tol)
    fail(errc::invalid_argument,
         "||g~ f~|| = " + std::to_string(chain_defect) + " exceeds tol");
  if (g_tilde.codomain_dim() > 0 && g_tilde.apply(v).norm() > tol * (1.0 + v.norm()))
    fail(errc::invalid_argument, "v is not in ker(g~) within tol");

  ExactnessTransfer out;
  out.solution = VectorXd::Zero(f.domain_dim());
  VectorXd vn = v;
  out.v_norms.push_back(vn.norm());
  const double stop = tol * (1.0 + v.norm());
  const int max_steps = 200;
  for (int step = 0; vn.norm() > stop; ++step) {
    if (step >= max_steps)
      fail(errc::max_iterations, "exactness transfer did not reach tolerance");
    VectorXd wn = g_cert.apply(g.apply(vn));       // g(w_n) = g(v_n), minimum norm
    VectorXd xn = f_cert.apply(vn - wn);           // v_n - w_n lies in ker g = im f
    vn -= f_tilde.apply(xn);
    out.solution += xn;
    if (vn.norm() > 0.5 * out.v_norms.back() + 1e-12)
      fail(errc::halving_violated,
           "||v_{j+1}|| = " + std::to_string(vn.norm()) + " > ||v_j|| / 2 = " +
               std::to_string(0.5 * out.v_norms.back()));
    out.v_norms.push_back(vn.norm());
  }
  return out;
}

LinearOperator inverse_compose(const LinearOperator& f, const LinearOperator& g,
                               double tol) {
  if (g.codomain_dim() != f.codomain_dim())
    fail(errc::invalid_argument, "g codomain does not match f codomain");
  RightInverseCertificate cert(f);
  if (cert.rank() < f.domain_dim())
    fail(errc::not_embedding, "f has a nontrivial kernel, f^{-1} undefined");
  MatrixXd a(f.domain_dim(), g.domain_dim());
  for (Eigen::Index j = 0; j < g.domain_dim(); ++j) {
    VectorXd col = g.matrix().col(j);
    VectorXd x = cert.apply(col);
    const double residual = (f.matrix() * x - col).norm();
    if (residual > tol * (1.0 + col.norm()))
      fail(errc::image_mismatch, "column " + std::to_string(j) +
                                     " of g leaves im(f): residual " +
                                     std::to_string(residual));
    a.col(j) = x;
  }
  return LinearOperator(std::move(a));
}

std::pair<LinearOperator, LinearOperator> normalize_chain(const LinearOperator& f,
                                                          const LinearOperator& g) {
  auto orthonormal_image = [](const MatrixXd& m) {
    if (m.cols() == 0 || m.rows() == 0) return m;
    Eigen::ColPivHouseholderQR<MatrixXd> qr(m);
    const Eigen::Index r = qr.rank();
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(m.rows(), r);
    return q;
  };
  MatrixXd fn = orthonormal_image(f.matrix());
  MatrixXd gn = orthonormal_image(g.matrix().transpose()).transpose();
  return {LinearOperator(std::move(fn)), LinearOperator(std::move(gn))};
}

}  // namespace weil::linops
