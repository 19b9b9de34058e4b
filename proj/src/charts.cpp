#include "weil/charts.hpp"

#include <cmath>

namespace weil::ift {

ChartPair parabola_chart(double scale) {
  ChartPair out;
  const double s = scale;
  out.phi.domain_dim = 1;
  out.phi.codomain_dim = 2;
  out.phi.eval = [s](const VectorXd& x) {
    VectorXd y(2);
    y << s * x(0), s * s * x(0) * x(0);
    return y;
  };
  out.phi.jacobian = [s](const VectorXd& x) {
    MatrixXd j(2, 1);
    j << s, 2.0 * s * s * x(0);
    return j;
  };
  out.phi.deriv_lipschitz = 2.0 * s * s;
  out.phi.domain_radius = 1.0;

  out.psi.domain_dim = 2;
  out.psi.codomain_dim = 1;
  out.psi.eval = [](const VectorXd& y) {
    VectorXd z(1);
    z << y(1) - y(0) * y(0);
    return z;
  };
  out.psi.jacobian = [](const VectorXd& y) {
    MatrixXd j(1, 2);
    j << -2.0 * y(0), 1.0;
    return j;
  };
  out.psi.deriv_lipschitz = 2.0;
  out.psi.domain_radius = 1.0;
  return out;
}

ChartPair circle_chart() {
  ChartPair out;
  out.phi.domain_dim = 1;
  out.phi.codomain_dim = 2;
  out.phi.eval = [](const VectorXd& x) {
    VectorXd y(2);
    y << std::sin(x(0)), std::cos(x(0)) - 1.0;
    return y;
  };
  out.phi.jacobian = [](const VectorXd& x) {
    MatrixXd j(2, 1);
    j << std::cos(x(0)), -std::sin(x(0));
    return j;
  };
  out.phi.deriv_lipschitz = 1.0;
  out.phi.domain_radius = 1.0;

  out.psi.domain_dim = 2;
  out.psi.codomain_dim = 1;
  out.psi.eval = [](const VectorXd& y) {
    VectorXd z(1);
    z << y(0) * y(0) + (y(1) + 1.0) * (y(1) + 1.0) - 1.0;
    return z;
  };
  out.psi.jacobian = [](const VectorXd& y) {
    MatrixXd j(1, 2);
    j << 2.0 * y(0), 2.0 * (y(1) + 1.0);
    return j;
  };
  out.psi.deriv_lipschitz = 2.0;
  out.psi.domain_radius = 1.0;
  return out;
}

ChartPair truncation_chart(int n) {
  ChartPair out;
  out.phi.domain_dim = 0;
  out.phi.codomain_dim = n;
  out.phi.eval = [n](const VectorXd&) { return VectorXd::Zero(n); };
  out.phi.jacobian = [n](const VectorXd&) { return MatrixXd(n, 0); };
  out.phi.deriv_lipschitz = 0.0;
  out.phi.domain_radius = 1.0;

  MatrixXd a = MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) a(k, k) = -1.0 / (k + 1.0);
  out.psi.domain_dim = n;
  out.psi.codomain_dim = n;
  out.psi.eval = [a](const VectorXd& v) -> VectorXd { return v.norm() * v + a * v; };
  out.psi.jacobian = [a, n](const VectorXd& v) -> MatrixXd {
    const double r = v.norm();
    if (r == 0.0) return a;
    return a + r * MatrixXd::Identity(n, n) + (v * v.transpose()) / r;
  };
  out.psi.deriv_lipschitz = 2.0;
  out.psi.domain_radius = 1.0;
  return out;
}

}  // namespace weil::ift
