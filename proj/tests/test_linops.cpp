#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "weil/linops.hpp"

using namespace weil;
using linops::LinearOperator;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

MatrixXd random_orthonormal_cols(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<MatrixXd> qr(random_matrix(rows, cols, rng));
  return qr.householderQ() * MatrixXd::Identity(rows, cols);
}

// Spectral-norm oracle: power iteration on A^T A.
double operator_norm_oracle(const MatrixXd& a, int iters = 2000) {
  VectorXd x = VectorXd::Ones(a.cols()).normalized();
  for (int k = 0; k < iters; ++k) x = (a.transpose() * (a * x)).normalized();
  return std::sqrt(x.dot(a.transpose() * (a * x)));
}

// Pseudo-inverse oracle through the eigendecomposition of A^T A, an
// algebraic route independent of the SVD used by the implementation.
// The cutoff is relative to the largest eigenvalue.
MatrixXd pinv_oracle(const MatrixXd& a, double rel_cutoff = 1e-10) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.transpose() * a);
  const double lambda_max = es.eigenvalues().maxCoeff();
  MatrixXd gram_pinv = MatrixXd::Zero(a.cols(), a.cols());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda > rel_cutoff * lambda_max)
      gram_pinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / lambda;
  }
  return gram_pinv * a.transpose();
}

}  // namespace

TEST_CASE("operator_norm on fixed matrices") {
  CHECK(linops::operator_norm(LinearOperator(MatrixXd::Identity(2, 2))) == 1.0);

  MatrixXd d(2, 2);
  d << 2.0, 0.0, 0.0, 0.5;
  CHECK(linops::operator_norm(LinearOperator(d)) == 2.0);

  CHECK(linops::operator_norm(LinearOperator(MatrixXd(3, 0))) == 0.0);
}

TEST_CASE("operator_norm matches the power-iteration oracle") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd a = random_matrix(5, 3, rng);
    CHECK_THAT(linops::operator_norm(LinearOperator(a)),
               Catch::Matchers::WithinAbs(operator_norm_oracle(a), 1e-10));
  }
}

TEST_CASE("LinearOperator rejects non-finite entries") {
  MatrixXd bad = MatrixXd::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(LinearOperator(bad), weil::error);
}

TEST_CASE("min_norm_preimage kills the kernel component") {
  MatrixXd a(1, 2);
  a << 1.0, 0.0;
  VectorXd y(1);
  y << 1.0;
  VectorXd x = linops::min_norm_preimage(LinearOperator(a), y, 1e-12);
  CHECK_THAT(x(0), Catch::Matchers::WithinAbs(1.0, 1e-14));
  CHECK_THAT(x(1), Catch::Matchers::WithinAbs(0.0, 1e-14));
}

TEST_CASE("min_norm_preimage solves a diagonal system") {
  MatrixXd a(2, 2);
  a << 2.0, 0.0, 0.0, 4.0;
  VectorXd y(2);
  y << 2.0, 4.0;
  VectorXd x = linops::min_norm_preimage(LinearOperator(a), y, 1e-12);
  CHECK_THAT((x - VectorXd::Ones(2)).norm(), Catch::Matchers::WithinAbs(0.0, 1e-14));
}

TEST_CASE("min_norm_preimage matches the pseudo-inverse oracle on rank-2 4x4") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    // rank-2 by construction: two rank-one outer products
    MatrixXd a = random_matrix(4, 1, rng) * random_matrix(1, 4, rng) +
                 random_matrix(4, 1, rng) * random_matrix(1, 4, rng);
    VectorXd y = a * random_vector(4, rng);
    VectorXd x = linops::min_norm_preimage(LinearOperator(a), y, 1e-10);
    VectorXd x_oracle = pinv_oracle(a) * y;
    CHECK((x - x_oracle).norm() <= 1e-10 * (1.0 + x_oracle.norm()));
  }
}

TEST_CASE("min_norm_preimage rejects targets outside the image") {
  MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 0.0;
  VectorXd y(2);
  y << 0.0, 1.0;
  CHECK_THROWS_MATCHES(linops::min_norm_preimage(LinearOperator(a), y, 1e-8), weil::error,
                       Catch::Matchers::Predicate<weil::error>([](const weil::error& e) {
                         return e.code() == errc::y_not_in_image;
                       }));
}

TEST_CASE("minimum-norm property against any witness") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    MatrixXd a = random_matrix(3, 5, rng);
    VectorXd v = random_vector(5, rng);
    VectorXd x = linops::min_norm_preimage(LinearOperator(a), a * v, 1e-8);
    CHECK(x.norm() <= v.norm() + 1e-9);
  }
}

TEST_CASE("bound_constants on hand-checked pairs") {
  MatrixXd col(2, 1), row(1, 2);
  col << 1.0, 0.0;
  row << 0.0, 1.0;
  auto b = linops::bound_constants(LinearOperator(col), LinearOperator(row));
  CHECK_THAT(b.c1, Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(b.c2, Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(b.c, Catch::Matchers::WithinAbs(1.0, 1e-15));

  auto ident = linops::bound_constants(LinearOperator(MatrixXd::Identity(2, 2)),
                                       LinearOperator(MatrixXd::Identity(2, 2)));
  CHECK(ident.c == 1.0);

  MatrixXd half(1, 1), one(1, 1);
  half << 0.5;
  one << 1.0;
  auto scaled = linops::bound_constants(LinearOperator(half), LinearOperator(one));
  CHECK_THAT(scaled.c1, Catch::Matchers::WithinAbs(2.0, 1e-15));
  CHECK_THAT(scaled.c, Catch::Matchers::WithinAbs(2.0, 1e-15));
}

TEST_CASE("bound_constants reports a zero operator instead of defaulting") {
  CHECK_THROWS_MATCHES(linops::bound_constants(LinearOperator(MatrixXd::Zero(2, 2)),
                                               LinearOperator(MatrixXd::Identity(2, 2))),
                       weil::error, Catch::Matchers::Predicate<weil::error>([](const auto& e) {
                         return e.code() == errc::zero_operator;
                       }));
}

TEST_CASE("bound_constants treats empty operators as vacuously open") {
  // Zero-dimensional domain: the image is {0}, any constant certifies it.
  auto b = linops::bound_constants(LinearOperator(MatrixXd(3, 0)),
                                   LinearOperator(MatrixXd::Identity(3, 3)));
  CHECK(b.c1 == 1.0);
  CHECK(b.c == 1.0);
}

TEST_CASE("perturbation solve with g = 0 is a single preimage step") {
  std::mt19937_64 rng(404);
  MatrixXd f = random_matrix(3, 5, rng);
  VectorXd v = random_vector(3, rng);
  auto sol = linops::surjective_perturbation_solve(
      LinearOperator(f), LinearOperator(MatrixXd::Zero(3, 5)), v, 1e-12);
  VectorXd direct = linops::min_norm_preimage(LinearOperator(f), v, 1e-10);
  CHECK((sol.solution - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
  CHECK(sol.residual_norms.size() == 1);
}

TEST_CASE("perturbation solve matches a direct 2x2 inverse") {
  MatrixXd f = MatrixXd::Identity(2, 2);
  MatrixXd g(2, 2);
  g << 0.0, 0.5, 0.0, 0.0;
  VectorXd v(2);
  v << 1.0, 0.0;
  auto sol = linops::surjective_perturbation_solve(LinearOperator(f), LinearOperator(g), v,
                                                   1e-14);
  VectorXd direct = (f + g).inverse() * v;
  CHECK((sol.solution - direct).norm() <= 1e-10);
}

TEST_CASE("perturbation solve residuals follow the geometric series") {
  MatrixXd f = MatrixXd::Identity(2, 2);
  MatrixXd g = 0.5 * MatrixXd::Identity(2, 2);
  VectorXd v(2);
  v << 1.0, 0.0;
  auto sol =
      linops::surjective_perturbation_solve(LinearOperator(f), LinearOperator(g), v, 1e-12);
  CHECK_THAT(sol.contraction, Catch::Matchers::WithinAbs(0.5, 1e-15));
  for (std::size_t n = 0; n < sol.residual_norms.size(); ++n)
    CHECK(sol.residual_norms[n] <=
          std::pow(0.5, static_cast<double>(n + 1)) * v.norm() * (1.0 + 1e-9));
}

TEST_CASE("perturbation solve obeys the residual and norm bounds on random input") {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> pick_a(0.1, 0.9);
  std::uniform_int_distribution<int> pick_rows(1, 8);
  std::uniform_int_distribution<int> pick_extra(0, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = pick_rows(rng);
    const int cols = rows + pick_extra(rng);
    MatrixXd f = random_matrix(rows, cols, rng);
    const double r = linops::embedding_radius(LinearOperator(f.transpose()));
    if (r < 0.05) continue;  // skip nearly rank-deficient draws
    const double a = pick_a(rng);
    MatrixXd g = random_matrix(rows, cols, rng);
    g *= a * r / linops::operator_norm(LinearOperator(g));
    VectorXd v = random_vector(rows, rng);

    auto sol = linops::surjective_perturbation_solve(LinearOperator(f), LinearOperator(g), v,
                                                     1e-11);
    const double a_actual = sol.contraction;
    for (std::size_t n = 0; n < sol.residual_norms.size(); ++n)
      CHECK(sol.residual_norms[n] <=
            std::pow(a_actual, static_cast<double>(n + 1)) * v.norm() * (1.0 + 1e-9));
    CHECK(sol.solution.norm() <= v.norm() / (sol.radius * (1.0 - a_actual)) + 1e-9);

    VectorXd oracle = pinv_oracle(f + g) * v;
    CHECK(((f + g) * sol.solution - v).norm() <= 1e-8 * (1.0 + v.norm()));
    CHECK(((f + g) * sol.solution - (f + g) * oracle).norm() <= 1e-8 * (1.0 + v.norm()));
  }
}

TEST_CASE("perturbation solve rejects bad hypotheses") {
  MatrixXd f = MatrixXd::Identity(2, 2);
  VectorXd v = VectorXd::Ones(2);
  CHECK_THROWS_MATCHES(
      linops::surjective_perturbation_solve(LinearOperator(f),
                                            LinearOperator(2.0 * MatrixXd::Identity(2, 2)), v,
                                            1e-10),
      weil::error, Catch::Matchers::Predicate<weil::error>([](const auto& e) {
        return e.code() == errc::perturbation_too_large;
      }));
  MatrixXd flat(2, 2);
  flat << 1.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_MATCHES(
      linops::surjective_perturbation_solve(LinearOperator(flat),
                                            LinearOperator(MatrixXd::Zero(2, 2)), v, 1e-10),
      weil::error, Catch::Matchers::Predicate<weil::error>([](const auto& e) {
        return e.code() == errc::not_surjective;
      }));
}

TEST_CASE("embedding_radius on fixed and random operators") {
  std::mt19937_64 rng(606);
  CHECK(linops::embedding_radius(LinearOperator(random_orthonormal_cols(5, 3, rng))) ==
        Catch::Approx(1.0).margin(1e-12));

  MatrixXd d(2, 2);
  d << 3.0, 0.0, 0.0, 2.0;
  CHECK(linops::embedding_radius(LinearOperator(d)) == 2.0);

  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd f = random_matrix(6, 3, rng);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(f.transpose() * f);
    const double oracle = std::sqrt(es.eigenvalues().minCoeff());
    CHECK_THAT(linops::embedding_radius(LinearOperator(f)),
               Catch::Matchers::WithinAbs(oracle, 1e-12));
  }

  CHECK(linops::embedding_radius(LinearOperator(MatrixXd::Ones(2, 3))) == 0.0);
}

TEST_CASE("embedding_radius is stable under perturbation") {
  std::mt19937_64 rng(707);
  for (int trial = 0; trial < 100; ++trial) {
    MatrixXd f = random_matrix(6, 4, rng);
    MatrixXd g = 0.3 * random_matrix(6, 4, rng);
    const double lhs = linops::embedding_radius(LinearOperator(f + g));
    const double rhs = linops::embedding_radius(LinearOperator(f)) -
                       linops::operator_norm(LinearOperator(g));
    CHECK(lhs >= rhs - 1e-9);
  }
}

namespace {

struct Chain {
  MatrixXd f, g, ft, gt;
};

// 1 -> 3 -> 2 exact chain: f = e1, g picks coordinates 2 and 3, then a
// perturbation of norm <= eps with gt * ft = 0 exactly.
Chain perturbed_chain(std::mt19937_64& rng, double eps) {
  Chain c;
  c.f = MatrixXd::Zero(3, 1);
  c.f(0, 0) = 1.0;
  c.g = MatrixXd::Zero(2, 3);
  c.g(0, 1) = 1.0;
  c.g(1, 2) = 1.0;
  MatrixXd df = random_matrix(3, 1, rng);
  c.ft = c.f + (eps / 2.0) * df / df.norm();
  MatrixXd dg = random_matrix(2, 3, rng);
  MatrixXd gt0 = c.g + (eps / 2.0) * dg / dg.norm();
  // re-impose gt * ft = 0 by removing the ft-component of each row
  c.gt = gt0 * (MatrixXd::Identity(3, 3) - c.ft * c.ft.transpose() / c.ft.squaredNorm());
  return c;
}

}  // namespace

TEST_CASE("exactness transfer on the unperturbed chain is one step") {
  std::mt19937_64 rng(808);
  Chain c = perturbed_chain(rng, 0.0);
  VectorXd u(1);
  u << 0.7;
  auto result = linops::exactness_transfer(LinearOperator(c.f), LinearOperator(c.g),
                                           LinearOperator(c.f), LinearOperator(c.g),
                                           c.f * u, 1e-12);
  CHECK((result.solution - u).norm() <= 1e-12);
  CHECK(result.v_norms.size() == 2);  // initial norm, then 0
}

TEST_CASE("exactness transfer handles v = 0") {
  std::mt19937_64 rng(909);
  Chain c = perturbed_chain(rng, 0.05);
  auto result = linops::exactness_transfer(LinearOperator(c.f), LinearOperator(c.g),
                                           LinearOperator(c.ft), LinearOperator(c.gt),
                                           VectorXd::Zero(3), 1e-10);
  CHECK(result.solution.norm() == 0.0);
}

TEST_CASE("exactness transfer halves and matches least squares on seeded trials") {
  std::mt19937_64 rng(1010);
  for (int trial = 0; trial < 100; ++trial) {
    Chain c = perturbed_chain(rng, 0.05);
    // v in ker(gt): project a random vector
    linops::RightInverseCertificate gt_cert{LinearOperator(c.gt)};
    VectorXd w = random_vector(3, rng);
    VectorXd v = w - gt_cert.apply(c.gt * w);
    if (v.norm() < 1e-3) continue;

    auto result = linops::exactness_transfer(LinearOperator(c.f), LinearOperator(c.g),
                                             LinearOperator(c.ft), LinearOperator(c.gt), v,
                                             1e-10);
    for (std::size_t j = 0; j + 1 < result.v_norms.size(); ++j)
      CHECK(result.v_norms[j + 1] <= 0.5 * result.v_norms[j] + 1e-12);
    CHECK((c.ft * result.solution - v).norm() <= 1e-8 * (1.0 + v.norm()));

    // unique solution: ft has full column rank, compare against least squares
    VectorXd oracle = c.ft.colPivHouseholderQr().solve(v);
    CHECK((result.solution - oracle).norm() <= 1e-8 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("exactness transfer rejects broken hypotheses") {
  std::mt19937_64 rng(1111);
  Chain c = perturbed_chain(rng, 0.05);
  VectorXd v = VectorXd::Zero(3);

  SECTION("perturbation above 1/10") {
    MatrixXd ft = c.f;
    ft(1, 0) += 0.2;
    CHECK_THROWS_MATCHES(
        linops::exactness_transfer(LinearOperator(c.f), LinearOperator(c.g),
                                   LinearOperator(ft), LinearOperator(c.g * 0.0), v, 1e-8),
        weil::error, Catch::Matchers::Predicate<weil::error>([](const auto& e) {
          return e.code() == errc::perturbation_too_large;
        }));
  }
  SECTION("non-exact chain") {
    // g sees only the third coordinate: ker(g) is 2-dimensional but im(f)
    // is a line, so the chain is not exact although g f = 0.
    MatrixXd g0 = MatrixXd::Zero(1, 3);
    g0(0, 2) = 1.0;
    CHECK_THROWS_MATCHES(
        linops::exactness_transfer(LinearOperator(c.f), LinearOperator(g0),
                                   LinearOperator(c.f), LinearOperator(g0), v, 1e-8),
        weil::error, Catch::Matchers::Predicate<weil::error>([](const auto& e) {
          return e.code() == errc::not_exact;
        }));
  }
  SECTION("unnormalized f") {
    CHECK_THROWS_AS(
        linops::exactness_transfer(LinearOperator(2.0 * c.f), LinearOperator(c.g),
                                   LinearOperator(2.0 * c.f), LinearOperator(c.g), v, 1e-8),
        weil::error);
  }
}

TEST_CASE("normalize_chain produces the normalized hypotheses") {
  std::mt19937_64 rng(1212);
  MatrixXd f = 3.0 * random_orthonormal_cols(4, 2, rng);
  MatrixXd g0 = random_matrix(2, 4, rng);
  // build g with row space orthogonal to im(f)
  MatrixXd proj = MatrixXd::Identity(4, 4) - f * (f.transpose() * f).inverse() * f.transpose();
  auto [fn, gn] = linops::normalize_chain(LinearOperator(f), LinearOperator(g0 * proj));
  CHECK((fn.matrix().transpose() * fn.matrix() - MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  CHECK((gn.matrix() * gn.matrix().transpose() - MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  CHECK((gn.matrix() * fn.matrix()).norm() <= 1e-12);
}

TEST_CASE("inverse_compose recovers the factor") {
  std::mt19937_64 rng(1313);
  MatrixXd f = random_orthonormal_cols(5, 3, rng);

  SECTION("g = f gives the identity") {
    auto a = linops::inverse_compose(LinearOperator(f), LinearOperator(f));
    CHECK((a.matrix() - MatrixXd::Identity(3, 3)).norm() <= 1e-12);
  }
  SECTION("g = f M returns M") {
    MatrixXd m = random_matrix(3, 3, rng);
    auto a = linops::inverse_compose(LinearOperator(f), LinearOperator(f * m));
    CHECK((a.matrix() - m).norm() <= 1e-10);
  }
  SECTION("column outside the image is rejected") {
    MatrixXd g = random_matrix(5, 2, rng);  // generic: not inside a 3-dim subspace
    CHECK_THROWS_MATCHES(linops::inverse_compose(LinearOperator(f), LinearOperator(g), 1e-8),
                         weil::error,
                         Catch::Matchers::Predicate<weil::error>([](const auto& e) {
                           return e.code() == errc::image_mismatch;
                         }));
  }
}

TEST_CASE("inverse_compose satisfies the continuity bound") {
  std::mt19937_64 rng(1414);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd f0 = random_orthonormal_cols(5, 3, rng);
    MatrixXd h = random_matrix(5, 3, rng);
    h *= 0.1 / linops::operator_norm(LinearOperator(h));
    MatrixXd m = random_matrix(3, 3, rng);
    MatrixXd m_shift = m + 0.05 * random_matrix(3, 3, rng);
    MatrixXd g = f0 * m;
    MatrixXd gt = (f0 + h) * m_shift;

    MatrixXd lhs = linops::inverse_compose(LinearOperator(f0 + h), LinearOperator(gt)).matrix() -
                   linops::inverse_compose(LinearOperator(f0), LinearOperator(g)).matrix();
    const double h_norm = linops::operator_norm(LinearOperator(h));
    const double rhs = (1.0 / (1.0 - h_norm)) *
                       (linops::operator_norm(LinearOperator(MatrixXd(gt - g))) +
                        h_norm * linops::operator_norm(LinearOperator(g)));
    CHECK(linops::operator_norm(LinearOperator(lhs)) <= rhs + 1e-10);
  }
}

TEST_CASE("inverse_compose exactness on accepted inputs") {
  std::mt19937_64 rng(1515);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixXd f = random_orthonormal_cols(6, 3, rng) * 2.5;
    MatrixXd m = random_matrix(3, 4, rng);
    MatrixXd g = f * m;
    auto a = linops::inverse_compose(LinearOperator(f), LinearOperator(g), 1e-8);
    CHECK((f * a.matrix() - g).norm() <= 1e-8 * (1.0 + g.norm()) * 4.0);
  }
}
