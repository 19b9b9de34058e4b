#include "weil/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace weil::coh {

GammaModule::GammaModule(int dimension, std::vector<MatrixXd> rho)
    : dim_(dimension), rho_(std::move(rho)) {
  if (dim_ < 0) fail(errc::invalid_argument, "module dimension must be nonnegative");
  rho_inv_.reserve(rho_.size());
  for (std::size_t s = 0; s < rho_.size(); ++s) {
    const MatrixXd& m = rho_[s];
    if (m.rows() != dim_ || m.cols() != dim_)
      fail(errc::invalid_argument, "rho block has the wrong dimensions");
    if (dim_ == 0) {
      rho_inv_.emplace_back(0, 0);
      continue;
    }
    Eigen::PartialPivLU<MatrixXd> lu(m);
    if (std::abs(lu.determinant()) <= 1e-12)
      fail(errc::invalid_argument, "rho(" + std::to_string(s) + ") is singular");
    rho_inv_.push_back(lu.inverse());
  }
}

const MatrixXd& GammaModule::rho(int generator) const {
  return rho_.at(static_cast<std::size_t>(generator));
}

const MatrixXd& GammaModule::rho_inverse(int generator) const {
  return rho_inv_.at(static_cast<std::size_t>(generator));
}

MatrixXd GammaModule::rho_word(const words::Word& w) const {
  MatrixXd value = MatrixXd::Identity(dim_, dim_);
  for (const words::Letter& letter : w.letters)
    value *= letter.exponent > 0 ? rho(letter.generator) : rho_inverse(letter.generator);
  return value;
}

double GammaModule::multiplicativity_defect(const words::Presentation& pres, int samples,
                                            std::uint64_t seed) const {
  if (pres.num_generators() == 0 || dim_ == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_gen(0, static_cast<int>(pres.num_generators()) - 1);
  std::uniform_int_distribution<int> pick_len(0, 6);
  std::uniform_int_distribution<int> pick_sign(0, 1);
  auto random_word = [&] {
    words::Word w;
    const int len = pick_len(rng);
    for (int i = 0; i < len; ++i)
      w.letters.push_back({pick_gen(rng), pick_sign(rng) ? 1 : -1});
    return words::reduce(w);
  };
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const words::Word u = random_word(), v = random_word();
    const double defect =
        (rho_word(words::concat(u, v)) - rho_word(u) * rho_word(v)).norm();
    worst = std::max(worst, defect);
  }
  return worst;
}

GammaModule module_from_representation(const lie::Representation& rep, double tol) {
  const auto& basis = rep.group().basis();
  std::vector<MatrixXd> rho;
  rho.reserve(rep.presentation().num_generators());
  for (std::size_t s = 0; s < rep.presentation().num_generators(); ++s)
    rho.push_back(lie::ad_matrix(rep.image(static_cast<int>(s)), basis, tol).matrix());
  return GammaModule(rep.group().algebra_dim(), std::move(rho));
}

MatrixXd delta0(const GammaModule& module, const words::Presentation& pres) {
  const int d = module.dimension();
  const Eigen::Index s_count = static_cast<Eigen::Index>(pres.num_generators());
  MatrixXd out(s_count * d, d);
  const MatrixXd id = MatrixXd::Identity(d, d);
  for (Eigen::Index s = 0; s < s_count; ++s)
    out.middleRows(s * d, d) = id - module.rho(static_cast<int>(s));
  return out;
}

MatrixXd delta1(const GammaModule& module, const words::Presentation& pres,
                const std::vector<int>& subset) {
  const int d = module.dimension();
  const Eigen::Index s_count = static_cast<Eigen::Index>(pres.num_generators());
  MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(subset.size()) * d, s_count * d);
  for (std::size_t row = 0; row < subset.size(); ++row) {
    const int t_index = subset[row];
    if (t_index < 0 || t_index >= static_cast<int>(pres.num_relators()))
      fail(errc::invalid_argument, "relator index " + std::to_string(t_index) +
                                       " is out of range");
    const words::Word& t = pres.relators()[static_cast<std::size_t>(t_index)];
    for (const words::RelatorPrefix& entry : words::relator_prefixes(t)) {
      auto block = out.block(static_cast<Eigen::Index>(row) * d,
                             static_cast<Eigen::Index>(entry.generator) * d, d, d);
      block += entry.sign * module.rho_word(entry.prefix);
    }
  }
  return out;
}

double sup_block_norm(const VectorXd& stacked, int block_dim) {
  if (block_dim <= 0) fail(errc::invalid_argument, "block dimension must be positive");
  if (stacked.size() % block_dim != 0)
    fail(errc::invalid_argument, "vector length is not a multiple of the block dimension");
  double sup = 0.0;
  for (Eigen::Index i = 0; i < stacked.size(); i += block_dim)
    sup = std::max(sup, stacked.segment(i, block_dim).norm());
  return sup;
}

namespace {

struct RankInfo {
  Eigen::Index rank = 0;
  VectorXd singular_values;
  double gap = 0.0;  // smallest kept singular value / cutoff
  bool borderline = false;
};

RankInfo numerical_rank(const MatrixXd& m, double rank_tol) {
  RankInfo info;
  if (m.rows() == 0 || m.cols() == 0) return info;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  info.singular_values = svd.singularValues();
  const double sigma_max = info.singular_values(0);
  const double cutoff =
      rank_tol > 0.0 ? rank_tol : linops::rank_threshold(m.rows(), m.cols(), sigma_max);
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    const double sv = info.singular_values(i);
    if (sv > cutoff) ++info.rank;
    // Values within a factor 10 of the cutoff make the rank decision fragile.
    if (sv > cutoff / 10.0 && sv <= cutoff * 10.0) info.borderline = true;
  }
  if (info.rank > 0 && cutoff > 0.0)
    info.gap = info.singular_values(info.rank - 1) / cutoff;
  return info;
}

}  // namespace

H1Result h1_dimension(const GammaModule& module, const words::Presentation& pres,
                      const std::vector<int>& subset, double rank_tol) {
  const MatrixXd d0 = delta0(module, pres);
  const MatrixXd d1 = delta1(module, pres, subset);

  H1Result out;
  if (d1.rows() > 0 && d0.cols() > 0) {
    out.details.complex_defect = (d1 * d0).norm();
    const double scale = 1.0 + d1.norm() * d0.norm();
    if (out.details.complex_defect > 1e-9 * scale)
      fail(errc::not_a_complex, "||d1 d0|| = " + std::to_string(out.details.complex_defect) +
                                    " exceeds 1e-9 * scale");
  }

  const RankInfo r0 = numerical_rank(d0, rank_tol);
  const RankInfo r1 = numerical_rank(d1, rank_tol);
  out.details.rank_d0 = r0.rank;
  out.details.rank_d1 = r1.rank;
  out.details.nullity_d1 = d1.cols() - r1.rank;
  out.details.d0_singular_values = r0.singular_values;
  out.details.d1_singular_values = r1.singular_values;
  out.details.rank_gap_d0 = r0.gap;
  out.details.rank_gap_d1 = r1.gap;
  if (r0.borderline)
    out.details.warnings.push_back("delta0 has singular values within 10x of the rank cutoff");
  if (r1.borderline)
    out.details.warnings.push_back("delta1 has singular values within 10x of the rank cutoff");

  out.dimension = out.details.nullity_d1 - out.details.rank_d0;
  return out;
}

std::vector<int> saturate_relators(const GammaModule& module,
                                   const words::Presentation& pres, double rank_tol) {
  std::vector<int> subset;
  Eigen::Index rank = 0;
  for (int t = 0; t < static_cast<int>(pres.num_relators()); ++t) {
    subset.push_back(t);
    const Eigen::Index with_t = numerical_rank(delta1(module, pres, subset), rank_tol).rank;
    if (with_t > rank)
      rank = with_t;
    else
      subset.pop_back();
  }
  return subset;
}

}  // namespace weil::coh
