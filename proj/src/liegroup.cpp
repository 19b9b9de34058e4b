#include "weil/liegroup.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace weil::lie {

namespace {

VectorXd vectorize(const MatrixXd& m) {
  return Eigen::Map<const VectorXd>(m.data(), m.size());
}

double spectral_norm(const MatrixXd& m) {
  return linops::operator_norm(linops::LinearOperator(m));
}

}  // namespace

MatrixXd exp(const MatrixXd& x) {
  if (x.rows() != x.cols()) fail(errc::invalid_argument, "exp needs a square matrix");
  if (!x.allFinite()) fail(errc::invalid_argument, "exp argument has non-finite entries");
  return x.exp();
}

MatrixXd log(const MatrixXd& g) {
  if (g.rows() != g.cols()) fail(errc::invalid_argument, "log needs a square matrix");
  const double distance = spectral_norm(g - MatrixXd::Identity(g.rows(), g.cols()));
  if (!(distance < 1.0))
    fail(errc::out_of_chart_domain,
         "||g - I|| = " + std::to_string(distance) + " leaves the log chart");
  return g.log();
}

GroupElement::GroupElement(MatrixXd m, double det_tol) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols())
    fail(errc::invalid_argument, "group element must be square");
  if (!mat_.allFinite())
    fail(errc::invalid_argument, "group element has non-finite entries");
  Eigen::PartialPivLU<MatrixXd> lu(mat_);
  if (std::abs(lu.determinant()) <= det_tol)
    fail(errc::invalid_argument, "matrix is singular within tolerance");
  inv_ = lu.inverse();
}

GroupElement GroupElement::identity(int n) { return GroupElement(MatrixXd::Identity(n, n)); }

GroupElement GroupElement::inverse() const {
  GroupElement out = *this;
  std::swap(out.mat_, out.inv_);
  return out;
}

GroupElement GroupElement::operator*(const GroupElement& rhs) const {
  return GroupElement(mat_ * rhs.mat_);
}

linops::LinearOperator ad_matrix(const GroupElement& g, const std::vector<MatrixXd>& basis,
                                 double tol) {
  if (basis.empty()) return linops::LinearOperator(MatrixXd(0, 0));
  const int n = g.dim();
  const int d = static_cast<int>(basis.size());
  MatrixXd stacked(n * n, d);
  for (int j = 0; j < d; ++j) {
    if (basis[j].rows() != n || basis[j].cols() != n)
      fail(errc::invalid_argument, "basis matrix has wrong dimensions");
    stacked.col(j) = vectorize(basis[j]);
  }
  linops::RightInverseCertificate solver{linops::LinearOperator(stacked)};
  if (solver.rank() < d)
    fail(errc::invalid_argument, "algebra basis is linearly dependent");

  MatrixXd ad(d, d);
  for (int j = 0; j < d; ++j) {
    const MatrixXd conj = g.matrix() * basis[j] * g.inverse_matrix();
    const VectorXd target = vectorize(conj);
    const VectorXd coords = solver.apply(target);
    const double residual = (stacked * coords - target).norm();
    if (residual > tol * (1.0 + target.norm()))
      fail(errc::not_invariant, "conjugation leaves the algebra span: residual " +
                                    std::to_string(residual));
    ad.col(j) = coords;
  }
  return linops::LinearOperator(std::move(ad));
}

MatrixGroup::MatrixGroup(std::string name, int ambient_dim, std::vector<MatrixXd> basis)
    : name_(std::move(name)),
      ambient_dim_(ambient_dim),
      basis_(std::move(basis)),
      coords_solver_(linops::LinearOperator(MatrixXd(0, 0))) {
  if (ambient_dim_ <= 0) fail(errc::invalid_argument, "ambient dimension must be positive");
  MatrixXd stacked(ambient_dim_ * ambient_dim_, static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t j = 0; j < basis_.size(); ++j) {
    if (basis_[j].rows() != ambient_dim_ || basis_[j].cols() != ambient_dim_)
      fail(errc::invalid_argument, "basis matrix has wrong dimensions");
    stacked.col(static_cast<Eigen::Index>(j)) = vectorize(basis_[j]);
  }
  coords_solver_ = linops::RightInverseCertificate{linops::LinearOperator(stacked)};
  if (coords_solver_.rank() < static_cast<Eigen::Index>(basis_.size()))
    fail(errc::invalid_argument, "algebra basis is linearly dependent");
}

MatrixGroup MatrixGroup::gl(int n) {
  std::vector<MatrixXd> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MatrixXd e = MatrixXd::Zero(n, n);
      e(i, j) = 1.0;
      basis.push_back(std::move(e));
    }
  return MatrixGroup("gl(" + std::to_string(n) + ")", n, std::move(basis));
}

MatrixGroup MatrixGroup::sl(int n) {
  std::vector<MatrixXd> basis;
  for (int k = 0; k + 1 < n; ++k) {
    MatrixXd h = MatrixXd::Zero(n, n);
    h(k, k) = 1.0;
    h(k + 1, k + 1) = -1.0;
    basis.push_back(std::move(h));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      MatrixXd e = MatrixXd::Zero(n, n);
      e(i, j) = 1.0;
      basis.push_back(std::move(e));
    }
  return MatrixGroup("sl(" + std::to_string(n) + ")", n, std::move(basis));
}

MatrixGroup MatrixGroup::so(int n) {
  std::vector<MatrixXd> basis;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      MatrixXd a = MatrixXd::Zero(n, n);
      a(j, i) = 1.0;
      a(i, j) = -1.0;
      basis.push_back(std::move(a));
    }
  return MatrixGroup("so(" + std::to_string(n) + ")", n, std::move(basis));
}

MatrixGroup MatrixGroup::from_key(const std::string& key) {
  std::string body = key;
  body.erase(std::remove_if(body.begin(), body.end(),
                            [](unsigned char c) { return std::isspace(c); }),
             body.end());
  const auto open = body.find('(');
  const auto close = body.find(')');
  if (open == std::string::npos || close != body.size() - 1 || close <= open + 1)
    fail(errc::parse_error, "group key '" + key + "' is not of the form name(n)");
  const std::string family = body.substr(0, open);
  int n = 0;
  try {
    n = std::stoi(body.substr(open + 1, close - open - 1));
  } catch (const std::exception&) {
    fail(errc::parse_error, "group key '" + key + "' has a malformed dimension");
  }
  if (n <= 0) fail(errc::parse_error, "group dimension must be positive");
  if (family == "gl") return gl(n);
  if (family == "sl") return sl(n);
  if (family == "so") return so(n);
  fail(errc::parse_error, "unknown group family '" + family + "'");
}

MatrixXd MatrixGroup::from_coords(const VectorXd& coords) const {
  if (coords.size() != algebra_dim())
    fail(errc::invalid_argument, "coordinate vector has the wrong length");
  MatrixXd x = MatrixXd::Zero(ambient_dim_, ambient_dim_);
  for (int j = 0; j < algebra_dim(); ++j) x += coords(j) * basis_[static_cast<std::size_t>(j)];
  return x;
}

VectorXd MatrixGroup::to_coords(const MatrixXd& x, double tol) const {
  if (x.rows() != ambient_dim_ || x.cols() != ambient_dim_)
    fail(errc::invalid_argument, "matrix has the wrong dimensions");
  const VectorXd target = vectorize(x);
  const VectorXd coords = coords_solver_.apply(target);
  const double residual = (from_coords(coords) - x).norm();
  if (residual > tol * (1.0 + x.norm()))
    fail(errc::not_invariant,
         "matrix leaves the algebra span: residual " + std::to_string(residual));
  return coords;
}

Representation::Representation(words::Presentation pres, MatrixGroup group,
                               std::vector<MatrixXd> images, double rel_tol)
    : pres_(std::move(pres)), group_(std::move(group)) {
  if (images.size() != pres_.num_generators())
    fail(errc::validation_failed, "expected " + std::to_string(pres_.num_generators()) +
                                      " generator images, got " +
                                      std::to_string(images.size()));
  images_.reserve(images.size());
  for (MatrixXd& m : images) {
    if (m.rows() != group_.ambient_dim() || m.cols() != group_.ambient_dim())
      fail(errc::validation_failed, "generator image has the wrong dimensions");
    images_.emplace_back(std::move(m));
  }
  const MatrixXd id = MatrixXd::Identity(group_.ambient_dim(), group_.ambient_dim());
  for (std::size_t i = 0; i < pres_.num_relators(); ++i) {
    const words::Word& t = pres_.relators()[i];
    MatrixXd value = id;
    double scale = 1.0;
    for (const words::Letter& letter : t.letters) {
      const GroupElement& g = images_[static_cast<std::size_t>(letter.generator)];
      const MatrixXd& factor = letter.exponent > 0 ? g.matrix() : g.inverse_matrix();
      value *= factor;
      scale *= std::max(1.0, spectral_norm(factor));
    }
    const double defect = (value - id).norm();
    max_defect_ = std::max(max_defect_, defect);
    if (defect > rel_tol * scale)
      fail(errc::validation_failed, "relator " + std::to_string(i) +
                                        " evaluates away from the identity: defect " +
                                        std::to_string(defect));
  }
}

GroupElement evaluate_word(const Representation& rep, const words::Word& w) {
  const int n = rep.dim();
  MatrixXd value = MatrixXd::Identity(n, n);
  for (const words::Letter& letter : w.letters) {
    if (letter.generator < 0 ||
        letter.generator >= static_cast<int>(rep.presentation().num_generators()))
      fail(errc::invalid_argument, "word uses an out-of-range generator index");
    const GroupElement& g = rep.image(letter.generator);
    value *= letter.exponent > 0 ? g.matrix() : g.inverse_matrix();
  }
  return GroupElement(std::move(value));
}

MatrixXd stabilizer_algebra(const linops::LinearOperator& action_derivative,
                            double rank_tol) {
  const Eigen::Index d = action_derivative.domain_dim();
  if (action_derivative.codomain_dim() == 0 || d == 0)
    return MatrixXd::Identity(d, d);
  Eigen::JacobiSVD<MatrixXd> svd(action_derivative.matrix(), Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  const double cutoff =
      rank_tol > 0.0
          ? rank_tol
          : linops::rank_threshold(action_derivative.codomain_dim(), d, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(d - rank);
}

namespace {

std::string strip_line(const std::string& line) {
  std::string out = line;
  if (const auto hash = out.find('#'); hash != std::string::npos) out.resize(hash);
  const auto begin = out.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = out.find_last_not_of(" \t\r");
  return out.substr(begin, end - begin + 1);
}

}  // namespace

Representation load_representation(const std::string& path, const words::Presentation& pres,
                                   double rel_tol) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_error, "cannot open '" + path + "'");

  std::optional<MatrixGroup> group;
  std::size_t needed = 0;
  std::vector<std::pair<std::string, std::vector<double>>> blocks;
  std::vector<double>* pending = nullptr;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = strip_line(line);
    if (body.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (body.rfind("group:", 0) == 0) {
      if (group) fail(errc::parse_error, where + ": repeated group line");
      group = MatrixGroup::from_key(strip_line(body.substr(std::string("group:").size())));
      needed = static_cast<std::size_t>(group->ambient_dim()) * group->ambient_dim();
      continue;
    }
    if (body.rfind("matrix", 0) == 0) {
      if (pending && pending->size() != needed)
        fail(errc::parse_error, where + ": previous matrix block is incomplete");
      if (!group)
        fail(errc::parse_error, where + ": matrix block before group line");
      const auto colon = body.find(':');
      if (colon == std::string::npos)
        fail(errc::parse_error, where + ": matrix line needs 'matrix <name>:'");
      std::istringstream header(body.substr(std::string("matrix").size(),
                                            colon - std::string("matrix").size()));
      std::string name;
      if (!(header >> name))
        fail(errc::parse_error, where + ": matrix line needs a generator name");
      blocks.emplace_back(name, std::vector<double>{});
      pending = &blocks.back().second;
      body = body.substr(colon + 1);
      if (strip_line(body).empty()) continue;
    }
    if (!pending) fail(errc::parse_error, where + ": expected 'group:' or 'matrix <name>:'");
    std::istringstream numbers(body);
    std::string token;
    while (numbers >> token) {
      if (pending->size() == needed)
        fail(errc::parse_error, where + ": extra entries after a complete matrix block");
      try {
        std::size_t used = 0;
        const double value = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        pending->push_back(value);
      } catch (const std::exception&) {
        fail(errc::parse_error, where + ": '" + token + "' is not a number");
      }
    }
  }
  if (!group) fail(errc::parse_error, path + ": missing group line");

  const int n = group->ambient_dim();
  std::vector<MatrixXd> images(pres.num_generators());
  std::vector<bool> seen(pres.num_generators(), false);
  for (auto& [name, numbers] : blocks) {
    const int index = pres.generator_index(name);
    if (index < 0)
      fail(errc::validation_failed, path + ": matrix '" + name +
                                        "' does not match any presentation generator");
    if (seen[static_cast<std::size_t>(index)])
      fail(errc::validation_failed, path + ": repeated matrix for generator '" + name + "'");
    if (numbers.size() != needed)
      fail(errc::parse_error, path + ": matrix '" + name + "' has " +
                                  std::to_string(numbers.size()) + " entries, expected " +
                                  std::to_string(needed));
    MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = numbers[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
    images[static_cast<std::size_t>(index)] = std::move(m);
    seen[static_cast<std::size_t>(index)] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      fail(errc::validation_failed,
           path + ": no matrix for generator '" + pres.generators()[i] + "'");

  return Representation(pres, std::move(*group), std::move(images), rel_tol);
}

}  // namespace weil::lie
