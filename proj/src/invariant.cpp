#include "rqm/invariant.hpp"

#include <algorithm>
#include <cmath>

namespace rqm {

HermitianBasis::HermitianBasis(Algebra a) : algebra_(std::move(a)) {
  for (std::size_t j = 0; j < algebra_.num_blocks(); ++j) {
    const std::size_t n = algebra_.block_size(j);
    const double s = 1.0 / std::sqrt(2.0);
    elements_.push_back({j, CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n))});
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        CMatrix sym = CMatrix::Zero(n, n);
        sym(p, q) = s;
        sym(q, p) = s;
        elements_.push_back({j, sym});
        CMatrix anti = CMatrix::Zero(n, n);
        anti(p, q) = Complex(0.0, -s);
        anti(q, p) = Complex(0.0, s);
        elements_.push_back({j, anti});
      }
    }
    for (std::size_t l = 1; l < n; ++l) {
      const double c = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
      CMatrix diag = CMatrix::Zero(n, n);
      for (std::size_t p = 0; p < l; ++p) diag(p, p) = c;
      diag(l, l) = -c * static_cast<double>(l);
      elements_.push_back({j, diag});
    }
  }
}

std::vector<CMatrix> HermitianBasis::element(std::size_t k) const {
  std::vector<CMatrix> out;
  for (std::size_t j = 0; j < algebra_.num_blocks(); ++j) {
    const std::size_t n = algebra_.block_size(j);
    out.push_back(CMatrix::Zero(n, n));
  }
  const Entry& e = elements_.at(k);
  out[e.block] = e.matrix;
  return out;
}

Eigen::VectorXd HermitianBasis::coordinates(const std::vector<CMatrix>& densities) const {
  if (densities.size() != algebra_.num_blocks()) {
    throw Error(ErrorCode::Dimension, "density block count does not match the algebra");
  }
  Eigen::VectorXd x(elements_.size());
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const Entry& e = elements_[k];
    x(static_cast<Eigen::Index>(k)) = (e.matrix * densities[e.block]).trace().real();
  }
  return x;
}

std::vector<CMatrix> HermitianBasis::densities(const Eigen::VectorXd& coords) const {
  if (static_cast<std::size_t>(coords.size()) != elements_.size()) {
    throw Error(ErrorCode::Dimension, "coordinate vector has the wrong length");
  }
  std::vector<CMatrix> out = element(0);
  out[elements_[0].block].setZero();
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const Entry& e = elements_[k];
    out[e.block] += coords(static_cast<Eigen::Index>(k)) * e.matrix;
  }
  return out;
}

namespace {

void require_endomorphic(const RandomQuantumMap& r) {
  if (r.source() != r.target()) {
    throw Error(ErrorCode::Dimension, "an RQM on A is required, got " + describe(r.source()) + " -> " +
                                          describe(r.target()));
  }
}

std::vector<CMatrix> hermitize(std::vector<CMatrix> blocks) {
  for (CMatrix& m : blocks) m = 0.5 * (m + m.adjoint()).eval();
  return blocks;
}

}  // namespace

Eigen::MatrixXd transition_matrix(const RandomQuantumMap& r) {
  require_endomorphic(r);
  HermitianBasis basis(r.target());
  Transition t = induced_transition(r);
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    m.col(k) = basis.coordinates(t.apply_densities(basis.element(static_cast<std::size_t>(k))));
  }
  return m;
}

InvariantReport invariant_states(const RandomQuantumMap& r, const InvariantOptions& options) {
  require_endomorphic(r);
  const Algebra& a = r.target();
  HermitianBasis basis(a);
  const Eigen::MatrixXd m = transition_matrix(r);
  const Eigen::Index d = m.rows();
  const Eigen::MatrixXd shifted = m - Eigen::MatrixXd::Identity(d, d);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > options.rank_tolerance) ++rank;
  }
  const Eigen::Index nullity = d - rank;
  if (nullity == 0) {
    throw Error(ErrorCode::NumericalFailure,
                "transition has no fixed vector (smallest singular value of M - I is " +
                    std::to_string(sv(sv.size() - 1)) + ")",
                "invariant.nonempty");
  }

  const Eigen::VectorXd start = basis.coordinates(State::maximally_mixed(a).densities());
  Eigen::VectorXd x = start;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  std::size_t k = 0;
  double cesaro_residual = 0.0;
  while (k < options.max_iterations) {
    sum += x;
    x = m * x;
    ++k;
    cesaro_residual = (x - start).norm() / static_cast<double>(k);
    if (cesaro_residual <= options.tolerance) break;
  }
  const Eigen::VectorXd average = sum / static_cast<double>(k);

  // Split the average along ker(M - I) ⊕ ran(M - I) and keep the kernel part.
  Eigen::MatrixXd frame(d, d);
  frame.leftCols(nullity) = svd.matrixV().rightCols(nullity);
  frame.rightCols(rank) = svd.matrixU().leftCols(rank);
  const Eigen::VectorXd split = frame.colPivHouseholderQr().solve(average);
  const Eigen::VectorXd fixed = svd.matrixV().rightCols(nullity) * split.head(nullity);

  std::vector<CMatrix> densities = hermitize(basis.densities(fixed));
  const double residual = (m * fixed - fixed).norm();
  if (!is_state(a, densities, options.tolerance) || residual > options.tolerance) {
    throw Error(ErrorCode::NumericalFailure,
                "invariant state did not validate: residual " + std::to_string(residual) + " after " +
                    std::to_string(k) + " Cesàro steps (Cesàro residual " + std::to_string(cesaro_residual) + ")",
                "invariant.residual");
  }
  State canonical(a, std::move(densities), options.tolerance);
  const double check = verify_invariant(r, canonical);
  return InvariantReport{static_cast<std::size_t>(nullity), std::move(canonical), check, k, cesaro_residual};
}

double verify_invariant(const RandomQuantumMap& r, const State& sigma) {
  require_endomorphic(r);
  if (sigma.algebra() != r.target()) {
    throw Error(ErrorCode::Dimension, "state lives on " + describe(sigma.algebra()) + ", RQM on " +
                                          describe(r.target()));
  }
  Transition t = induced_transition(r);
  return distance(t.apply_densities(sigma.densities()), sigma.densities());
}

Algebra skew_level(const RandomQuantumMap& r, std::size_t n) {
  Algebra out = r.target();
  for (std::size_t i = 0; i < n; ++i) out = tensor_algebra(out, r.parameter());
  return out;
}

namespace {

void check_skew_cap(const RandomQuantumMap& r, std::size_t level, std::size_t dim_cap) {
  double required = static_cast<double>(r.target().dim());
  for (std::size_t i = 0; i <= level; ++i) required *= static_cast<double>(r.parameter().dim());
  if (required > static_cast<double>(dim_cap)) {
    throw Error(ErrorCode::CapExceeded, "skew level " + std::to_string(level + 1) + " needs dimension " +
                                            std::to_string(static_cast<unsigned long long>(required)) +
                                            ", cap is " + std::to_string(dim_cap));
  }
}

LinearMap skew_map_unchecked(const RandomQuantumMap& r, std::size_t level) {
  if (level == 0) return r.phi();
  Algebra tail = r.parameter();
  for (std::size_t i = 1; i < level; ++i) tail = tensor_algebra(tail, r.parameter());
  return tensor(r.phi(), LinearMap::identity(tail));
}

}  // namespace

LinearMap skew_map(const RandomQuantumMap& r, std::size_t level, std::size_t dim_cap) {
  require_endomorphic(r);
  check_skew_cap(r, level, dim_cap);
  return make_morphism(skew_map_unchecked(r, level));
}

Element skew_apply(const RandomQuantumMap& r, std::size_t level, const Element& x, std::size_t dim_cap) {
  LinearMap f = skew_map(r, level, dim_cap);
  if (x.algebra() != f.domain()) {
    throw Error(ErrorCode::Dimension, "element lives on " + describe(x.algebra()) + ", skew level " +
                                          std::to_string(level) + " is " + describe(f.domain()));
  }
  return f.apply(x);
}

SkewReport verify_skew_invariance(const RandomQuantumMap& r, const State& sigma, std::size_t depth,
                                  double tolerance, std::size_t dim_cap) {
  require_endomorphic(r);
  if (depth == 0) throw Error(ErrorCode::InvalidSpec, "skew invariance needs depth >= 1");
  check_skew_cap(r, depth - 1, dim_cap);

  // The skew map tensors validated pieces, so it is a morphism by construction.
  LinearMap f = skew_map_unchecked(r, depth - 1);

  State mu_low = sigma;
  State mu_high = tensor_state(sigma, r.nu());
  State pushed = induced_transition(r).apply(sigma);
  State pushed_tail = pushed;
  for (std::size_t i = 1; i < depth; ++i) {
    mu_low = tensor_state(mu_low, r.nu());
    mu_high = tensor_state(mu_high, r.nu());
    pushed_tail = tensor_state(pushed_tail, r.nu());
  }

  const CVector pulled = f.matrix().transpose() * mu_high.functional();
  const CVector low = mu_low.functional();
  const CVector rhs = pushed_tail.functional();

  SkewReport report;
  report.depth = depth;
  report.tolerance = tolerance;
  report.violation = (pulled - low).cwiseAbs().maxCoeff();
  report.identity_residual = (pulled - rhs).cwiseAbs().maxCoeff();
  report.invariance_residual = distance(pushed.densities(), sigma.densities());
  report.pass = report.violation <= tolerance;
  return report;
}

}  // namespace rqm
