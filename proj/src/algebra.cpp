#include "rqm/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "rqm/tensor_legs.hpp"

namespace rqm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "invalid-spec";
    case ErrorCode::Dimension: return "dimension";
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::NotAMorphism: return "not-a-morphism";
    case ErrorCode::NotCompletelyPositive: return "choi-negative";
    case ErrorCode::NotUnital: return "non-unital";
    case ErrorCode::UnsupportedShape: return "unsupported-shape";
    case ErrorCode::CapExceeded: return "dimension-cap-exceeded";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::NotStochastic: return "not-stochastic";
    case ErrorCode::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

Algebra::Algebra(std::vector<std::size_t> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw Error(ErrorCode::InvalidSpec, "algebra needs at least one block");
  offsets_.reserve(blocks_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t n : blocks_) {
    if (n == 0) throw Error(ErrorCode::InvalidSpec, "algebra block sizes must be positive");
    offsets_.push_back(offsets_.back() + n * n);
  }
}

std::size_t Algebra::rep_size() const {
  return std::accumulate(blocks_.begin(), blocks_.end(), std::size_t{0});
}

bool Algebra::is_commutative() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](std::size_t n) { return n == 1; });
}

BasisIndex Algebra::locate(std::size_t flat) const {
  if (flat >= dim()) throw Error(ErrorCode::OutOfRange, "basis index out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
  std::size_t j = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  std::size_t local = flat - offsets_[j];
  return {j, local / blocks_[j], local % blocks_[j]};
}

std::string describe(const Algebra& a) {
  std::ostringstream os;
  os << '[';
  for (std::size_t j = 0; j < a.num_blocks(); ++j) os << (j ? "," : "") << a.block_size(j);
  os << ']';
  return os.str();
}

Algebra make_algebra(const std::vector<std::size_t>& blocks) { return Algebra(blocks); }

Algebra tensor_algebra(const Algebra& a, const Algebra& b) {
  std::vector<std::size_t> blocks;
  blocks.reserve(a.num_blocks() * b.num_blocks());
  for (std::size_t n : a.blocks())
    for (std::size_t m : b.blocks()) blocks.push_back(n * m);
  return Algebra(std::move(blocks));
}

Algebra direct_sum_algebra(const Algebra& a, const Algebra& b) {
  std::vector<std::size_t> blocks = a.blocks();
  blocks.insert(blocks.end(), b.blocks().begin(), b.blocks().end());
  return Algebra(std::move(blocks));
}

// ---------------------------------------------------------------------------
// Element

Element::Element(Algebra algebra, std::vector<CMatrix> mats)
    : algebra_(std::move(algebra)), mats_(std::move(mats)) {
  if (mats_.size() != algebra_.num_blocks())
    throw Error(ErrorCode::Dimension, "element has " + std::to_string(mats_.size()) +
                                          " blocks, algebra " + describe(algebra_) + " needs " +
                                          std::to_string(algebra_.num_blocks()));
  for (std::size_t j = 0; j < mats_.size(); ++j) {
    auto n = static_cast<Eigen::Index>(algebra_.block_size(j));
    if (mats_[j].rows() != n || mats_[j].cols() != n)
      throw Error(ErrorCode::Dimension, "element block " + std::to_string(j) + " has wrong shape");
  }
}

Element Element::zero(const Algebra& a) {
  std::vector<CMatrix> mats;
  for (std::size_t n : a.blocks()) mats.push_back(CMatrix::Zero(n, n));
  return Element(a, std::move(mats));
}

Element Element::unit(const Algebra& a) {
  std::vector<CMatrix> mats;
  for (std::size_t n : a.blocks()) mats.push_back(CMatrix::Identity(n, n));
  return Element(a, std::move(mats));
}

Element Element::matrix_unit(const Algebra& a, std::size_t block, std::size_t row, std::size_t col) {
  Element e = zero(a);
  e.mats_.at(block)(row, col) = 1.0;
  return e;
}

Element Element::basis(const Algebra& a, std::size_t flat) {
  BasisIndex b = a.locate(flat);
  return matrix_unit(a, b.block, b.row, b.col);
}

Element Element::from_flat(const Algebra& a, const CVector& coords) {
  if (static_cast<std::size_t>(coords.size()) != a.dim())
    throw Error(ErrorCode::Dimension, "coordinate vector length does not match algebra dimension");
  std::vector<CMatrix> mats;
  for (std::size_t j = 0; j < a.num_blocks(); ++j) {
    auto n = static_cast<Eigen::Index>(a.block_size(j));
    CMatrix m(n, n);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q) m(p, q) = coords(a.offset(j) + p * n + q);
    mats.push_back(std::move(m));
  }
  return Element(a, std::move(mats));
}

CVector Element::flatten() const {
  CVector v(algebra_.dim());
  for (std::size_t j = 0; j < mats_.size(); ++j) {
    Eigen::Index n = mats_[j].rows();
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q) v(algebra_.offset(j) + p * n + q) = mats_[j](p, q);
  }
  return v;
}

Element Element::adjoint() const {
  std::vector<CMatrix> mats;
  for (const auto& m : mats_) mats.push_back(m.adjoint());
  return Element(algebra_, std::move(mats));
}

double Element::norm() const {
  double s = 0.0;
  for (const auto& m : mats_) s += m.squaredNorm();
  return std::sqrt(s);
}

Element& Element::operator+=(const Element& other) {
  if (other.algebra_ != algebra_) throw Error(ErrorCode::Dimension, "algebra mismatch in addition");
  for (std::size_t j = 0; j < mats_.size(); ++j) mats_[j] += other.mats_[j];
  return *this;
}

Element& Element::operator-=(const Element& other) {
  if (other.algebra_ != algebra_) throw Error(ErrorCode::Dimension, "algebra mismatch in subtraction");
  for (std::size_t j = 0; j < mats_.size(); ++j) mats_[j] -= other.mats_[j];
  return *this;
}

Element& Element::operator*=(Complex s) {
  for (auto& m : mats_) m *= s;
  return *this;
}

Element operator*(const Element& a, const Element& b) {
  if (a.algebra_ != b.algebra_) throw Error(ErrorCode::Dimension, "algebra mismatch in product");
  std::vector<CMatrix> mats;
  mats.reserve(a.mats_.size());
  for (std::size_t j = 0; j < a.mats_.size(); ++j) mats.push_back(a.mats_[j] * b.mats_[j]);
  return Element(a.algebra_, std::move(mats));
}

Element commutator(const Element& a, const Element& b) { return a * b - b * a; }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Element tensor_element(const Element& a, const Element& b) {
  std::vector<CMatrix> mats;
  mats.reserve(a.mats().size() * b.mats().size());
  for (const auto& x : a.mats())
    for (const auto& y : b.mats()) mats.push_back(kron(x, y));
  return Element(tensor_algebra(a.algebra(), b.algebra()), std::move(mats));
}

Element embed_left(const Element& a, const Algebra& right) {
  std::vector<CMatrix> mats = a.mats();
  for (std::size_t n : right.blocks()) mats.push_back(CMatrix::Zero(n, n));
  return Element(direct_sum_algebra(a.algebra(), right), std::move(mats));
}

Element embed_right(const Algebra& left, const Element& b) {
  std::vector<CMatrix> mats;
  for (std::size_t n : left.blocks()) mats.push_back(CMatrix::Zero(n, n));
  mats.insert(mats.end(), b.mats().begin(), b.mats().end());
  return Element(direct_sum_algebra(left, b.algebra()), std::move(mats));
}

namespace {

double hermitian_defect(const CMatrix& m) { return (m - m.adjoint()).norm(); }

double min_eig_hermitian_part(const CMatrix& m) {
  CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

double min_eigenvalue(const Element& a) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : a.mats()) lo = std::min(lo, min_eig_hermitian_part(m));
  return lo;
}

bool is_positive_element(const Element& a, double eps) {
  for (const auto& m : a.mats()) {
    if (hermitian_defect(m) > eps) return false;
    if (min_eig_hermitian_part(m) < -eps) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// State

bool is_state(const Algebra& a, const std::vector<CMatrix>& densities, double eps) {
  if (densities.size() != a.num_blocks()) return false;
  Complex trace = 0.0;
  for (std::size_t j = 0; j < densities.size(); ++j) {
    const auto& rho = densities[j];
    auto n = static_cast<Eigen::Index>(a.block_size(j));
    if (rho.rows() != n || rho.cols() != n) return false;
    if (hermitian_defect(rho) > eps || min_eig_hermitian_part(rho) < -eps) return false;
    trace += rho.trace();
  }
  return std::abs(trace - 1.0) <= eps;
}

State::State(Algebra algebra, std::vector<CMatrix> densities, double eps)
    : algebra_(std::move(algebra)), densities_(std::move(densities)) {
  if (densities_.size() != algebra_.num_blocks())
    throw Error(ErrorCode::InvalidState, "state needs one density per block of " + describe(algebra_));
  Complex trace = 0.0;
  for (std::size_t j = 0; j < densities_.size(); ++j) {
    const auto& rho = densities_[j];
    auto n = static_cast<Eigen::Index>(algebra_.block_size(j));
    if (rho.rows() != n || rho.cols() != n)
      throw Error(ErrorCode::InvalidState, "density " + std::to_string(j) + " has wrong shape");
    if (hermitian_defect(rho) > eps)
      throw Error(ErrorCode::InvalidState, "density " + std::to_string(j) + " is not Hermitian",
                  "state.hermitian");
    double lo = min_eig_hermitian_part(rho);
    if (lo < -eps)
      throw Error(ErrorCode::InvalidState,
                  "density " + std::to_string(j) + " has negative eigenvalue " + std::to_string(lo),
                  "state.positive");
    trace += rho.trace();
  }
  if (std::abs(trace - 1.0) > eps)
    throw Error(ErrorCode::InvalidState, "densities have total trace " + std::to_string(trace.real()),
                "state.normalized");
}

State State::maximally_mixed(const Algebra& a) {
  double total = static_cast<double>(a.rep_size());
  std::vector<CMatrix> d;
  for (std::size_t n : a.blocks()) d.push_back(CMatrix::Identity(n, n) / total);
  return State(a, std::move(d));
}

CVector densities_to_functional(const Algebra& a, const std::vector<CMatrix>& densities) {
  CVector w(a.dim());
  for (std::size_t j = 0; j < a.num_blocks(); ++j) {
    auto n = static_cast<Eigen::Index>(a.block_size(j));
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q) w(a.index(j, p, q)) = densities[j](q, p);
  }
  return w;
}

std::vector<CMatrix> functional_to_densities(const Algebra& a, const CVector& w) {
  if (static_cast<std::size_t>(w.size()) != a.dim())
    throw Error(ErrorCode::Dimension, "functional length does not match algebra dimension");
  std::vector<CMatrix> d;
  for (std::size_t j = 0; j < a.num_blocks(); ++j) {
    auto n = static_cast<Eigen::Index>(a.block_size(j));
    CMatrix rho(n, n);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q) rho(q, p) = w(a.index(j, p, q));
    d.push_back(std::move(rho));
  }
  return d;
}

State State::from_functional(const Algebra& a, const CVector& w, double eps) {
  return State(a, functional_to_densities(a, w), eps);
}

Complex State::evaluate(const Element& a) const {
  if (a.algebra() != algebra_) throw Error(ErrorCode::Dimension, "state and element live on different algebras");
  Complex s = 0.0;
  for (std::size_t j = 0; j < densities_.size(); ++j)
    s += (densities_[j].transpose().array() * a.block(j).array()).sum();
  return s;
}

CVector State::functional() const { return densities_to_functional(algebra_, densities_); }

State make_state(const Algebra& a, std::vector<CMatrix> densities, double eps) {
  return State(a, std::move(densities), eps);
}

State tensor_state(const State& a, const State& b) {
  std::vector<CMatrix> d;
  for (const auto& x : a.densities())
    for (const auto& y : b.densities()) d.push_back(kron(x, y));
  return State(tensor_algebra(a.algebra(), b.algebra()), std::move(d));
}

CVector tensor_functional(const Algebra& a, const CVector& wa, const Algebra& b, const CVector& wb) {
  TensorLegs legs({a, b});
  CVector w(legs.product().dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t k = 0; k < b.dim(); ++k) w(legs.flat({i, k})) = wa(i) * wb(k);
  return w;
}

double distance(const std::vector<CMatrix>& x, const std::vector<CMatrix>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::Dimension, "block count mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - y[j]).squaredNorm();
  return std::sqrt(s);
}

}  // namespace rqm
