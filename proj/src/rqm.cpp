#include "rqm/rqm.hpp"

#include <algorithm>
#include <numeric>

#include "rqm/random.hpp"
#include "rqm/tensor_legs.hpp"

namespace rqm {

QuantumFamily::QuantumFamily(Algebra source, Algebra target, Algebra parameter, LinearMap phi)
    : source_(std::move(source)), target_(std::move(target)), parameter_(std::move(parameter)), phi_(std::move(phi)) {
  if (phi_.domain() != source_)
    throw Error(ErrorCode::Dimension, "family map domain " + describe(phi_.domain()) + " != source " + describe(source_));
  Algebra expected = tensor_algebra(target_, parameter_);
  if (phi_.codomain() != expected)
    throw Error(ErrorCode::Dimension,
                "family map codomain " + describe(phi_.codomain()) + " != A⊗C = " + describe(expected));
  if (phi_.kind() != MapKind::Morphism)
    throw Error(ErrorCode::NotAMorphism, "a quantum family needs a validated morphism", "morphism.validated");
}

QuantumFamily QuantumFamily::trivial(const Algebra& a) {
  return QuantumFamily(a, a, Algebra::complex_numbers(), LinearMap::identity(a));
}

RandomQuantumMap::RandomQuantumMap(QuantumFamily family, State nu) : family_(std::move(family)), nu_(std::move(nu)) {
  if (nu_.algebra() != family_.parameter())
    throw Error(ErrorCode::Dimension, "ν lives on " + describe(nu_.algebra()) + " but the parameter algebra is " +
                                          describe(family_.parameter()));
}

namespace {

State point_state() { return State(Algebra::complex_numbers(), {CMatrix::Identity(1, 1)}); }

State diagonal_state(const std::vector<double>& weights) {
  std::vector<CMatrix> d;
  for (double t : weights) d.push_back(CMatrix::Constant(1, 1, t));
  return State(Algebra::commutative(weights.size()), std::move(d));
}

void check_probability_vector(const std::vector<double>& t, double eps) {
  if (t.empty()) throw Error(ErrorCode::InvalidSpec, "empty weight vector", "weights.probability");
  double s = 0.0;
  for (double x : t) {
    if (x < -eps) throw Error(ErrorCode::InvalidSpec, "negative weight", "weights.probability");
    s += x;
  }
  if (std::abs(s - 1.0) > eps)
    throw Error(ErrorCode::InvalidSpec, "weights sum to " + std::to_string(s), "weights.probability");
}

// Columns of the map sending basis index f of ⊗from_legs to the element built by `image`.
template <typename ImageFn>
CMatrix assemble(const Algebra& from, const Algebra& to, ImageFn image) {
  CMatrix m(to.dim(), from.dim());
  for (std::size_t f = 0; f < from.dim(); ++f) m.col(f) = image(f);
  return m;
}

}  // namespace

RandomQuantumMap RandomQuantumMap::trivial(const Algebra& a) {
  return RandomQuantumMap(QuantumFamily::trivial(a), point_state());
}

QuantumFamily diamond(const QuantumFamily& outer, const QuantumFamily& inner) {
  if (inner.target() != outer.source())
    throw Error(ErrorCode::Dimension, "diamond needs inner target " + describe(inner.target()) +
                                          " == outer source " + describe(outer.source()));
  LinearMap lifted = tensor(outer.phi(), LinearMap::identity(inner.parameter()));
  LinearMap composed = compose(lifted, inner.phi());  // A3 -> (A1⊗C1)⊗C2
  LinearMap assoc = permute_legs({outer.target(), outer.parameter(), inner.parameter()}, {0, 1, 2});
  Algebra params = tensor_algebra(outer.parameter(), inner.parameter());
  Algebra codomain = tensor_algebra(outer.target(), params);
  LinearMap phi(inner.source(), codomain, compose(assoc, composed).matrix());
  return QuantumFamily(inner.source(), outer.target(), params, make_morphism(phi));
}

LinearMap induced_nfmo(const RandomQuantumMap& r) {
  LinearMap f = compose(slice_right(r.target(), r.nu()), r.phi());
  return validate_cp_unital(f);
}

Transition induced_transition(const RandomQuantumMap& r) {
  const Algebra& a = r.target();
  CVector nu = r.nu().functional();
  CMatrix dual(r.source().dim(), a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    CVector delta = CVector::Zero(a.dim());
    delta(k) = 1.0;
    dual.col(k) = r.phi().matrix().transpose() * tensor_functional(a, delta, r.parameter(), nu);
  }
  return Transition(a, r.source(), std::move(dual));
}

// ---------------------------------------------------------------------------

RandomQuantumMap implement_state(const State& sigma) {
  const Algebra& a = sigma.algebra();
  Algebra one = Algebra::complex_numbers();
  LinearMap id(a, tensor_algebra(one, a), CMatrix::Identity(a.dim(), a.dim()));
  return RandomQuantumMap(QuantumFamily(a, one, a, make_morphism(id)), sigma);
}

RandomQuantumMap implement_morphism(const LinearMap& phi) {
  LinearMap checked = make_morphism(phi);
  Algebra one = Algebra::complex_numbers();
  LinearMap lifted(phi.domain(), tensor_algebra(phi.codomain(), one), checked.matrix());
  return RandomQuantumMap(QuantumFamily(phi.domain(), phi.codomain(), one, make_morphism(lifted)), point_state());
}

RandomQuantumMap implement_compose(const RandomQuantumMap& outer, const RandomQuantumMap& inner) {
  return RandomQuantumMap(diamond(outer.family(), inner.family()), tensor_state(outer.nu(), inner.nu()));
}

RandomQuantumMap implement_direct_sum(const RandomQuantumMap& r1, const RandomQuantumMap& r2) {
  const Algebra& a1 = r1.target();
  const Algebra& a2 = r2.target();
  const Algebra& c1 = r1.parameter();
  const Algebra& c2 = r2.parameter();
  Algebra source = direct_sum_algebra(r1.source(), r2.source());
  Algebra target = direct_sum_algebra(a1, a2);
  Algebra params = tensor_algebra(c1, c2);
  Algebra codomain = tensor_algebra(target, params);

  // (a1⊗c1, a2⊗c2) ↦ (a1,0)⊗(c1⊗1) + (0,a2)⊗(1⊗c2)
  TensorLegs legs1({a1, c1}), legs2({a2, c2});
  CMatrix j1 = assemble(legs1.product(), codomain, [&](std::size_t f) {
    auto ac = legs1.split(f);
    return tensor_element(embed_left(Element::basis(a1, ac[0]), a2),
                          tensor_element(Element::basis(c1, ac[1]), Element::unit(c2)))
        .flatten();
  });
  CMatrix j2 = assemble(legs2.product(), codomain, [&](std::size_t f) {
    auto ac = legs2.split(f);
    return tensor_element(embed_right(a1, Element::basis(a2, ac[0])),
                          tensor_element(Element::unit(c1), Element::basis(c2, ac[1])))
        .flatten();
  });

  CMatrix m(codomain.dim(), source.dim());
  m.leftCols(r1.source().dim()) = j1 * r1.phi().matrix();
  m.rightCols(r2.source().dim()) = j2 * r2.phi().matrix();
  LinearMap phi = make_morphism(LinearMap(source, codomain, std::move(m)));
  return RandomQuantumMap(QuantumFamily(source, target, params, phi), tensor_state(r1.nu(), r2.nu()));
}

RandomQuantumMap implement_tensor(const RandomQuantumMap& r1, const RandomQuantumMap& r2) {
  LinearMap both = tensor(r1.phi(), r2.phi());  // B1⊗B2 -> (A1⊗C1)⊗(A2⊗C2)
  LinearMap flip = permute_legs({r1.target(), r1.parameter(), r2.target(), r2.parameter()}, {0, 2, 1, 3});
  Algebra target = tensor_algebra(r1.target(), r2.target());
  Algebra params = tensor_algebra(r1.parameter(), r2.parameter());
  LinearMap phi(both.domain(), tensor_algebra(target, params), compose(flip, both).matrix());
  return RandomQuantumMap(QuantumFamily(both.domain(), target, params, make_morphism(phi)),
                          tensor_state(r1.nu(), r2.nu()));
}

RandomQuantumMap implement_convex_sum(const std::vector<double>& weights, const std::vector<RandomQuantumMap>& rqms,
                                      double eps) {
  check_probability_vector(weights, eps);
  if (weights.size() != rqms.size())
    throw Error(ErrorCode::InvalidSpec, "one weight per RQM is required", "weights.probability");
  const Algebra& b = rqms.front().source();
  const Algebra& a = rqms.front().target();
  for (const auto& r : rqms)
    if (r.source() != b || r.target() != a)
      throw Error(ErrorCode::Dimension, "convex sum needs RQMs between the same algebras");
  const std::size_t n = rqms.size();

  RandomQuantumMap sum = rqms.front();
  for (std::size_t i = 1; i < n; ++i) sum = implement_direct_sum(sum, rqms[i]);
  const Algebra& c = sum.parameter();

  // b ↦ (b, ..., b)
  CMatrix diag(b.dim() * n, b.dim());
  for (std::size_t i = 0; i < n; ++i) diag.middleRows(i * b.dim(), b.dim()) = CMatrix::Identity(b.dim(), b.dim());

  // (a_1, ..., a_n) ⊗ c ↦ sum_i a_i ⊗ (e_i ⊗ c)
  Algebra points = Algebra::commutative(n);
  TensorLegs from({sum.target(), c});
  TensorLegs to({a, points, c});
  CMatrix theta = CMatrix::Zero(to.product().dim(), from.product().dim());
  for (std::size_t f = 0; f < from.product().dim(); ++f) {
    auto xc = from.split(f);
    std::size_t copy = xc[0] / a.dim();
    std::size_t local = xc[0] % a.dim();
    theta(to.flat({local, copy, xc[1]}), f) = 1.0;
  }

  Algebra params = tensor_algebra(points, c);
  LinearMap psi = make_morphism(LinearMap(b, tensor_algebra(a, params), theta * sum.phi().matrix() * diag));
  return RandomQuantumMap(QuantumFamily(b, a, params, psi), tensor_state(diagonal_state(weights), sum.nu()));
}

RandomQuantumMap implement_finite_family(const std::vector<LinearMap>& morphisms, const std::vector<double>& weights,
                                         double eps) {
  check_probability_vector(weights, eps);
  if (weights.size() != morphisms.size())
    throw Error(ErrorCode::InvalidSpec, "one weight per parameter point is required", "weights.probability");
  const Algebra& b = morphisms.front().domain();
  const Algebra& a = morphisms.front().codomain();
  const std::size_t k = morphisms.size();
  std::vector<LinearMap> checked;
  for (const auto& f : morphisms) {
    if (f.domain() != b || f.codomain() != a)
      throw Error(ErrorCode::Dimension, "family members must share domain and codomain");
    checked.push_back(make_morphism(f, eps));
  }
  Algebra points = Algebra::commutative(k);
  TensorLegs legs({a, points});
  CMatrix m = CMatrix::Zero(legs.product().dim(), b.dim());
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t row = 0; row < a.dim(); ++row) m.row(legs.flat({row, x})) = checked[x].matrix().row(row);
  LinearMap phi = make_morphism(LinearMap(b, legs.product(), std::move(m)), eps);
  return RandomQuantumMap(QuantumFamily(b, a, points, phi), diagonal_state(weights));
}

// ---------------------------------------------------------------------------

StinespringImplementation implement_from_stinespring(const LinearMap& f, PaddingOptions options) {
  StinespringImplementation out;
  StinespringDilation dil = stinespring_dilate(f);
  out.dilation = dilation_residuals(dil, f);
  const Algebra& b = f.domain();
  const std::size_t h = f.codomain().block_size(0);
  const std::size_t k_dim = dil.k_dim;
  out.k_dim = k_dim;

  const std::size_t n_min = (k_dim + h - 1) / h;
  const std::size_t largest = *std::max_element(b.blocks().begin(), b.blocks().end());
  const std::size_t extra = options.extra_copies < 0 ? largest : static_cast<std::size_t>(options.extra_copies);

  std::optional<std::vector<std::size_t>> multiplicities;
  std::vector<std::size_t> unreachable;
  std::size_t n = n_min;
  for (; n <= n_min + extra; ++n) {
    std::size_t pad = n * h - k_dim;
    if (pad == 0) {
      multiplicities = std::vector<std::size_t>{};
      break;
    }
    auto sols = multiplicity_solutions(b.blocks(), pad);
    if (!sols.empty()) {
      multiplicities = sols.front();
      break;
    }
    unreachable.push_back(pad);
  }
  if (!multiplicities) {
    std::string dims;
    for (std::size_t d : unreachable) dims += (dims.empty() ? "" : ", ") + std::to_string(d);
    out.failure = PaddingFailure{k_dim, h, unreachable,
                                 "dilation space of dimension " + std::to_string(k_dim) +
                                     " cannot be padded to a multiple of " + std::to_string(h) +
                                     ": no unital representation of " + describe(b) + " has dimension " + dims};
    return out;
  }
  out.copies = n;
  out.padding = n * h - k_dim;
  out.padding_multiplicities = *multiplicities;

  const std::size_t total = n * h;
  std::optional<LinearMap> pad_rep;
  if (out.padding > 0) pad_rep = multiplicity_representation(b, *multiplicities);

  // Orthonormal basis of K ⊕ P whose first h vectors are the image of H.
  CMatrix basis = CMatrix::Zero(total, total);
  basis.topLeftCorner(k_dim, h) = dil.v;
  {
    CMatrix proj = CMatrix::Identity(total, total) - basis.leftCols(h) * basis.leftCols(h).adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (proj + proj.adjoint()));
    Eigen::Index c = static_cast<Eigen::Index>(h);
    for (Eigen::Index i = es.eigenvalues().size(); i-- > 0 && c < static_cast<Eigen::Index>(total);)
      if (es.eigenvalues()(i) > 0.5) basis.col(c++) = es.eigenvectors().col(i);
  }
  // basis column i*h + s carries ξ_s ⊗ e_i, whose index in H ⊗ ℂ^n is s*n + i
  CMatrix u(total, total);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < h; ++s) u.row(s * n + i) = basis.col(i * h + s).adjoint();

  Algebra target = Algebra::full_matrix(h);
  Algebra params = Algebra::full_matrix(n);
  Algebra codomain = tensor_algebra(target, params);
  std::vector<Element> images;
  for (std::size_t k = 0; k < b.dim(); ++k) {
    CMatrix psi = CMatrix::Zero(total, total);
    psi.topLeftCorner(k_dim, k_dim) = dil.pi.image(k).block(0);
    if (pad_rep) psi.bottomRightCorner(out.padding, out.padding) = pad_rep->image(k).block(0);
    images.emplace_back(codomain, std::vector<CMatrix>{u * psi * u.adjoint()});
  }
  LinearMap phi = make_morphism(LinearMap::from_images(b, codomain, images), 1e-8);

  CMatrix corner = CMatrix::Zero(n, n);
  corner(0, 0) = 1.0;
  RandomQuantumMap witness(QuantumFamily(b, target, params, phi), State(params, {corner}));
  out.reproduction_residual = basis_distance(induced_nfmo(witness), f);
  out.witness = std::move(witness);
  return out;
}

}  // namespace rqm
