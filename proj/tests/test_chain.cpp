#include <doctest.h>

#include "fixtures.hpp"
#include "rqm/chain.hpp"
#include "rqm/invariant.hpp"
#include "rqm/tensor_legs.hpp"

using namespace rqm;
using fixtures::diff;
using fixtures::max_abs;

namespace {

const Algebra M2 = Algebra::full_matrix(2);
const Algebra C2 = Algebra::commutative(2);

TruncatedChain homogeneous(const RandomQuantumMap& r, const State& sigma, std::size_t depth) {
  return build_chain(ChainSpec{r.target(), {r}, true, sigma, depth, kDefaultDimCap});
}

/// ψ_2 = (φ ⊗ id) φ expanded over the tensor legs of A ⊗ C.
Element psi2_oracle(const RandomQuantumMap& r, std::size_t k) {
  const Algebra& a = r.target();
  const Algebra& c = r.parameter();
  TensorLegs legs({a, c});
  CVector w = r.phi().image(k).flatten();
  Element out = Element::zero(tensor_algebra(tensor_algebra(a, c), c));
  for (std::size_t j = 0; j < a.dim(); ++j)
    for (std::size_t e = 0; e < c.dim(); ++e) {
      Complex coeff = w(static_cast<Eigen::Index>(legs.flat({j, e})));
      if (coeff != Complex(0.0)) out += coeff * tensor_element(r.phi().image(j), Element::basis(c, e));
    }
  return out;
}

/// μ_N densities as explicit Kronecker products, block by block.
std::vector<CMatrix> product_densities(const State& sigma, const State& nu, std::size_t n) {
  std::vector<CMatrix> d = sigma.densities();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<CMatrix> next;
    for (const CMatrix& x : d)
      for (const CMatrix& y : nu.densities()) next.push_back(kron(x, y));
    d = next;
  }
  return d;
}

}  // namespace

TEST_CASE("trivial homogeneous chain keeps every level equal to A") {
  TruncatedChain c = homogeneous(RandomQuantumMap::trivial(M2), State::maximally_mixed(M2), 3);
  CHECK(c.depth() == 3);
  for (std::size_t n = 0; n <= 3; ++n) {
    CHECK(c.level(n).blocks() == M2.blocks());
    CHECK(max_abs(c.psi(n).matrix() - CMatrix::Identity(4, 4)) == 0.0);
  }
}

TEST_CASE("level bookkeeping for A = M2, C = C^2") {
  Rng rng(1);
  TruncatedChain c = homogeneous(fixtures::random_rqm_on(M2, C2, rng), State::maximally_mixed(M2), 2);
  CHECK(c.level(2).blocks() == std::vector<std::size_t>{2, 2, 2, 2});
  CHECK(c.level(2).dim() == 16);
}

TEST_CASE("psi_2 matches the expanded diamond") {
  Rng rng(2);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, M2, rng);
  TruncatedChain c = homogeneous(r, random_state(M2, rng), 2);
  for (std::size_t k = 0; k < M2.dim(); ++k) {
    CHECK(max_abs(c.psi(2).image(k).flatten() - psi2_oracle(r, k).flatten()) < 1e-12);
  }
  MorphismDefects d = morphism_defects(c.psi(2));
  CHECK(std::max({d.multiplicative, d.star, d.unital}) < 1e-12);
}

TEST_CASE("dimension cap is enforced before construction") {
  Rng rng(3);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, M2, rng);
  try {
    build_chain(ChainSpec{M2, {r}, true, State::maximally_mixed(M2), 4, 100});
    FAIL("cap not enforced");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
    CHECK(std::string(e.what()).find("1024") != std::string::npos);
  }
}

TEST_CASE("nonhomogeneous chains take one RQM per step") {
  Rng rng(4);
  RandomQuantumMap r1 = fixtures::random_rqm_on(M2, C2, rng);
  RandomQuantumMap r2 = fixtures::random_rqm_on(M2, M2, rng);
  TruncatedChain c = build_chain(ChainSpec{M2, {r1, r2}, false, State::maximally_mixed(M2), 2, kDefaultDimCap});
  CHECK(c.level(2) == tensor_algebra(tensor_algebra(M2, C2), M2));
  CHECK_THROWS_AS(build_chain(ChainSpec{M2, {r1}, false, State::maximally_mixed(M2), 2, kDefaultDimCap}), Error);
}

TEST_CASE("truncation consistency: mu_{n+1}(x ⊗ 1) = mu_n(x)") {
  Rng rng(5);
  TruncatedChain c = homogeneous(fixtures::random_rqm_on(M2, C2, rng), random_state(M2, rng), 3);
  for (std::size_t n = 0; n < 3; ++n) {
    const Algebra& b = c.level(n);
    Algebra tail = c.step(n + 1).parameter();
    for (std::size_t k = 0; k < b.dim(); ++k) {
      Element x = Element::basis(b, k);
      Element lifted(c.level(n + 1), tensor_element(x, Element::unit(tail)).mats());
      CHECK(std::abs(c.mu(n + 1).evaluate(lifted) - c.mu(n).evaluate(x)) < 1e-12);
    }
  }
}

TEST_CASE("conditional expectations") {
  Rng rng(6);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, M2, rng);
  TruncatedChain c = homogeneous(r, random_state(M2, rng), 2);
  LinearMap e0 = conditional_expectation(c, 0);
  CHECK_NOTHROW(validate_cp_unital(e0));
  CHECK_NOTHROW(validate_cp_unital(conditional_expectation(c, 1)));
  for (int t = 0; t < 5; ++t) {
    Element a = random_element(M2, rng);
    Element cc = random_element(M2, rng);
    CHECK(diff(e0.apply(tensor_element(a, cc)), r.nu().evaluate(cc) * a) < 1e-12);
    Element b1 = random_element(c.level(1), rng);
    Element lifted(c.level(2), tensor_element(b1, Element::unit(M2)).mats());
    CHECK(diff(conditional_expectation(c, 1).apply(lifted), b1) < 1e-12);
    Element x = random_element(c.level(2), rng);
    CHECK(std::abs(c.mu(1).evaluate(conditional_expectation(c, 1).apply(x)) - c.mu(2).evaluate(x)) < 1e-12);
  }
  CHECK_THROWS_AS(conditional_expectation(c, 2), Error);
}

TEST_CASE("verify_markov on trivial and random chains") {
  TruncatedChain triv = homogeneous(RandomQuantumMap::trivial(M2), State::maximally_mixed(M2), 2);
  MarkovReport t = verify_markov(triv, 0);
  CHECK(t.module_property.residual == 0.0);
  CHECK(t.state_compatibility.residual < 1e-15);
  CHECK(t.containment.residual == 0.0);

  Rng rng(7);
  for (int s = 0; s < 3; ++s) {
    TruncatedChain c = homogeneous(fixtures::random_rqm_on(M2, C2, rng), random_state(M2, rng), 2);
    for (std::size_t n = 0; n < 2; ++n) {
      MarkovReport m = verify_markov(c, n);
      CHECK(m.pass());
      CHECK(m.module_property.residual <= 1e-10);
      CHECK(m.state_compatibility.residual <= 1e-10);
      CHECK(m.containment.residual <= 1e-10);
      CHECK(m.module_property.id == "markov.module-property");
    }
  }
}

TEST_CASE("containment identity at a = e11, computed independently") {
  Rng rng(8);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, C2, rng);
  TruncatedChain c = homogeneous(r, State::maximally_mixed(M2), 2);
  Element e11 = Element::matrix_unit(M2, 0, 0, 0);
  Element lhs = conditional_expectation(c, 0).apply(c.psi(1).apply(e11));
  Element rhs = fixtures::contract_right(r.phi().apply(e11), M2, r.nu());
  CHECK(diff(lhs, rhs) < 1e-12);
}

TEST_CASE("finite-dimensional distributions") {
  Rng rng(9);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, C2, rng);
  State sigma = random_state(M2, rng);
  TruncatedChain c = homogeneous(r, sigma, 2);
  CHECK(std::abs(finite_dim_distribution(c, {0}, {Element::unit(M2)}) - 1.0) < 1e-14);
  CHECK(std::abs(finite_dim_distribution(c, {2, 0, 1, 1}, std::vector<Element>(4, Element::unit(M2))) - 1.0) < 1e-12);
  Element a = random_element(M2, rng);
  CHECK(std::abs(finite_dim_distribution(c, {0}, {a}) - sigma.evaluate(a)) < 1e-12);

  // r = 2 against explicit embeddings and explicit product densities.
  auto mu2 = product_densities(sigma, r.nu(), 2);
  for (const auto& times : std::vector<std::vector<std::size_t>>{{0, 2}, {2, 1}, {1, 1}}) {
    Element a1 = random_element(M2, rng), a2 = random_element(M2, rng);
    std::vector<Element> embedded;
    for (std::size_t i = 0; i < 2; ++i) {
      Element img = c.psi(times[i]).apply(i == 0 ? a1 : a2);
      Element full = img;
      for (std::size_t t = times[i]; t < 2; ++t) full = tensor_element(full, Element::unit(C2));
      embedded.push_back(Element(c.level(2), full.mats()));
    }
    Complex expected = fixtures::oracle_evaluate(mu2, embedded[0] * embedded[1]);
    CHECK(std::abs(finite_dim_distribution(c, times, {a1, a2}) - expected) < 1e-12);
  }
  CHECK_THROWS_AS(finite_dim_distribution(c, {3}, {a}), Error);
}

TEST_CASE("stationarity follows invariance of the initial state") {
  RandomQuantumMap triv = RandomQuantumMap::trivial(M2);
  Rng rng(10);
  StationarityReport t = check_stationarity(homogeneous(triv, random_state(M2, rng), 3), 2, 1);
  CHECK(t.max_violation < 1e-15);
  CHECK(t.pass);

  RandomQuantumMap dep = fixtures::constant_rqm(2);
  CHECK(check_stationarity(homogeneous(dep, State::maximally_mixed(M2), 3), 2, 2).max_violation <= 1e-9);

  CMatrix up = CMatrix::Zero(2, 2);
  up(0, 0) = 1.0;
  StationarityReport moving = check_stationarity(homogeneous(dep, State(M2, {up}), 3), 1, 1);
  CHECK_FALSE(moving.pass);
  CHECK(moving.violation(1, 1) > 1e-3);
  CHECK_FALSE(moving.worst_word.empty());
}

TEST_CASE("stationarity is equivalent to invariance on random RQMs") {
  Rng rng(11);
  for (int t = 0; t < 4; ++t) {
    RandomQuantumMap r = fixtures::random_rqm_on(M2, C2, rng);
    State canonical = invariant_states(r).canonical;
    State other = random_state(M2, rng);
    for (const State* s : {&canonical, &other}) {
      StationarityReport rep = check_stationarity(homogeneous(r, *s, 3), 2, 1);
      CHECK(rep.pass == (verify_invariant(r, *s) <= 1e-9));
    }
  }
}

TEST_CASE("stationarity preconditions") {
  Rng rng(12);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, C2, rng);
  TruncatedChain c = homogeneous(r, State::maximally_mixed(M2), 2);
  try {
    check_stationarity(c, 1, 3);
    FAIL("shift beyond depth accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
  }
  TruncatedChain nh = build_chain(ChainSpec{M2, {r, r}, false, State::maximally_mixed(M2), 2, kDefaultDimCap});
  try {
    check_stationarity(nh, 1, 1);
    FAIL("nonhomogeneous chain accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSpec);
  }
}

TEST_CASE("semi-commutativity sufficient condition") {
  Algebra c2 = Algebra::commutative(2);
  TruncatedChain comm = homogeneous(RandomQuantumMap::trivial(c2), State::maximally_mixed(c2), 2);
  SemiCommutativityReport a = check_semi_commutative(comm);
  CHECK(a.sufficient_condition_holds);
  CHECK(a.max_commutator == 0.0);

  TruncatedChain m2 = homogeneous(RandomQuantumMap::trivial(M2), State::maximally_mixed(M2), 1);
  SemiCommutativityReport b = check_semi_commutative(m2);
  CHECK_FALSE(b.sufficient_condition_holds);
  // [e12, e21] = e11 - e22, Hilbert-Schmidt norm √2.
  CHECK(b.max_commutator == doctest::Approx(std::sqrt(2.0)));
}
