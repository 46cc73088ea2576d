#include <doctest.h>

#include "fixtures.hpp"
#include "rqm/classical.hpp"
#include "rqm/invariant.hpp"

using namespace rqm;
using fixtures::diff;
using fixtures::max_abs;

namespace {

const Algebra M2 = Algebra::full_matrix(2);
const Algebra C2 = Algebra::commutative(2);

/// σ ∘ F on every basis element, against σ itself.
double oracle_invariance_gap(const RandomQuantumMap& r, const State& sigma) {
  CMatrix f = fixtures::oracle_nfmo(r);
  double worst = 0.0;
  for (std::size_t k = 0; k < r.source().dim(); ++k) {
    Element fk = Element::from_flat(r.target(), f.col(static_cast<Eigen::Index>(k)));
    Complex lhs = fixtures::oracle_evaluate(sigma.densities(), fk);
    Complex rhs = fixtures::oracle_evaluate(sigma.densities(), Element::basis(r.source(), k));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

ClassicalRandomMap deterministic(std::vector<std::size_t> image) {
  const std::size_t n = image.size();
  ClassicalRandomMap m{make_space(n), make_space(n), make_space(1), {}, {1.0}};
  for (std::size_t x = 0; x < n; ++x) m.table.push_back({image[x]});
  return m;
}

}  // namespace

TEST_CASE("Hermitian basis is orthonormal and round-trips") {
  for (const Algebra& a : {M2, make_algebra({1, 3}), make_algebra({2, 1, 2})}) {
    HermitianBasis basis(a);
    CHECK(basis.size() == a.dim());
    for (std::size_t j = 0; j < basis.size(); ++j) {
      auto gj = basis.element(j);
      CHECK(max_abs(Element(a, gj).adjoint().flatten() - Element(a, gj).flatten()) < 1e-15);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        auto gk = basis.element(k);
        Complex ip = 0.0;
        for (std::size_t b = 0; b < a.num_blocks(); ++b) ip += (gj[b] * gk[b]).trace();
        CHECK(std::abs(ip - Complex(j == k ? 1.0 : 0.0)) < 1e-14);
      }
    }
    Rng rng(a.dim());
    State s = random_state(a, rng);
    CHECK(distance(basis.densities(basis.coordinates(s.densities())), s.densities()) < 1e-14);
  }
}

TEST_CASE("transition matrices of trivial and constant RQMs") {
  Eigen::MatrixXd id = transition_matrix(RandomQuantumMap::trivial(M2));
  CHECK((id - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd c = transition_matrix(fixtures::constant_rqm(2));
  // Everything collapses onto the normalized identity coordinate.
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
  expected(0, 0) = 1.0;
  CHECK((c - expected).cwiseAbs().maxCoeff() < 1e-14);

  Rng rng(1);
  CHECK_THROWS_AS(transition_matrix(fixtures::random_rqm(M2, make_algebra({1, 1}), C2, rng)), Error);
}

TEST_CASE("constant-transition RQM has the normalized trace as unique invariant state") {
  InvariantReport rep = invariant_states(fixtures::constant_rqm(2));
  CHECK(rep.fixed_dim == 1);
  CHECK(distance(rep.canonical.densities(), {CMatrix::Identity(2, 2) / 2.0}) <= 1e-10);
  CHECK(rep.residual <= 1e-12);

  InvariantReport m3 = invariant_states(fixtures::constant_rqm(3));
  CHECK(m3.fixed_dim == 1);
  CHECK(distance(m3.canonical.densities(), {CMatrix::Identity(3, 3) / 3.0}) <= 1e-10);
}

TEST_CASE("trivial RQM fixes the whole Hermitian space") {
  for (const Algebra& a : {M2, make_algebra({1, 2}), Algebra::commutative(3)}) {
    InvariantReport rep = invariant_states(RandomQuantumMap::trivial(a));
    CHECK(rep.fixed_dim == a.dim());
    CHECK(distance(rep.canonical.densities(), State::maximally_mixed(a).densities()) < 1e-12);
  }
}

TEST_CASE("random RQMs on M2 have invariant states") {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    RandomQuantumMap r = fixtures::random_rqm_on(M2, t % 2 == 0 ? C2 : M2, rng);
    InvariantReport rep = invariant_states(r);
    CHECK(rep.fixed_dim >= 1);
    CHECK(rep.residual <= 1e-9);
    CHECK(oracle_invariance_gap(r, rep.canonical) <= 1e-9);
    CHECK(verify_invariant(r, rep.canonical) == doctest::Approx(rep.residual).epsilon(1e-6).scale(1e-12));
  }
}

TEST_CASE("absorbing and periodic classical chains") {
  // 0 -> 0, 1 -> 0: everything is absorbed at 0.
  InvariantReport absorbing = invariant_states(lift_random_map(deterministic({0, 0})));
  CHECK(absorbing.fixed_dim == 1);
  CHECK(std::abs(state_distribution(absorbing.canonical)[0] - 1.0) < 1e-9);

  // A 3-cycle: the iterates of the uniform state are already fixed.
  InvariantReport cycle = invariant_states(lift_random_map(deterministic({1, 2, 0})));
  CHECK(cycle.fixed_dim == 1);
  for (double p : state_distribution(cycle.canonical)) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

  // Two disjoint swaps: fixed space spanned by the uniform measures on each pair.
  InvariantReport swaps = invariant_states(lift_random_map(deterministic({1, 0, 3, 2})));
  CHECK(swaps.fixed_dim == 2);
}

TEST_CASE("verify_invariant measures the one-step displacement") {
  RandomQuantumMap c = fixtures::constant_rqm(2);
  CMatrix up = CMatrix::Zero(2, 2);
  up(0, 0) = 1.0;
  // T(e11) = 1/2, and ||diag(1, 0) - diag(1/2, 1/2)|| = 1/√2.
  CHECK(verify_invariant(c, State(M2, {up})) == doctest::Approx(std::sqrt(0.5)));
  CHECK(verify_invariant(c, State::maximally_mixed(M2)) < 1e-15);
}

TEST_CASE("skew levels and maps") {
  Rng rng(3);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, C2, rng);
  CHECK(skew_level(r, 0) == M2);
  CHECK(skew_level(r, 2).dim() == 16);
  LinearMap s0 = skew_map(r, 0);
  CHECK(max_abs(s0.matrix() - r.phi().matrix()) == 0.0);
  LinearMap s2 = skew_map(r, 2);
  CHECK(s2.kind() == MapKind::Morphism);
  for (int t = 0; t < 5; ++t) {
    Element a = random_element(M2, rng);
    Element c1 = random_element(C2, rng), c2 = random_element(C2, rng);
    Element x = tensor_element(tensor_element(a, c1), c2);
    Element expected = tensor_element(tensor_element(r.phi().apply(a), c1), c2);
    CHECK(diff(s2.apply(x), expected) < 1e-12);
    CHECK(diff(skew_apply(r, 2, x), expected) < 1e-12);
  }
  CHECK_THROWS_AS(skew_map(r, 8, 1000), Error);
}

TEST_CASE("skew invariance matches invariance of sigma") {
  Rng rng(4);
  for (int t = 0; t < 6; ++t) {
    RandomQuantumMap r = fixtures::random_rqm_on(M2, C2, rng);
    State canonical = invariant_states(r).canonical;
    State other = random_state(M2, rng);
    for (const State* s : {&canonical, &other}) {
      SkewReport rep = verify_skew_invariance(r, *s, 3);
      CHECK(rep.identity_residual <= 1e-10);
      CHECK(rep.pass == (verify_invariant(r, *s) <= 1e-9));
    }
  }
}

TEST_CASE("skew pullback at depth 1 is the transition") {
  Rng rng(5);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, M2, rng);
  State sigma = random_state(M2, rng);
  SkewReport rep = verify_skew_invariance(r, sigma, 1);
  // (σ ⊗ ν)(φ(a)) - σ(a) on basis elements, computed from the oracle NFMO.
  CHECK(rep.violation == doctest::Approx(oracle_invariance_gap(r, sigma)).epsilon(1e-8).scale(1e-12));
  CHECK(rep.identity_residual < 1e-12);
}

TEST_CASE("skew preconditions") {
  Rng rng(6);
  RandomQuantumMap r = fixtures::random_rqm_on(M2, C2, rng);
  try {
    verify_skew_invariance(r, State::maximally_mixed(M2), 0);
    FAIL("depth 0 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSpec);
  }
  try {
    verify_skew_invariance(r, State::maximally_mixed(M2), 8, kDefaultTolerance, 1000);
    FAIL("cap not enforced");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }
}
