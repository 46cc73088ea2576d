#include <doctest.h>

#include "fixtures.hpp"
#include "rqm/classical.hpp"
#include "rqm/invariant.hpp"

using namespace rqm;
using fixtures::max_abs;

namespace {

ClassicalRandomMap xor_map() {
  return ClassicalRandomMap{make_space(2), make_space(2), make_space(2), {{0, 1}, {1, 0}}, {0.5, 0.5}};
}

ClassicalRandomMap random_map(std::size_t nx, std::size_t ny, std::size_t nz, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, ny - 1);
  ClassicalRandomMap m{make_space(nx), make_space(ny), make_space(nz), {}, random_probability_vector(nz, rng)};
  for (std::size_t x = 0; x < nx; ++x) {
    std::vector<std::size_t> row;
    for (std::size_t z = 0; z < nz; ++z) row.push_back(pick(rng));
    m.table.push_back(row);
  }
  return m;
}

Eigen::MatrixXd random_kernel(std::size_t rows, std::size_t cols, Rng& rng) {
  Eigen::MatrixXd k(rows, cols);
  for (std::size_t x = 0; x < rows; ++x) {
    auto p = random_probability_vector(cols, rng);
    for (std::size_t y = 0; y < cols; ++y) k(x, y) = p[y];
  }
  return k;
}

/// P(X_n = y) by enumerating every path (x_0, z_1, ..., z_n).
std::vector<double> path_sum(const std::vector<ClassicalRandomMap>& maps, const std::vector<double>& sigma,
                             std::size_t n) {
  std::vector<double> out(sigma.size(), 0.0);
  std::vector<std::size_t> z(n, 0);
  for (std::size_t x0 = 0; x0 < sigma.size(); ++x0) {
    std::fill(z.begin(), z.end(), 0);
    while (true) {
      double p = sigma[x0];
      std::size_t x = x0;
      for (std::size_t i = 0; i < n; ++i) {
        p *= maps[i].nu[z[i]];
        x = maps[i].table[x][z[i]];
      }
      out[x] += p;
      std::size_t i = 0;
      while (i < n && ++z[i] == maps[i].z.size) z[i++] = 0;
      if (i == n) break;
    }
  }
  return out;
}

double gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

}  // namespace

TEST_CASE("kernels of random maps") {
  CHECK((kernel_of_random_map(xor_map()).matrix() - Eigen::MatrixXd::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff() == 0.0);

  ClassicalRandomMap ignore{make_space(3), make_space(3), make_space(2), {{0, 0}, {1, 1}, {2, 2}}, {0.3, 0.7}};
  CHECK(kernel_of_random_map(ignore).matrix().isApprox(Eigen::MatrixXd::Identity(3, 3)));

  ClassicalRandomMap point{make_space(2), make_space(3), make_space(2), {{2, 0}, {1, 0}}, {1.0, 0.0}};
  Eigen::MatrixXd expected(2, 3);
  expected << 0, 0, 1, 0, 1, 0;
  CHECK(kernel_of_random_map(point).matrix() == expected);
}

TEST_CASE("invalid kernels and maps are rejected") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.5, 0.7, 0.2;
  try {
    Kernel k(bad);
    FAIL("non-stochastic kernel accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotStochastic);
    CHECK(e.check_id() == "kernel.row-sum");
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  Eigen::MatrixXd neg(1, 2);
  neg << 1.5, -0.5;
  try {
    Kernel k(neg);
    FAIL("negative kernel accepted");
  } catch (const Error& e) {
    CHECK(e.check_id() == "kernel.nonnegative");
  }
  ClassicalRandomMap out_of_range = xor_map();
  out_of_range.table[1][0] = 2;
  CHECK_THROWS_AS(validate_random_map(out_of_range), Error);
  ClassicalRandomMap bad_nu = xor_map();
  bad_nu.nu = {0.5, 0.6};
  CHECK_THROWS_AS(validate_random_map(bad_nu), Error);
}

TEST_CASE("FMO and kernel round trip") {
  Kernel id(Eigen::MatrixXd::Identity(3, 3));
  CHECK(basis_distance(fmo_of_kernel(id), LinearMap::identity(Algebra::commutative(3))) == 0.0);

  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    Kernel k(random_kernel(3, 4, rng));
    LinearMap f = fmo_of_kernel(k);
    CHECK_NOTHROW(validate_cp_unital(f));
    CHECK(max_abs(f.apply(Element::unit(f.domain())).flatten() - Element::unit(f.codomain()).flatten()) < 1e-14);
    CHECK((kernel_of_fmo(f).matrix() - k.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    // F(f)(x) = Σ_y K[x][y] f(y), by explicit sum.
    Element g = random_element(f.domain(), rng);
    Element fg = f.apply(g);
    for (std::size_t x = 0; x < 3; ++x) {
      Complex s = 0.0;
      for (std::size_t y = 0; y < 4; ++y) s += k(x, y) * g.block(y)(0, 0);
      CHECK(std::abs(fg.block(x)(0, 0) - s) < 1e-14);
    }
  }
  CHECK_THROWS_AS(kernel_of_fmo(LinearMap::identity(Algebra::full_matrix(2))), Error);
}

TEST_CASE("lifted random maps induce the kernel FMO") {
  RandomQuantumMap x = lift_random_map(xor_map());
  CHECK(max_abs(induced_nfmo(x).matrix() - CMatrix::Constant(2, 2, 0.5)) < 1e-15);

  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    ClassicalRandomMap m = random_map(1 + t % 4, 1 + (t + 1) % 4, 1 + (t + 2) % 4, rng);
    RandomQuantumMap r = lift_random_map(m);
    CHECK(r.phi().kind() == MapKind::Morphism);
    CHECK(max_abs(induced_nfmo(r).matrix() - fmo_of_kernel(kernel_of_random_map(m)).matrix()) <= 1e-12);
    CHECK(max_abs(fixtures::oracle_nfmo(r) - fmo_of_kernel(kernel_of_random_map(m)).matrix()) <= 1e-12);
  }

  // Deterministic map: composition operator f ↦ f ∘ φ(·, z_0).
  ClassicalRandomMap det{make_space(3), make_space(2), make_space(1), {{1}, {0}, {1}}, {1.0}};
  LinearMap f = induced_nfmo(lift_random_map(det));
  Element g(Algebra::commutative(2), {CMatrix::Constant(1, 1, 3.0), CMatrix::Constant(1, 1, 5.0)});
  Element fg = f.apply(g);
  CHECK(fg.block(0)(0, 0) == Complex(5.0));
  CHECK(fg.block(1)(0, 0) == Complex(3.0));
  CHECK(fg.block(2)(0, 0) == Complex(5.0));
}

TEST_CASE("classical Chapman-Kolmogorov") {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    ClassicalRandomMap m1 = random_map(3, 2, 3, rng);
    ClassicalRandomMap m2 = random_map(2, 4, 2, rng);
    ClassicalRandomMap c = compose_random_maps(m1, m2);
    Eigen::MatrixXd product = kernel_of_random_map(m1).matrix() * kernel_of_random_map(m2).matrix();
    CHECK((kernel_of_random_map(c).matrix() - product).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((compose_kernels(kernel_of_random_map(m1), kernel_of_random_map(m2)).matrix() - product).cwiseAbs().maxCoeff() <
          1e-14);

    RandomQuantumMap q1 = lift_random_map(m1), q2 = lift_random_map(m2);
    RandomQuantumMap lifted = lift_random_map(c);
    CHECK(max_abs(lifted.phi().matrix() - diamond(q1.family(), q2.family()).phi().matrix()) < 1e-15);
    Transition composed = induced_transition(implement_compose(q1, q2));
    Transition stepwise = induced_transition(q2);
    for (int s = 0; s < 3; ++s) {
      State rho = distribution_state(random_probability_vector(3, rng));
      auto lhs = composed.apply_densities(rho.densities());
      auto rhs = stepwise.apply_densities(induced_transition(q1).apply_densities(rho.densities()));
      CHECK(distance(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("chain marginals: trivial cases and path enumeration") {
  Rng rng(4);
  std::vector<double> sigma = {0.2, 0.3, 0.5};
  ClassicalRandomMap shift{make_space(3), make_space(3), make_space(1), {{1}, {2}, {0}}, {1.0}};
  CHECK(classical_chain_marginals({shift}, sigma, 0) == sigma);
  CHECK(gap(classical_chain_marginals({shift}, sigma, 1), {0.5, 0.2, 0.3}) == 0.0);

  std::vector<ClassicalRandomMap> maps = {random_map(3, 3, 2, rng), random_map(3, 3, 3, rng), random_map(3, 3, 4, rng)};
  CHECK(gap(classical_chain_marginals(maps, sigma, 3), path_sum(maps, sigma, 3)) < 1e-14);
  CHECK_THROWS_AS(classical_chain_marginals(maps, sigma, 4), Error);
}

TEST_CASE("lifted chains reproduce classical marginals") {
  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    std::vector<ClassicalRandomMap> maps = {random_map(3, 3, 2, rng), random_map(3, 3, 3, rng),
                                            random_map(3, 3, 2, rng)};
    std::vector<double> sigma = random_probability_vector(3, rng);
    TruncatedChain chain = build_chain(lift_chain(maps, sigma, 3));
    CHECK_FALSE(chain.homogeneous());
    for (std::size_t n = 0; n <= 3; ++n) {
      std::vector<double> expected = path_sum(maps, sigma, n);
      for (std::size_t x = 0; x < 3; ++x) {
        Complex p = chain.mu(n).evaluate(chain.psi(n).apply(Element::basis(chain.base(), x)));
        CHECK(std::abs(p - expected[x]) <= 1e-10);
      }
    }
    for (std::size_t n = 0; n < 3; ++n) CHECK(verify_markov(chain, n).pass());
    CHECK(check_semi_commutative(chain).sufficient_condition_holds);
  }
}

TEST_CASE("classical Markov property holds pointwise") {
  // (E_n f)ψ_n = ∫ f ψ_{n+1} dν_{n+1}: evaluate both sides at every point of B_n.
  Rng rng(6);
  ClassicalRandomMap m = random_map(3, 3, 2, rng);
  TruncatedChain chain = build_chain(lift_chain({m}, {0.2, 0.3, 0.5}, 2));
  Kernel k = kernel_of_random_map(m);
  for (std::size_t n = 0; n < 2; ++n) {
    LinearMap e = conditional_expectation(chain, n);
    for (std::size_t y = 0; y < 3; ++y) {
      Element lhs = e.apply(chain.psi(n + 1).apply(Element::basis(chain.base(), y)));
      // ψ_n(K δ_y) on the left.
      Element ky = Element::zero(chain.base());
      for (std::size_t x = 0; x < 3; ++x) ky += Complex(k(x, y)) * Element::basis(chain.base(), x);
      Element rhs = chain.psi(n).apply(ky);
      CHECK(max_abs(lhs.flatten() - rhs.flatten()) <= 1e-10);
    }
  }
}

TEST_CASE("lifted invariant states and stationarity match the stochastic matrix") {
  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    ClassicalRandomMap m = random_map(3, 3, 3, rng);
    Kernel k = kernel_of_random_map(m);
    RandomQuantumMap r = lift_random_map(m);
    InvariantReport rep = invariant_states(r);
    std::vector<double> pi = state_distribution(rep.canonical);
    Eigen::RowVectorXd p = Eigen::Map<Eigen::RowVectorXd>(pi.data(), 3);
    CHECK((p * k.matrix() - p).cwiseAbs().maxCoeff() <= 1e-9);
    if (rep.fixed_dim == 1) CHECK(gap(pi, stationary_distribution(k)) <= 1e-9);

    TruncatedChain chain = build_chain(lift_chain({m}, pi, 2));
    CHECK(check_stationarity(chain, 2, 1).pass);
  }
  Eigen::MatrixXd pos(2, 2);
  pos << 0.9, 0.1, 0.4, 0.6;
  CHECK(gap(stationary_distribution(Kernel(pos)), {0.8, 0.2}) < 1e-14);
}

TEST_CASE("every quarter-grid kernel on two points is implemented exactly") {
  const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  int count = 0;
  for (double a : grid)
    for (double b : grid) {
      Eigen::MatrixXd km(2, 2);
      km << a, 1.0 - a, b, 1.0 - b;
      Kernel k(km);
      ClassicalRandomMap m = implement_kernel(k);
      CHECK_NOTHROW(validate_random_map(m));
      CHECK(kernel_of_random_map(m).matrix() == km);
      ++count;
    }
  CHECK(count == 25);
}

TEST_CASE("random kernels are implemented") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    Kernel k(random_kernel(1 + t % 4, 1 + (t / 4) % 4, rng));
    ClassicalRandomMap m = implement_kernel(k);
    CHECK(m.z.size <= k.rows() * (k.cols() - 1) + 1);
    CHECK((kernel_of_random_map(m).matrix() - k.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
